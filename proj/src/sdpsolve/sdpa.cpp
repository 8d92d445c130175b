#include "critsos/sdpsolve/sdpa.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <tuple>

namespace critsos {
namespace sdp {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using EntryKey = std::tuple<int, int, int, int>;

}  // namespace

SdpaModel to_sdpa_model(const SdpProblem& problem) {
  problem.validate();
  SdpaModel model;
  const std::size_t nfree = problem.free_vars.size();
  const int free_block = static_cast<int>(problem.blocks.size()) + 1;

  model.comments.push_back("critsos SDP export");
  for (std::size_t k = 0; k < problem.blocks.size(); ++k) {
    model.comments.push_back("block " + std::to_string(k + 1) + ": " +
                             problem.blocks[k].label);
  }
  if (nfree > 0) {
    model.comments.push_back("block " + std::to_string(free_block) +
                             ": free split, entries 1.." +
                             std::to_string(nfree) + " positive part, " +
                             std::to_string(nfree + 1) + ".." +
                             std::to_string(2 * nfree) + " negative part");
    for (std::size_t j = 0; j < nfree; ++j) {
      model.comments.push_back("free " + std::to_string(j + 1) + ": " +
                               problem.free_vars[j]);
    }
  }
  for (std::size_t i = 0; i < problem.equalities.size(); ++i) {
    model.comments.push_back("constraint " + std::to_string(i + 1) + ": " +
                             problem.equalities[i].label);
  }

  model.num_constraints = static_cast<int>(problem.equalities.size());
  for (const auto& b : problem.blocks) {
    model.block_sizes.push_back(static_cast<int>(b.dim));
  }
  if (nfree > 0) model.block_sizes.push_back(-2 * static_cast<int>(nfree));

  std::map<EntryKey, double> merged;
  auto add_free = [&](int matrix, std::size_t var, double value) {
    const int pos = static_cast<int>(var) + 1;
    const int neg = static_cast<int>(var + nfree) + 1;
    merged[{matrix, free_block, pos, pos}] += value;
    merged[{matrix, free_block, neg, neg}] -= value;
  };
  for (std::size_t j = 0; j < nfree; ++j) {
    if (problem.objective[j] != 0.0) add_free(0, j, problem.objective[j]);
  }
  for (const auto& e : problem.block_objective) {
    merged[{0, static_cast<int>(e.block) + 1, static_cast<int>(e.row) + 1,
            static_cast<int>(e.col) + 1}] += e.value;
  }
  for (std::size_t i = 0; i < problem.equalities.size(); ++i) {
    const Equality& eq = problem.equalities[i];
    const int matrix = static_cast<int>(i) + 1;
    model.c.push_back(eq.rhs);
    for (const auto& e : eq.block_entries) {
      merged[{matrix, static_cast<int>(e.block) + 1, static_cast<int>(e.row) + 1,
              static_cast<int>(e.col) + 1}] += e.value;
    }
    for (const auto& f : eq.free_entries) add_free(matrix, f.var, f.value);
  }
  for (const auto& [key, value] : merged) {
    if (value == 0.0) continue;
    const auto [matrix, block, row, col] = key;
    model.entries.push_back({matrix, block, row, col, value});
  }
  return model;
}

SdpProblem from_sdpa_model(const SdpaModel& model) {
  SdpProblem problem;
  std::size_t nfree = 0;
  std::size_t npsd = model.block_sizes.size();
  if (!model.block_sizes.empty() && model.block_sizes.back() < 0) {
    if (model.block_sizes.back() % 2 != 0) {
      throw std::invalid_argument("free-split block must have even size");
    }
    nfree = static_cast<std::size_t>(-model.block_sizes.back() / 2);
    --npsd;
  }
  for (std::size_t k = 0; k < npsd; ++k) {
    if (model.block_sizes[k] <= 0) {
      throw std::invalid_argument("only the last block may be diagonal");
    }
    problem.blocks.push_back({"block" + std::to_string(k + 1),
                              static_cast<std::size_t>(model.block_sizes[k])});
  }
  for (std::size_t j = 0; j < nfree; ++j) {
    problem.free_vars.push_back("free" + std::to_string(j + 1));
  }
  problem.objective.assign(nfree, 0.0);
  problem.equalities.resize(static_cast<std::size_t>(model.num_constraints));
  for (std::size_t i = 0; i < problem.equalities.size(); ++i) {
    problem.equalities[i].label = "c" + std::to_string(i + 1);
    problem.equalities[i].rhs = model.c.at(i);
  }

  // Restore labels from our own header.
  for (const std::string& line : model.comments) {
    std::istringstream in(line);
    std::string kind;
    std::size_t index = 0;
    char colon = 0;
    if (!(in >> kind >> index >> colon) || colon != ':' || index == 0) continue;
    std::string label;
    std::getline(in >> std::ws, label);
    if (kind == "block" && index <= npsd) {
      problem.blocks[index - 1].label = label;
    } else if (kind == "free" && index <= nfree) {
      problem.free_vars[index - 1] = label;
    } else if (kind == "constraint" && index <= problem.equalities.size()) {
      problem.equalities[index - 1].label = label;
    }
  }

  const int free_block = static_cast<int>(npsd) + 1;
  for (const SdpaEntry& e : model.entries) {
    if (e.block == free_block && nfree > 0) {
      if (e.row != e.col) throw std::invalid_argument("off-diagonal free entry");
      const auto pos = static_cast<std::size_t>(e.row - 1);
      if (pos >= nfree) continue;  // negative part mirrors the positive part
      if (e.matrix == 0) {
        problem.objective[pos] = e.value;
      } else {
        problem.equalities.at(static_cast<std::size_t>(e.matrix - 1))
            .free_entries.push_back({pos, e.value});
      }
      continue;
    }
    if (e.matrix == 0) {
      problem.block_objective.push_back({static_cast<std::size_t>(e.block - 1),
                                         static_cast<std::size_t>(e.row - 1),
                                         static_cast<std::size_t>(e.col - 1), e.value});
      continue;
    }
    problem.equalities.at(static_cast<std::size_t>(e.matrix - 1))
        .block_entries.push_back({static_cast<std::size_t>(e.block - 1),
                                  static_cast<std::size_t>(e.row - 1),
                                  static_cast<std::size_t>(e.col - 1), e.value});
  }
  problem.validate();
  return problem;
}

std::string write_sdpa(const SdpaModel& model) {
  std::string out;
  for (const std::string& c : model.comments) out += "* " + c + "\n";
  out += std::to_string(model.num_constraints) + " = mDIM\n";
  out += std::to_string(model.block_sizes.size()) + " = nBLOCK\n";
  for (std::size_t k = 0; k < model.block_sizes.size(); ++k) {
    if (k > 0) out += " ";
    out += std::to_string(model.block_sizes[k]);
  }
  out += " = bLOCKsTRUCT\n";
  for (std::size_t i = 0; i < model.c.size(); ++i) {
    if (i > 0) out += " ";
    out += format_value(model.c[i]);
  }
  out += "\n";
  for (const SdpaEntry& e : model.entries) {
    out += std::to_string(e.matrix) + " " + std::to_string(e.block) + " " +
           std::to_string(e.row) + " " + std::to_string(e.col) + " " +
           format_value(e.value) + "\n";
  }
  return out;
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string& line) {
    if (pos_ >= text_.size()) return false;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line.assign(text_.substr(pos_, end - pos_));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos_ = end + 1;
    ++line_no_;
    return true;
  }
  int line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

// Numbers on a header line; separators , { } ( ) are whitespace and anything
// after '=' is commentary.
std::vector<double> numbers_of(const std::string& raw, int line_no) {
  std::string line = raw.substr(0, raw.find('='));
  for (char& ch : line) {
    if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
  }
  std::vector<double> out;
  const char* p = line.c_str();
  for (;;) {
    while (*p == ' ' || *p == '\t') ++p;
    if (*p == '\0') break;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(p, &end);
    if (end == p || errno == ERANGE) {
      throw SdpaError(line_no, "expected a number");
    }
    out.push_back(v);
    p = end;
  }
  return out;
}

int as_int(double v, int line_no) {
  if (v != static_cast<double>(static_cast<int>(v))) {
    throw SdpaError(line_no, "expected an integer");
  }
  return static_cast<int>(v);
}

}  // namespace

SdpaModel read_sdpa(std::string_view text) {
  SdpaModel model;
  LineReader reader(text);
  std::string line;
  bool have_line = false;
  while ((have_line = reader.next(line))) {
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      model.comments.push_back(body);
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    break;
  }
  auto header = [&](const char* what) {
    while (have_line && line.find_first_not_of(" \t") == std::string::npos) {
      have_line = reader.next(line);
    }
    if (!have_line) throw SdpaError(reader.line_no(), std::string("missing ") + what);
    auto values = numbers_of(line, reader.line_no());
    const int at = reader.line_no();
    have_line = reader.next(line);
    if (values.empty()) throw SdpaError(at, std::string("missing ") + what);
    return std::pair{values, at};
  };

  {
    auto [v, at] = header("mDIM");
    model.num_constraints = as_int(v[0], at);
    if (model.num_constraints < 0) throw SdpaError(at, "negative mDIM");
  }
  int nblocks = 0;
  {
    auto [v, at] = header("nBLOCK");
    nblocks = as_int(v[0], at);
    if (nblocks <= 0) throw SdpaError(at, "nBLOCK must be positive");
  }
  {
    auto [v, at] = header("bLOCKsTRUCT");
    if (static_cast<int>(v.size()) < nblocks) {
      throw SdpaError(at, "bLOCKsTRUCT lists fewer sizes than nBLOCK");
    }
    for (int k = 0; k < nblocks; ++k) {
      const int size = as_int(v[static_cast<std::size_t>(k)], at);
      if (size == 0) throw SdpaError(at, "zero block size");
      model.block_sizes.push_back(size);
    }
  }
  // The c vector may be empty when there are no constraints.
  if (model.num_constraints > 0) {
    std::vector<double> values;
    int at = reader.line_no();
    while (static_cast<int>(values.size()) < model.num_constraints) {
      if (!have_line) throw SdpaError(at, "c vector is too short");
      at = reader.line_no();
      auto more = numbers_of(line, at);
      values.insert(values.end(), more.begin(), more.end());
      have_line = reader.next(line);
    }
    if (static_cast<int>(values.size()) != model.num_constraints) {
      throw SdpaError(at, "c vector has the wrong length");
    }
    model.c = std::move(values);
  } else if (have_line && numbers_of(line, reader.line_no()).empty()) {
    have_line = reader.next(line);
  }

  while (have_line) {
    const int at = reader.line_no();
    const auto v = numbers_of(line, at);
    have_line = reader.next(line);
    if (v.empty()) continue;
    if (v.size() != 5) throw SdpaError(at, "entry needs 5 fields");
    SdpaEntry e{as_int(v[0], at), as_int(v[1], at), as_int(v[2], at),
                as_int(v[3], at), v[4]};
    if (e.matrix < 0 || e.matrix > model.num_constraints) {
      throw SdpaError(at, "matrix index out of range");
    }
    if (e.block < 1 || e.block > nblocks) {
      throw SdpaError(at, "block index out of range");
    }
    const int dim = std::abs(model.block_sizes[static_cast<std::size_t>(e.block - 1)]);
    if (e.row < 1 || e.col < 1 || e.row > dim || e.col > dim) {
      throw SdpaError(at, "entry index out of range");
    }
    if (e.row > e.col) std::swap(e.row, e.col);
    model.entries.push_back(e);
  }
  std::stable_sort(model.entries.begin(), model.entries.end(),
                   [](const SdpaEntry& a, const SdpaEntry& b) {
                     return std::tie(a.matrix, a.block, a.row, a.col) <
                            std::tie(b.matrix, b.block, b.row, b.col);
                   });
  return model;
}

}  // namespace sdp
}  // namespace critsos
