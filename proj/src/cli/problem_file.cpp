#include "critsos/cli/problem_file.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "critsos/polyring/parse.hpp"

namespace critsos {
namespace cli {

ProblemFileError::ProblemFileError(std::size_t line, std::size_t column,
                                   const std::string& message)
    : std::runtime_error(column > 0 ? "line " + std::to_string(line) + ", column " +
                                          std::to_string(column) + ": " + message
                         : line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
      line_(line),
      column_(column) {}

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
    return false;
  }
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

// Splits on commas, reporting each piece with its 0-based offset.
std::vector<std::pair<std::string, std::size_t>> split_list(std::string_view text) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string_view piece =
        text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    const std::size_t b = piece.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
      out.emplace_back(std::string(), start);
    } else {
      const std::size_t e = piece.find_last_not_of(" \t");
      out.emplace_back(std::string(piece.substr(b, e - b + 1)), start + b);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool to_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno == 0;
}

bool to_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno != 0 || v < -1000000 || v > 1000000) return false;
  out = static_cast<int>(v);
  return true;
}

}  // namespace

std::vector<double> parse_point(std::string_view text) {
  std::vector<double> out;
  for (const auto& [item, offset] : split_list(text)) {
    double v = 0.0;
    if (!to_double(item, v)) {
      throw std::invalid_argument("bad coordinate '" + item + "' at offset " +
                                  std::to_string(offset));
    }
    out.push_back(v);
  }
  return out;
}

ProblemFile parse_problem_file(std::string_view text) {
  struct Pending {
    std::string text;
    std::size_t line;
    std::size_t column;  // 1-based column of the first character
  };
  std::optional<Pending> objective;
  std::vector<Pending> constraints;
  std::vector<Pending> minimizers;
  std::optional<std::size_t> vars_line;
  ProblemFile file;
  std::set<std::string> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string line(text.substr(pos, nl == text.npos ? text.npos : nl - pos));
    pos = nl == text.npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;

    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) {
      throw ProblemFileError(line_no, first + 1, "expected 'key: value'");
    }
    std::string key = line.substr(first, colon - first);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::size_t vstart = line.find_first_not_of(" \t", colon + 1);
    if (vstart == std::string::npos) vstart = line.size();
    std::string value = line.substr(vstart);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t')) value.pop_back();
    const std::size_t vcol = vstart + 1;

    const bool repeatable = key == "constraint" || key == "minimizer";
    if (!repeatable && !seen.insert(key).second) {
      throw ProblemFileError(line_no, first + 1, "duplicate key '" + key + "'");
    }
    auto need_value = [&] {
      if (value.empty()) throw ProblemFileError(line_no, vcol, "missing value for '" + key + "'");
    };
    auto positive_double = [&](std::optional<double>& slot) {
      need_value();
      double v = 0.0;
      if (!to_double(value, v) || !(v > 0.0)) {
        throw ProblemFileError(line_no, vcol, "'" + key + "' must be a positive number");
      }
      slot = v;
    };
    auto integer = [&](std::optional<int>& slot, int lo) {
      need_value();
      int v = 0;
      if (!to_int(value, v) || v < lo) {
        throw ProblemFileError(line_no, vcol, "'" + key + "' must be an integer >= " +
                                                  std::to_string(lo));
      }
      slot = v;
    };

    if (key == "vars") {
      need_value();
      std::set<std::string> names;
      for (const auto& [name, offset] : split_list(value)) {
        if (!is_identifier(name)) {
          throw ProblemFileError(line_no, vcol + offset,
                                 "invalid variable name '" + name + "'");
        }
        if (!names.insert(name).second) {
          throw ProblemFileError(line_no, vcol + offset,
                                 "duplicate variable '" + name + "'");
        }
        file.problem.vars.push_back(name);
      }
      vars_line = line_no;
    } else if (key == "objective") {
      need_value();
      objective = Pending{value, line_no, vcol};
    } else if (key == "constraint") {
      need_value();
      constraints.push_back({value, line_no, vcol});
    } else if (key == "minimizer") {
      need_value();
      minimizers.push_back({value, line_no, vcol});
    } else if (key == "mode") {
      need_value();
      try {
        file.options.mode = critical::parse_ideal_mode(value);
      } catch (const std::exception&) {
        throw ProblemFileError(line_no, vcol, "mode must be 'critical' or 'gradient'");
      }
    } else if (key == "dmin") {
      integer(file.options.d_min, 1);
    } else if (key == "dmax") {
      integer(file.options.d_max, 1);
    } else if (key == "max-iter") {
      integer(file.options.max_iter, 1);
    } else if (key == "tol-feas") {
      positive_double(file.options.tol_feas);
    } else if (key == "tol-gap") {
      positive_double(file.options.tol_gap);
    } else if (key == "tol-eig") {
      positive_double(file.options.tol_eig);
    } else if (key == "tol-conv") {
      positive_double(file.options.tol_conv);
    } else if (key == "tol-eig-cut") {
      positive_double(file.options.tol_eig_cut);
    } else if (key == "tol-verify") {
      positive_double(file.options.tol_verify);
    } else {
      throw ProblemFileError(line_no, first + 1, "unknown key '" + key + "'");
    }
  }

  if (!vars_line) throw ProblemFileError(0, 0, "missing 'vars'");
  if (!objective) throw ProblemFileError(0, 0, "missing 'objective'");

  const auto& vars = file.problem.vars;
  auto parse = [&](const Pending& p) {
    try {
      return poly::parse_poly(p.text, vars);
    } catch (const poly::ParseError& e) {
      throw ProblemFileError(p.line, p.column + e.position(), e.message());
    }
  };
  file.problem.objective = parse(*objective);
  for (const auto& c : constraints) file.problem.constraints.push_back(parse(c));

  if (file.problem.constraints.size() > kMaxConstraints) {
    throw ProblemFileError(constraints[kMaxConstraints].line, 0,
                           "at most " + std::to_string(kMaxConstraints) +
                               " constraints are supported");
  }
  if (file.options.d_min && file.options.d_max && *file.options.d_max < *file.options.d_min) {
    throw ProblemFileError(0, 0, "dmax is smaller than dmin");
  }
  for (const auto& m : minimizers) {
    std::vector<double> point;
    for (const auto& [item, offset] : split_list(m.text)) {
      double v = 0.0;
      if (!to_double(item, v)) {
        throw ProblemFileError(m.line, m.column + offset, "bad coordinate '" + item + "'");
      }
      point.push_back(v);
    }
    if (point.size() != vars.size()) {
      throw ProblemFileError(m.line, m.column, "minimizer has " + std::to_string(point.size()) +
                                                   " coordinates, expected " +
                                                   std::to_string(vars.size()));
    }
    file.minimizers.push_back(std::move(point));
  }
  return file;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProblemFileError(0, 0, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_file(buf.str());
}

}  // namespace cli
}  // namespace critsos
