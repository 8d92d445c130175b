#include "critsos/certify/certificate.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "critsos/polyring/parse.hpp"

namespace critsos {
namespace certify {

using poly::Polynomial;

Certificate extract_certificate(const sdp::SdpSolution& solution,
                                const sosrelax::Relaxation& relaxation,
                                double eig_cut) {
  if (solution.status != sdp::SolveStatus::kOptimal) {
    throw std::invalid_argument(
        std::string("cannot extract a certificate from a non-optimal solve (") +
        sdp::to_string(solution.status) + ")");
  }
  if (solution.block_values.size() != relaxation.preordering.size() ||
      solution.free_values.size() != relaxation.sdp.free_vars.size()) {
    throw std::invalid_argument("solution does not match the relaxation");
  }
  const std::size_t n = relaxation.equality_monomials.empty()
                            ? 0
                            : relaxation.equality_monomials.front().nvars();
  Certificate cert;
  cert.gamma = solution.free_values[relaxation.gamma_index];
  cert.d = relaxation.d;
  cert.mode = relaxation.mode;

  for (std::size_t k = 0; k < relaxation.preordering.size(); ++k) {
    const auto& term = relaxation.preordering[k];
    const Eigen::MatrixXd& gram = solution.block_values[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    SosTerm sos;
    sos.e = term.e;
    for (Eigen::Index i = eig.eigenvalues().size(); i-- > 0;) {
      const double lambda = eig.eigenvalues()(i);
      if (!(lambda > eig_cut)) continue;
      const Eigen::VectorXd u = eig.eigenvectors().col(i);
      std::vector<double> coeffs(u.data(), u.data() + u.size());
      sos.squares.push_back(
          {lambda, Polynomial::from_doubles(n, term.gram_basis, coeffs)});
    }
    cert.sos_terms.push_back(std::move(sos));
  }

  for (std::size_t t = 0; t < relaxation.ideal.size(); ++t) {
    const auto& term = relaxation.ideal[t];
    const std::size_t offset = relaxation.multiplier_offset[t];
    std::vector<double> coeffs(
        solution.free_values.begin() + static_cast<std::ptrdiff_t>(offset),
        solution.free_values.begin() +
            static_cast<std::ptrdiff_t>(offset + term.multiplier_basis.size()));
    cert.ideal_multipliers.push_back(
        {term.subset, Polynomial::from_doubles(n, term.multiplier_basis, coeffs)});
  }
  return cert;
}

Polynomial sos_polynomial(const SosTerm& term, std::size_t nvars) {
  Polynomial sigma(nvars);
  for (const SquareTerm& sq : term.squares) {
    if (sq.p.nvars() != nvars) {
      throw std::invalid_argument("SOS component has the wrong variable count");
    }
    sigma += poly::scale(sq.p * sq.p, poly::Rational(sq.weight));
  }
  return sigma;
}

VerificationReport verify_certificate(const Problem& problem,
                                      const Certificate& cert, double tol) {
  validate(problem);
  const std::size_t n = problem.nvars();
  const std::size_t s = problem.num_constraints();
  const int cap = 2 * cert.d;

  // Generators rebuilt from scratch rather than taken from the relaxation.
  const critical::GeneratorSet gens = critical::build_generators(problem, cert.mode);

  VerificationReport report;
  Polynomial residual = problem.objective;
  residual -= Polynomial::constant(n, poly::Rational(cert.gamma));

  for (const SosTerm& term : cert.sos_terms) {
    if (s < 32 && (term.e >> s) != 0) {
      throw std::invalid_argument("certificate word refers to a missing constraint");
    }
    for (const SquareTerm& sq : term.squares) {
      if (!(sq.weight >= 0.0)) {
        throw std::invalid_argument("negative SOS weight in certificate");
      }
    }
    Polynomial word = Polynomial::constant(n, 1);
    for (std::size_t j = 0; j < s; ++j) {
      if (term.e & (Subset{1} << j)) word *= problem.constraints[j];
    }
    for (const SquareTerm& sq : term.squares) {
      if (!sq.p.is_zero() && 2 * sq.p.degree() + word.degree() > cap) {
        report.degrees_ok = false;
      }
    }
    const Polynomial sigma = sos_polynomial(term, n);
    if (sigma.is_zero()) continue;
    residual -= sigma * word;
  }
  for (const IdealMultiplier& mult : cert.ideal_multipliers) {
    if (mult.phi.nvars() != n) {
      throw std::invalid_argument("ideal multiplier has the wrong variable count");
    }
    const critical::Generator* gen = nullptr;
    for (const auto& g : gens.entries) {
      if (g.subset == mult.subset) gen = &g;
    }
    if (gen == nullptr) {
      throw std::invalid_argument("certificate multiplier refers to a missing generator");
    }
    if (mult.phi.is_zero() || gen->polynomial.is_zero()) continue;
    const Polynomial product = mult.phi * gen->polynomial;
    if (product.degree() > cap) report.degrees_ok = false;
    residual -= product;
  }

  report.max_residual = poly::to_double(residual.coefficient_norm_inf());
  report.threshold = tol * (1.0 + poly::to_double(problem.objective.coefficient_norm_inf()));
  report.passed = report.max_residual <= report.threshold && report.degrees_ok;
  report.residual = std::move(residual);
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

Subset parse_subset(const std::string& text, std::size_t line) {
  if (text.size() < 2 || text.front() != '{' || text.back() != '}') {
    throw std::invalid_argument("certificate line " + std::to_string(line) +
                                ": expected a subset like {1,2}");
  }
  Subset out = 0;
  std::stringstream in(text.substr(1, text.size() - 2));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const int j = std::stoi(item);
    if (j < 1 || j > 32) {
      throw std::invalid_argument("certificate line " + std::to_string(line) +
                                  ": subset index out of range");
    }
    out |= Subset{1} << (j - 1);
  }
  return out;
}

std::string format_subset(Subset subset) {
  std::string out = "{";
  bool first = true;
  for (int j = 0; j < 32; ++j) {
    if (!(subset & (Subset{1} << j))) continue;
    if (!first) out += ",";
    out += std::to_string(j + 1);
    first = false;
  }
  return out + "}";
}

double parse_double(const std::string& text, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || trim(end).size() != 0) {
    throw std::invalid_argument("certificate line " + std::to_string(line) +
                                ": malformed number '" + text + "'");
  }
  return v;
}

}  // namespace

std::string serialize_certificate(const Certificate& cert,
                                  const std::vector<std::string>& vars) {
  std::ostringstream out;
  out << "critsos-certificate 1\n";
  out << "vars: ";
  for (std::size_t i = 0; i < vars.size(); ++i) out << (i ? ", " : "") << vars[i];
  out << "\nmode: " << critical::to_string(cert.mode) << "\n";
  out << "d: " << cert.d << "\n";
  out << "gamma: " << fmt(cert.gamma) << "\n";
  for (const SosTerm& term : cert.sos_terms) {
    if (term.squares.empty()) {
      out << "sos " << format_subset(term.e) << ": 0 | 0\n";
    }
    for (const SquareTerm& sq : term.squares) {
      out << "sos " << format_subset(term.e) << ": " << fmt(sq.weight) << " | "
          << poly::to_string(sq.p, vars, poly::CoefficientStyle::kDecimal)
          << "\n";
    }
  }
  const bool gradient = cert.mode == critical::IdealMode::kGradient;
  for (const IdealMultiplier& m : cert.ideal_multipliers) {
    // gradient mode keys are variable indices, written 1-based as {i}
    const Subset key = gradient ? Subset{1} << m.subset : m.subset;
    out << "ideal " << format_subset(key) << ": "
        << poly::to_string(m.phi, vars, poly::CoefficientStyle::kDecimal)
        << "\n";
  }
  return out.str();
}

Certificate parse_certificate(std::string_view text,
                              const std::vector<std::string>& vars) {
  Certificate cert;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool saw_magic = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!saw_magic) {
      if (line != "critsos-certificate 1") {
        throw std::invalid_argument("not a critsos certificate");
      }
      saw_magic = true;
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("certificate line " + std::to_string(line_no) +
                                  ": missing ':'");
    }
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    auto parse_exact = [&](const std::string& body) {
      try {
        return poly::round_to_doubles(poly::parse_poly(body, vars));
      } catch (const poly::ParseError& e) {
        throw std::invalid_argument("certificate line " + std::to_string(line_no) +
                                    ": " + e.what());
      }
    };
    if (key == "vars") {
      std::vector<std::string> names;
      std::stringstream list(value);
      std::string name;
      while (std::getline(list, name, ',')) names.push_back(trim(name));
      if (names != vars) {
        throw std::invalid_argument("certificate variables do not match");
      }
    } else if (key == "mode") {
      cert.mode = critical::parse_ideal_mode(value);
    } else if (key == "d") {
      cert.d = std::stoi(value);
    } else if (key == "gamma") {
      cert.gamma = parse_double(value, line_no);
    } else if (key.rfind("sos ", 0) == 0) {
      const Subset e = parse_subset(trim(key.substr(4)), line_no);
      const auto bar = value.find('|');
      if (bar == std::string::npos) {
        throw std::invalid_argument("certificate line " + std::to_string(line_no) +
                                    ": expected 'weight | polynomial'");
      }
      const double weight = parse_double(trim(value.substr(0, bar)), line_no);
      Polynomial p = parse_exact(trim(value.substr(bar + 1)));
      SosTerm* term = nullptr;
      for (auto& t : cert.sos_terms) {
        if (t.e == e) term = &t;
      }
      if (term == nullptr) {
        cert.sos_terms.push_back({e, {}});
        term = &cert.sos_terms.back();
      }
      if (weight != 0.0 && !p.is_zero()) term->squares.push_back({weight, std::move(p)});
    } else if (key.rfind("ideal ", 0) == 0) {
      Subset subset = parse_subset(trim(key.substr(6)), line_no);
      if (cert.mode == critical::IdealMode::kGradient) {
        if (std::popcount(subset) != 1) {
          throw std::invalid_argument("certificate line " + std::to_string(line_no) +
                                      ": gradient multipliers take one variable index");
        }
        subset = static_cast<Subset>(std::countr_zero(subset));
      }
      cert.ideal_multipliers.push_back({subset, parse_exact(value)});
    } else {
      throw std::invalid_argument("certificate line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  if (!saw_magic) throw std::invalid_argument("empty certificate");
  return cert;
}

}  // namespace certify
}  // namespace critsos
