#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "critsos/sdpsolve/solver.hpp"
#include "critsos/simd/kernels.hpp"

namespace critsos {
namespace sdp {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void SolverSettings::validate() const {
  if (!(feas_tol > 0) || !(gap_tol > 0) || !(eig_tol > 0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (max_iterations <= 0) {
    throw std::invalid_argument("max_iterations must be positive");
  }
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Blocks = std::vector<MatrixXd>;

constexpr double kStepFraction = 0.98;
constexpr int kRefinePasses = 2;

struct Entry {
  std::size_t row;
  std::size_t col;
  double value;
};

// Constraints restricted to one PSD block.
struct BlockRows {
  std::vector<std::size_t> eq;             // reduced equality index
  std::vector<std::vector<Entry>> entries;  // parallel to eq
};

// Presolved problem: zero rows removed, free columns reduced to a linearly
// independent subset.
struct Model {
  std::size_t m = 0;
  std::vector<std::size_t> dims;
  std::vector<BlockRows> rows;
  MatrixXd free_matrix;  // m x nf
  VectorXd b;
  VectorXd c;
  Blocks cmat;  // block objective, dense symmetric
  std::vector<std::size_t> kept_eq;
  std::vector<std::size_t> kept_free;
};

MatrixXd matmul(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out = MatrixXd::Zero(a.rows(), b.cols());
  simd::active_kernels().gemm(
      static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(b.cols()),
      static_cast<std::size_t>(a.cols()), 1.0, a.data(),
      static_cast<std::size_t>(a.rows()), b.data(),
      static_cast<std::size_t>(b.rows()), out.data(),
      static_cast<std::size_t>(out.rows()));
  return out;
}

double frobenius_inner(const MatrixXd& a, const MatrixXd& b) {
  return simd::active_kernels().dot(a.data(), b.data(),
                                    static_cast<std::size_t>(a.size()));
}

void symmetrize(MatrixXd& a) {
  a = 0.5 * (a + a.transpose()).eval();
}

// A(Y)_i = sum_k <A_ik, Y_k>, valid for non-symmetric Y.
VectorXd apply_op(const Model& model, const Blocks& y) {
  VectorXd out = VectorXd::Zero(static_cast<Eigen::Index>(model.m));
  for (std::size_t k = 0; k < model.rows.size(); ++k) {
    const auto& br = model.rows[k];
    const MatrixXd& yk = y[k];
    for (std::size_t r = 0; r < br.eq.size(); ++r) {
      double s = 0.0;
      for (const Entry& e : br.entries[r]) {
        const auto p = static_cast<Eigen::Index>(e.row);
        const auto q = static_cast<Eigen::Index>(e.col);
        s += e.value * (p == q ? yk(p, p) : yk(p, q) + yk(q, p));
      }
      out(static_cast<Eigen::Index>(br.eq[r])) += s;
    }
  }
  return out;
}

// A*(y) per block.
Blocks apply_adjoint(const Model& model, const VectorXd& y) {
  Blocks out;
  out.reserve(model.dims.size());
  for (std::size_t k = 0; k < model.dims.size(); ++k) {
    const auto n = static_cast<Eigen::Index>(model.dims[k]);
    MatrixXd mk = MatrixXd::Zero(n, n);
    const auto& br = model.rows[k];
    for (std::size_t r = 0; r < br.eq.size(); ++r) {
      const double yi = y(static_cast<Eigen::Index>(br.eq[r]));
      if (yi == 0.0) continue;
      for (const Entry& e : br.entries[r]) {
        const auto p = static_cast<Eigen::Index>(e.row);
        const auto q = static_cast<Eigen::Index>(e.col);
        mk(p, q) += yi * e.value;
        if (p != q) mk(q, p) += yi * e.value;
      }
    }
    out.push_back(std::move(mk));
  }
  return out;
}

// With X = Lx Lx^T and Z^{-1} = Lz Lz^T, the HKM Schur matrix is
// M_ij = <Lz^T A_i Lx, Lz^T A_j Lx>, i.e. M = G G^T. Returns G^T, one column
// per equality holding the stacked blocks of Lz^T A_i Lx.
MatrixXd schur_factor_columns(const Model& model, const Blocks& lx_t,
                              const Blocks& lz_t) {
  std::size_t total = 0;
  for (std::size_t n : model.dims) total += n * n;
  MatrixXd gt = MatrixXd::Zero(static_cast<Eigen::Index>(total),
                               static_cast<Eigen::Index>(model.m));
  const simd::KernelTable& kt = simd::active_kernels();
  std::size_t offset = 0;
  for (std::size_t k = 0; k < model.dims.size(); ++k) {
    const std::size_t n = model.dims[k];
    const auto& br = model.rows[k];
    // Columns of lz_t are rows of Lz^T's transpose; col p of lz_t is
    // Lz^T e_p and col q of lx_t is Lx^T e_q.
    const MatrixXd& a = lz_t[k];
    const MatrixXd& b = lx_t[k];
    for (std::size_t r = 0; r < br.eq.size(); ++r) {
      double* dst = gt.col(static_cast<Eigen::Index>(br.eq[r])).data() + offset;
      for (const Entry& e : br.entries[r]) {
        const auto p = static_cast<Eigen::Index>(e.row);
        const auto q = static_cast<Eigen::Index>(e.col);
        kt.ger(n, n, e.value, a.col(p).data(), b.col(q).data(), dst, n);
        if (p != q) kt.ger(n, n, e.value, a.col(q).data(), b.col(p).data(), dst, n);
      }
    }
    offset += n * n;
  }
  return gt;
}

// Largest alpha with x + alpha * dx still PSD (infinity when unbounded).
double max_step(const MatrixXd& x, const MatrixXd& dx) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd t = llt.matrixL().solve(dx);
  t = llt.matrixL().solve(t.transpose().eval());
  symmetrize(t);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(t, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  if (lo >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lo;
}

double inf_norm(const VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

double max_abs(const Blocks& blocks) {
  double out = 0.0;
  for (const auto& b : blocks) {
    if (b.size() > 0) out = std::max(out, b.cwiseAbs().maxCoeff());
  }
  return out;
}

// Factorized saddle system [M B; B^T 0] with M = G G^T. The triangular
// factor of M comes from a QR of G^T, which avoids squaring the condition
// number; a shifted LDL^T of G G^T is the fallback when R is singular.
class NewtonSystem {
 public:
  bool factor(const MatrixXd& gt, const MatrixXd& free_matrix) {
    free_matrix_ = &free_matrix;
    const Eigen::Index m = gt.cols();
    use_qr_ = false;
    if (gt.rows() >= m) {
      Eigen::HouseholderQR<MatrixXd> qr(gt);
      r_ = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
      const VectorXd diag = r_.diagonal().cwiseAbs();
      use_qr_ = m == 0 || (diag.allFinite() && diag.minCoeff() > 1e-15 * diag.maxCoeff());
    }
    if (!use_qr_) {
      const MatrixXd schur = matmul(gt.transpose(), gt);
      const double scale = std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      double shift = 0.0;
      for (int attempt = 0; attempt < 6; ++attempt) {
        MatrixXd shifted = schur;
        if (shift > 0) shifted.diagonal().array() += shift;
        ldlt_.compute(shifted);
        if (ldlt_.info() == Eigen::Success && usable(ldlt_, scale)) break;
        shift = shift == 0.0 ? 1e-14 * scale : shift * 100.0;
        if (attempt == 5) return false;
      }
    }
    if (free_matrix.cols() == 0) return true;
    minv_b_ = schur_solve(free_matrix);
    const MatrixXd s = free_matrix.transpose() * minv_b_;
    free_ldlt_.compute(s);
    return free_ldlt_.info() == Eigen::Success;
  }

  // Solves M dy - B dw = r1, B^T dy = r2.
  void solve(const VectorXd& r1, const VectorXd& r2, VectorXd& dy,
             VectorXd& dw) const {
    const VectorXd minv_r1 = schur_solve(r1);
    if (free_matrix_->cols() == 0) {
      dy = minv_r1;
      dw.resize(0);
      return;
    }
    // dw' = -dw satisfies M dy + B dw' = r1.
    const VectorXd dwp =
        free_ldlt_.solve(free_matrix_->transpose() * minv_r1 - r2);
    dy = minv_r1 - minv_b_ * dwp;
    dw = -dwp;
  }

 private:
  MatrixXd schur_solve(const MatrixXd& rhs) const {
    if (!use_qr_) return ldlt_.solve(rhs);
    const MatrixXd t = r_.transpose().triangularView<Eigen::Lower>().solve(rhs);
    return r_.triangularView<Eigen::Upper>().solve(t);
  }

  // Rejects zero or clearly negative pivots.
  static bool usable(const Eigen::LDLT<MatrixXd>& f, double scale) {
    const VectorXd d = f.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (!(d(i) > 1e-30 * scale)) return false;
    }
    return true;
  }

  const MatrixXd* free_matrix_ = nullptr;
  bool use_qr_ = false;
  MatrixXd r_;
  Eigen::LDLT<MatrixXd> ldlt_;
  Eigen::LDLT<MatrixXd> free_ldlt_;
  MatrixXd minv_b_;
};

struct CoreResult {
  SolveStatus status = SolveStatus::kNumericalFailure;
  Blocks x;
  Blocks z;
  VectorXd y;
  VectorXd w;
  int iterations = 0;
  std::string message;
};

struct Direction {
  Blocks dx;
  Blocks dz;
  VectorXd dy;
  VectorXd dw;
};

CoreResult run_core(const Model& model, const SolverSettings& settings) {
  const std::size_t nblocks = model.dims.size();
  const auto m = static_cast<Eigen::Index>(model.m);
  const double b_norm = inf_norm(model.b);
  const double c_norm = inf_norm(model.c);
  double total_dim = 0.0;
  for (std::size_t d : model.dims) total_dim += static_cast<double>(d);

  CoreResult out;
  const double start = 1.0 + b_norm;
  for (std::size_t k = 0; k < nblocks; ++k) {
    const auto n = static_cast<Eigen::Index>(model.dims[k]);
    out.x.push_back(start * MatrixXd::Identity(n, n));
    out.z.push_back(start * MatrixXd::Identity(n, n));
  }
  out.y = VectorXd::Zero(m);
  out.w = VectorXd::Zero(model.free_matrix.cols());

  int stalled = 0;
  for (int it = 0; it <= settings.max_iterations; ++it) {
    out.iterations = it;
    const VectorXd rp = model.b - apply_op(model, out.x) -
                        model.free_matrix * out.w;
    Blocks rd = apply_adjoint(model, out.y);
    for (std::size_t k = 0; k < nblocks; ++k) rd[k] = out.z[k] - rd[k] + model.cmat[k];
    const VectorXd rf = model.c - model.free_matrix.transpose() * out.y;

    double pobj = model.c.dot(out.w);
    for (std::size_t k = 0; k < nblocks; ++k) pobj += frobenius_inner(model.cmat[k], out.x[k]);
    const double dobj = model.b.dot(out.y);
    double comp = 0.0;
    for (std::size_t k = 0; k < nblocks; ++k) {
      comp += frobenius_inner(out.x[k], out.z[k]);
    }
    const double mu = total_dim > 0 ? comp / total_dim : 0.0;
    const double pres = inf_norm(rp);
    const double dres = std::max(max_abs(rd), inf_norm(rf));
    const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
    const double rel_gap = std::abs(dobj - pobj) / denom;

    if (settings.verbosity > 0) {
      std::fprintf(stderr,
                   "%3d pobj %+.10e dobj %+.10e pres %.2e dres %.2e gap %.2e "
                   "mu %.2e\n",
                   it, pobj, dobj, pres, dres, rel_gap, mu);
    }

    if (pres <= settings.feas_tol * (1.0 + b_norm) &&
        dres <= settings.feas_tol * (1.0 + c_norm) &&
        rel_gap <= settings.gap_tol && comp / denom <= settings.gap_tol) {
      out.status = SolveStatus::kOptimal;
      return out;
    }
    // (X, w) / pobj approximates a primal ray once pobj is huge.
    if (pobj * settings.feas_tol > 1.0 + b_norm + pres) {
      out.status = SolveStatus::kUnbounded;
      out.message = kUnboundedDiagnostic;
      return out;
    }
    // (y, Z) / -dobj approximates a Farkas certificate.
    if (-dobj * settings.feas_tol > 1.0 + c_norm + dres) {
      out.status = SolveStatus::kInfeasible;
      out.message = "primal infeasible: dual objective diverged";
      return out;
    }
    if (it == settings.max_iterations) break;

    Blocks zinv(nblocks);
    Blocks lx_t(nblocks);
    Blocks lz_t(nblocks);
    bool factored = true;
    for (std::size_t k = 0; k < nblocks && factored; ++k) {
      const auto n = out.z[k].rows();
      Eigen::LLT<MatrixXd> zf(out.z[k]);
      Eigen::LLT<MatrixXd> xf(out.x[k]);
      if (zf.info() != Eigen::Success || xf.info() != Eigen::Success) {
        factored = false;
        break;
      }
      // Z = L L^T gives Z^{-1} = L^{-T} L^{-1}, so Lz = L^{-T} and Lz^T = L^{-1}.
      const MatrixXd linv = zf.matrixL().solve(MatrixXd::Identity(n, n));
      zinv[k] = linv.transpose() * linv;
      symmetrize(zinv[k]);
      // Column p of lz_t must be Lz^T e_p = L^{-1} e_p; column q of lx_t is
      // Lx^T e_q.
      lz_t[k] = linv;
      lx_t[k] = xf.matrixL().transpose();
    }
    if (!factored) {
      out.message = "iterate lost positive definiteness";
      return out;
    }

    NewtonSystem system;
    if (!system.factor(schur_factor_columns(model, lx_t, lz_t),
                       model.free_matrix)) {
      out.message = "Schur complement factorization failed";
      return out;
    }

    Blocks x_rd_zinv(nblocks);
    for (std::size_t k = 0; k < nblocks; ++k) {
      x_rd_zinv[k] = matmul(matmul(out.x[k], rd[k]), zinv[k]);
    }

    // h holds R_c Z^{-1}; the step is dX = h - X dZ Z^{-1}.
    auto direction = [&](const Blocks& h) {
      Direction d;
      Blocks rhs_blocks(nblocks);
      for (std::size_t k = 0; k < nblocks; ++k) {
        rhs_blocks[k] = h[k] + x_rd_zinv[k];
      }
      const VectorXd g = rp - apply_op(model, rhs_blocks);
      system.solve(-g, rf, d.dy, d.dw);
      d.dz = apply_adjoint(model, d.dy);
      d.dx.resize(nblocks);
      for (std::size_t k = 0; k < nblocks; ++k) {
        d.dz[k] -= rd[k];
        symmetrize(d.dz[k]);
        d.dx[k] = h[k] - matmul(matmul(out.x[k], d.dz[k]), zinv[k]);
        symmetrize(d.dx[k]);
      }
      // The dual and complementarity equations hold by construction; only
      // the primal rows and B^T dy = rf carry solve error. Refine those
      // against the true operators.
      for (int pass = 0; pass < kRefinePasses; ++pass) {
        const VectorXd ep = rp - apply_op(model, d.dx) - model.free_matrix * d.dw;
        const VectorXd ef = rf - model.free_matrix.transpose() * d.dy;
        const double err = std::max(inf_norm(ep), inf_norm(ef));
        if (!(err > 1e-15 * (1.0 + b_norm + c_norm))) break;
        VectorXd ddy;
        VectorXd ddw;
        system.solve(-ep, ef, ddy, ddw);
        if (!ddy.allFinite()) break;
        const Blocks adj = apply_adjoint(model, ddy);
        d.dy += ddy;
        if (ddw.size() > 0) d.dw += ddw;
        for (std::size_t k = 0; k < nblocks; ++k) {
          d.dz[k] += adj[k];
          MatrixXd corr = matmul(matmul(out.x[k], adj[k]), zinv[k]);
          symmetrize(corr);
          d.dx[k] -= corr;
        }
      }
      return d;
    };
    auto step_lengths = [&](const Direction& d, double& ap, double& ad) {
      ap = 1.0;
      ad = 1.0;
      for (std::size_t k = 0; k < nblocks; ++k) {
        ap = std::min(ap, kStepFraction * max_step(out.x[k], d.dx[k]));
        ad = std::min(ad, kStepFraction * max_step(out.z[k], d.dz[k]));
      }
    };

    Blocks h(nblocks);
    for (std::size_t k = 0; k < nblocks; ++k) h[k] = -out.x[k];
    const Direction pred = direction(h);
    double ap = 0.0;
    double ad = 0.0;
    step_lengths(pred, ap, ad);

    double comp_aff = 0.0;
    for (std::size_t k = 0; k < nblocks; ++k) {
      comp_aff += frobenius_inner(out.x[k] + ap * pred.dx[k],
                                  out.z[k] + ad * pred.dz[k]);
    }
    const double ratio = comp > 0 ? std::max(0.0, comp_aff / comp) : 0.0;
    double sigma = std::min(1.0, ratio * ratio * ratio);
    // Do not let complementarity run ahead of feasibility; once it does the
    // iterates hug the boundary and the primal step collapses.
    const double infeas = std::max(pres / (1.0 + b_norm), dres / (1.0 + c_norm));
    if (comp / denom < infeas) sigma = std::max(sigma, 0.5);

    for (std::size_t k = 0; k < nblocks; ++k) {
      h[k] = sigma * mu * zinv[k] - out.x[k] -
             matmul(matmul(pred.dx[k], pred.dz[k]), zinv[k]);
    }
    const Direction corr = direction(h);
    step_lengths(corr, ap, ad);

    if (!std::isfinite(ap) || !std::isfinite(ad) || !corr.dy.allFinite()) {
      out.message = "non-finite search direction";
      return out;
    }
    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalled >= 5) {
        out.message = "step lengths collapsed";
        return out;
      }
    } else {
      stalled = 0;
    }

    // The eigenvalue step bound can be off by rounding; back off until the
    // new iterates factor.
    Blocks next_x(nblocks);
    Blocks next_z(nblocks);
    bool accepted = false;
    for (int backoff = 0; backoff < 30 && !accepted; ++backoff) {
      accepted = true;
      for (std::size_t k = 0; k < nblocks && accepted; ++k) {
        next_x[k] = out.x[k] + ap * corr.dx[k];
        next_z[k] = out.z[k] + ad * corr.dz[k];
        symmetrize(next_x[k]);
        symmetrize(next_z[k]);
        accepted = Eigen::LLT<MatrixXd>(next_x[k]).info() == Eigen::Success &&
                   Eigen::LLT<MatrixXd>(next_z[k]).info() == Eigen::Success;
      }
      if (!accepted) {
        ap *= 0.5;
        ad *= 0.5;
      }
    }
    if (!accepted) {
      out.message = "iterates left the cone";
      return out;
    }
    out.x = std::move(next_x);
    out.z = std::move(next_z);
    out.w += ap * corr.dw;
    out.y += ad * corr.dy;
  }
  out.status = SolveStatus::kMaxIterations;
  out.message = "iteration limit reached";
  return out;
}

struct Presolved {
  Model model;
  bool trivially_infeasible = false;
  std::string message;
};

Presolved presolve(const SdpProblem& problem) {
  Presolved out;
  Model& model = out.model;
  const std::size_t nblocks = problem.blocks.size();
  for (const auto& b : problem.blocks) {
    const auto n = static_cast<Eigen::Index>(b.dim);
    model.dims.push_back(b.dim);
    model.cmat.push_back(MatrixXd::Zero(n, n));
  }
  for (const auto& e : problem.block_objective) {
    const auto p = static_cast<Eigen::Index>(e.row);
    const auto q = static_cast<Eigen::Index>(e.col);
    model.cmat[e.block](p, q) += e.value;
    if (p != q) model.cmat[e.block](q, p) += e.value;
  }
  model.rows.resize(nblocks);

  for (std::size_t i = 0; i < problem.equalities.size(); ++i) {
    const Equality& eq = problem.equalities[i];
    bool empty = true;
    for (const auto& e : eq.block_entries) empty = empty && e.value == 0.0;
    for (const auto& f : eq.free_entries) empty = empty && f.value == 0.0;
    if (empty) {
      if (eq.rhs != 0.0) {
        out.trivially_infeasible = true;
        out.message = "equality '" + eq.label +
                      "' has no variables but a nonzero right-hand side";
      }
      continue;
    }
    model.kept_eq.push_back(i);
  }
  model.m = model.kept_eq.size();
  const auto m = static_cast<Eigen::Index>(model.m);
  const auto nf = static_cast<Eigen::Index>(problem.free_vars.size());

  MatrixXd full_free = MatrixXd::Zero(m, nf);
  model.b.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Equality& eq = problem.equalities[model.kept_eq[r]];
    model.b(r) = eq.rhs;
    for (const auto& f : eq.free_entries) {
      full_free(r, static_cast<Eigen::Index>(f.var)) += f.value;
    }
    // Merge duplicate block entries per block.
    std::vector<std::vector<Entry>> per_block(nblocks);
    for (const auto& e : eq.block_entries) {
      if (e.value == 0.0) continue;
      auto& list = per_block[e.block];
      auto it = std::find_if(list.begin(), list.end(), [&](const Entry& x) {
        return x.row == e.row && x.col == e.col;
      });
      if (it == list.end()) {
        list.push_back({e.row, e.col, e.value});
      } else {
        it->value += e.value;
      }
    }
    for (std::size_t k = 0; k < nblocks; ++k) {
      if (per_block[k].empty()) continue;
      model.rows[k].eq.push_back(static_cast<std::size_t>(r));
      model.rows[k].entries.push_back(std::move(per_block[k]));
    }
  }

  // Keep a linearly independent subset of free columns; dropped columns
  // stay at zero, which leaves the reachable set A(X) + B w unchanged.
  if (nf > 0 && m > 0) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(full_free);
    qr.setThreshold(1e-11);
    const auto rank = qr.rank();
    std::vector<std::size_t> kept;
    for (Eigen::Index i = 0; i < rank; ++i) {
      kept.push_back(static_cast<std::size_t>(qr.colsPermutation().indices()(i)));
    }
    std::sort(kept.begin(), kept.end());
    model.kept_free = kept;
  }
  model.free_matrix.resize(m, static_cast<Eigen::Index>(model.kept_free.size()));
  model.c.resize(static_cast<Eigen::Index>(model.kept_free.size()));
  for (std::size_t j = 0; j < model.kept_free.size(); ++j) {
    const auto src = static_cast<Eigen::Index>(model.kept_free[j]);
    model.free_matrix.col(static_cast<Eigen::Index>(j)) = full_free.col(src);
    model.c(static_cast<Eigen::Index>(j)) = problem.objective[model.kept_free[j]];
  }
  return out;
}

// True when some free direction w has B w = 0 and c.w > 0, i.e. the
// objective can grow without touching the PSD blocks.
bool has_free_ray(const SdpProblem& problem, const Model& model) {
  const auto nf = static_cast<Eigen::Index>(problem.free_vars.size());
  if (nf == 0) return false;
  const auto m = static_cast<Eigen::Index>(model.m);
  VectorXd c(nf);
  for (Eigen::Index j = 0; j < nf; ++j) c(j) = problem.objective[j];
  if (c.cwiseAbs().maxCoeff() == 0.0) return false;
  if (m == 0) return true;
  MatrixXd bt = MatrixXd::Zero(nf, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (const auto& f : problem.equalities[model.kept_eq[r]].free_entries) {
      bt(static_cast<Eigen::Index>(f.var), r) += f.value;
    }
  }
  const VectorXd y = bt.colPivHouseholderQr().solve(c);
  const double residual = inf_norm(bt * y - c);
  return residual > 1e-9 * (1.0 + inf_norm(c));
}

double block_objective_value(const SdpProblem& problem, const Blocks& x) {
  double out = 0.0;
  for (const auto& e : problem.block_objective) {
    const auto p = static_cast<Eigen::Index>(e.row);
    const auto q = static_cast<Eigen::Index>(e.col);
    out += e.value * (p == q ? x[e.block](p, p) : x[e.block](p, q) + x[e.block](q, p));
  }
  return out;
}

}  // namespace

Residuals compute_residuals(const SdpProblem& problem,
                            const SdpSolution& solution) {
  Residuals r;
  const std::size_t nblocks = problem.blocks.size();
  std::vector<MatrixXd> adjoint;
  for (const auto& b : problem.blocks) {
    const auto n = static_cast<Eigen::Index>(b.dim);
    adjoint.push_back(MatrixXd::Zero(n, n));
  }
  std::vector<double> free_dual(problem.free_vars.size(), 0.0);
  const bool have_primal = solution.block_values.size() == nblocks &&
                           solution.free_values.size() == problem.free_vars.size();
  const bool have_dual = solution.dual_values.size() == problem.equalities.size();

  double pobj = 0.0;
  if (have_primal) {
    for (std::size_t j = 0; j < problem.free_vars.size(); ++j) {
      pobj += problem.objective[j] * solution.free_values[j];
    }
    pobj += block_objective_value(problem, solution.block_values);
  }
  for (const auto& e : problem.block_objective) {
    const auto p = static_cast<Eigen::Index>(e.row);
    const auto q = static_cast<Eigen::Index>(e.col);
    adjoint[e.block](p, q) -= e.value;
    if (p != q) adjoint[e.block](q, p) -= e.value;
  }
  double dobj = 0.0;
  for (std::size_t i = 0; i < problem.equalities.size(); ++i) {
    const Equality& eq = problem.equalities[i];
    if (have_primal) {
      double lhs = 0.0;
      for (const auto& e : eq.block_entries) {
        const MatrixXd& x = solution.block_values[e.block];
        const auto p = static_cast<Eigen::Index>(e.row);
        const auto q = static_cast<Eigen::Index>(e.col);
        lhs += e.value * (p == q ? x(p, p) : x(p, q) + x(q, p));
      }
      for (const auto& f : eq.free_entries) {
        lhs += f.value * solution.free_values[f.var];
      }
      r.primal = std::max(r.primal, std::abs(eq.rhs - lhs));
    }
    if (have_dual) {
      const double yi = solution.dual_values[i];
      dobj += eq.rhs * yi;
      for (const auto& e : eq.block_entries) {
        const auto p = static_cast<Eigen::Index>(e.row);
        const auto q = static_cast<Eigen::Index>(e.col);
        adjoint[e.block](p, q) += yi * e.value;
        if (p != q) adjoint[e.block](q, p) += yi * e.value;
      }
      for (const auto& f : eq.free_entries) free_dual[f.var] += yi * f.value;
    }
  }
  if (have_dual && solution.dual_slacks.size() == nblocks) {
    for (std::size_t k = 0; k < nblocks; ++k) {
      const MatrixXd diff = solution.dual_slacks[k] - adjoint[k];
      if (diff.size() > 0) r.dual = std::max(r.dual, diff.cwiseAbs().maxCoeff());
    }
    for (std::size_t j = 0; j < free_dual.size(); ++j) {
      r.dual = std::max(r.dual, std::abs(problem.objective[j] - free_dual[j]));
    }
  }
  r.gap = dobj - pobj;
  r.relative_gap = std::abs(r.gap) / (1.0 + std::abs(pobj) + std::abs(dobj));
  return r;
}

SdpSolution reference_ipm(const SdpProblem& problem,
                          const SolverSettings& settings) {
  problem.validate();
  settings.validate();

  SdpSolution sol;
  Presolved pre = presolve(problem);
  if (pre.trivially_infeasible) {
    sol.status = SolveStatus::kInfeasible;
    sol.message = pre.message;
    return sol;
  }

  const bool free_ray = has_free_ray(problem, pre.model);
  if (free_ray) {
    // The dual is infeasible; settle primal feasibility with a zero
    // objective before declaring the problem unbounded.
    pre.model.c.setZero();
    for (auto& cm : pre.model.cmat) cm.setZero();
  }

  CoreResult core = run_core(pre.model, settings);

  if (free_ray) {
    if (core.status == SolveStatus::kOptimal ||
        core.status == SolveStatus::kUnbounded) {
      sol.status = SolveStatus::kUnbounded;
      sol.message = kUnboundedDiagnostic;
    } else {
      sol.status = core.status;
      sol.message = core.message;
    }
  } else {
    sol.status = core.status;
    sol.message = core.message;
  }
  sol.iterations = core.iterations;

  sol.block_values = core.x;
  sol.dual_slacks = core.z;
  sol.free_values.assign(problem.free_vars.size(), 0.0);
  for (std::size_t j = 0; j < pre.model.kept_free.size(); ++j) {
    sol.free_values[pre.model.kept_free[j]] =
        core.w(static_cast<Eigen::Index>(j));
  }
  sol.dual_values.assign(problem.equalities.size(), 0.0);
  for (std::size_t r = 0; r < pre.model.kept_eq.size(); ++r) {
    sol.dual_values[pre.model.kept_eq[r]] =
        core.y(static_cast<Eigen::Index>(r));
  }
  sol.objective = block_objective_value(problem, sol.block_values);
  for (std::size_t j = 0; j < problem.free_vars.size(); ++j) {
    sol.objective += problem.objective[j] * sol.free_values[j];
  }
  sol.dual_objective = 0.0;
  for (std::size_t i = 0; i < problem.equalities.size(); ++i) {
    sol.dual_objective += problem.equalities[i].rhs * sol.dual_values[i];
  }
  sol.residuals = compute_residuals(problem, sol);
  return sol;
}

SdpSolution ReferenceIpm::solve(const SdpProblem& problem,
                                const SolverSettings& settings) const {
  return reference_ipm(problem, settings);
}

SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings,
                  const SdpSolver* solver) {
  if (solver != nullptr) return solver->solve(problem, settings);
  return reference_ipm(problem, settings);
}

}  // namespace sdp
}  // namespace critsos
