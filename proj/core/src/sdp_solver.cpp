// Homogeneous self-dual interior-point method for block SDPs.
//
// The embedding solved is
//
//   A X - b tau           = 0
//   A^T y + S - C tau     = 0
//   b^T y - <C,X> - kappa = 0,   X, S in K,  tau, kappa >= 0,
//
// started from (I, 0, I, 1, 1). Every block keeps a Nesterov-Todd scaling
// X = R L R^T, S = R^-T L R^-1 with L diagonal, and the linearized
// complementarity is posed in that scaled space, where the symmetrized
// Lyapunov operator with diagonal L has an explicit inverse.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "swiptsec/sdp.hpp"

namespace swiptsec::sdp {

namespace {

using Blocks = std::vector<RMatrix>;

struct Scaling {
  RMatrix R;
  RMatrix Rinv;
  RMatrix W;  // R R^T
  RVector lambda;
};

struct Direction {
  Blocks dX;
  Blocks dS;
  RVector dy;
  double dtau = 0.0;
  double dkappa = 0.0;
};

double block_inner(const Blocks& a, const Blocks& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += inner(a[j], b[j]);
  return acc;
}

double block_norm(const Blocks& a) { return std::sqrt(block_inner(a, a)); }

// Average with the complex-structure conjugate J M J^T, J = [[0, -I], [I, 0]].
// The constraints never see the odd part, so rounding there is otherwise
// never corrected.
void project_embedded(RMatrix& m) {
  const auto n = m.rows() / 2;
  const RMatrix p = 0.5 * (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n));
  const RMatrix q = 0.5 * (m.bottomLeftCorner(n, n) - m.topRightCorner(n, n));
  m.topLeftCorner(n, n) = p;
  m.bottomRightCorner(n, n) = p;
  m.bottomLeftCorner(n, n) = q;
  m.topRightCorner(n, n) = -q;
}

bool diagonal_scaling(const RMatrix& X, const RMatrix& S, Scaling& out) {
  const RVector x = X.diagonal();
  const RVector s = S.diagonal();
  if ((x.array() <= 0.0).any() || (s.array() <= 0.0).any()) return false;
  const RVector r = (x.array() / s.array()).sqrt().sqrt();
  out.R = r.asDiagonal();
  out.Rinv = r.cwiseInverse().asDiagonal();
  out.W = r.cwiseProduct(r).asDiagonal();
  out.lambda = (x.array() * s.array()).sqrt();
  return true;
}

bool cholesky_lower(const RMatrix& A, double reg, RMatrix& L) {
  Eigen::LLT<RMatrix> llt(A);
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
    if (L.diagonal().minCoeff() > 0.0) return true;
  }
  const double shift = reg * std::max(1.0, A.trace() / static_cast<double>(A.rows()));
  Eigen::LLT<RMatrix> retry(A + shift * RMatrix::Identity(A.rows(), A.cols()));
  if (retry.info() != Eigen::Success) return false;
  L = retry.matrixL();
  return L.diagonal().minCoeff() > 0.0;
}

bool psd_scaling(const RMatrix& X, const RMatrix& S, double reg, Scaling& out) {
  RMatrix L1;
  RMatrix L2;
  if (!cholesky_lower(X, reg, L1) || !cholesky_lower(S, reg, L2)) return false;
  const RMatrix M = L2.transpose() * L1;
  Eigen::JacobiSVD<RMatrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector sv = svd.singularValues();
  if (!(sv.minCoeff() > 0.0)) return false;
  const RVector inv_sqrt = sv.cwiseSqrt().cwiseInverse();
  out.R = L1 * svd.matrixV() * inv_sqrt.asDiagonal();
  out.Rinv = inv_sqrt.asDiagonal() * svd.matrixU().transpose() * L2.transpose();
  out.W = out.R * out.R.transpose();
  out.lambda = sv;
  return out.R.allFinite() && out.Rinv.allFinite();
}

/// Largest alpha with L + alpha * D in the cone (infinity when unbounded).
double max_step(BlockKind kind, const RVector& lambda, const RMatrix& d) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (kind == BlockKind::Diagonal) {
    double a = inf;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
      if (d(i, i) < 0.0) a = std::min(a, -lambda(i) / d(i, i));
    return a;
  }
  const RVector is = lambda.cwiseSqrt().cwiseInverse();
  RMatrix g = is.asDiagonal() * d * is.asDiagonal();
  g = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(g, Eigen::EigenvaluesOnly);
  const double e = es.eigenvalues()(0);
  return e < 0.0 ? -1.0 / e : inf;
}

/// Dense SPD solve with a regularized Cholesky and two rounds of iterative
/// refinement against the unregularized matrix.
class SchurSolver {
 public:
  bool factor(const RMatrix& M, double reg) {
    M_ = M;
    llt_.compute(M);
    if (llt_.info() == Eigen::Success && llt_.matrixLLT().diagonal().minCoeff() > 0.0) return true;
    const double shift = reg * std::max(1.0, M.diagonal().maxCoeff());
    for (double s = shift; s < 1e-2 * std::max(1.0, M.diagonal().maxCoeff()); s *= 100.0) {
      llt_.compute(M + s * RMatrix::Identity(M.rows(), M.cols()));
      if (llt_.info() == Eigen::Success) return true;
    }
    return false;
  }

  RVector solve(const RVector& r) const {
    RVector x = llt_.solve(r);
    for (int k = 0; k < 2; ++k) x += llt_.solve(r - M_ * x);
    return x;
  }

 private:
  RMatrix M_;
  Eigen::LLT<RMatrix> llt_;
};

class Hsde {
 public:
  Hsde(const SdpProblem& p, const SolverOptions& o) : p_(p), opt_(o) {
    nblocks_ = p.num_blocks();
    m_ = p.num_constraints();
    nu_ = static_cast<double>(p.barrier_degree());
    b_ = p.rhs();
    for (int j = 0; j < nblocks_; ++j) C_.push_back(p.objective(j));
    by_block_.resize(static_cast<std::size_t>(nblocks_));
    for (int i = 0; i < m_; ++i)
      for (const Term& t : p.constraints()[static_cast<std::size_t>(i)].terms)
        by_block_[static_cast<std::size_t>(t.block)].push_back({i, &t.coeff});
  }

  SdpSolution run();

 private:
  struct Entry {
    int row;
    const RMatrix* coeff;
  };

  RVector A(const Blocks& X) const { return apply_constraints(p_, X); }
  Blocks At(const RVector& y) const { return apply_adjoint(p_, y); }

  Blocks congruence_W(const Blocks& M) const {
    Blocks out(M.size());
    for (std::size_t j = 0; j < M.size(); ++j) out[j] = scal_[j].W * M[j] * scal_[j].W;
    return out;
  }

  bool build_schur();
  Direction newton(const Blocks& target, double t_scalar, double eta) const;
  Blocks scaled_primal(const Blocks& dX) const;
  Blocks scaled_dual(const Blocks& dS) const;
  double step_length(const Direction& d) const;
  void take_step(const Direction& d, double alpha);

  const SdpProblem& p_;
  SolverOptions opt_;
  int nblocks_ = 0;
  int m_ = 0;
  double nu_ = 0.0;
  RVector b_;
  Blocks C_;
  std::vector<std::vector<Entry>> by_block_;

  // iterate
  Blocks X_, S_;
  RVector y_;
  double tau_ = 1.0;
  double kappa_ = 1.0;

  // per-iteration quantities
  RVector rp_;
  Blocks rd_;
  double rg_ = 0.0;
  std::vector<Scaling> scal_;
  SchurSolver schur_;
  RVector q_;
  Blocks X1_;
  double den_ = 0.0;
};

bool Hsde::build_schur() {
  RMatrix M = RMatrix::Zero(m_, m_);
  for (int j = 0; j < nblocks_; ++j) {
    const auto& entries = by_block_[static_cast<std::size_t>(j)];
    const RMatrix& W = scal_[static_cast<std::size_t>(j)].W;
    const bool diag = p_.block(j).kind == BlockKind::Diagonal;
    std::vector<RMatrix> G;
    G.reserve(entries.size());
    for (const Entry& e : entries) {
      if (diag) {
        const RVector w = W.diagonal();
        G.push_back((w.cwiseProduct(e.coeff->diagonal()).cwiseProduct(w)).asDiagonal());
      } else {
        G.push_back(W * (*e.coeff) * W);
      }
    }
    for (std::size_t a = 0; a < entries.size(); ++a) {
      for (std::size_t c = a; c < entries.size(); ++c) {
        const double v = diag ? entries[a].coeff->diagonal().dot(G[c].diagonal())
                              : inner(*entries[a].coeff, G[c]);
        M(entries[a].row, entries[c].row) += v;
        if (c != a) M(entries[c].row, entries[a].row) += v;
      }
    }
  }
  return schur_.factor(M, opt_.regularization);
}

Blocks Hsde::scaled_primal(const Blocks& dX) const {
  Blocks out(dX.size());
  for (std::size_t j = 0; j < dX.size(); ++j)
    out[j] = scal_[j].Rinv * dX[j] * scal_[j].Rinv.transpose();
  return out;
}

Blocks Hsde::scaled_dual(const Blocks& dS) const {
  Blocks out(dS.size());
  for (std::size_t j = 0; j < dS.size(); ++j)
    out[j] = scal_[j].R.transpose() * dS[j] * scal_[j].R;
  return out;
}

Direction Hsde::newton(const Blocks& target, double t_scalar, double eta) const {
  Blocks Z0(static_cast<std::size_t>(nblocks_));
  for (std::size_t j = 0; j < Z0.size(); ++j) {
    const Scaling& sc = scal_[j];
    const RVector& l = sc.lambda;
    RMatrix D(l.size(), l.size());
    for (Eigen::Index a = 0; a < l.size(); ++a)
      for (Eigen::Index c = 0; c < l.size(); ++c) D(a, c) = 2.0 * target[j](a, c) / (l(a) + l(c));
    Z0[j] = sc.R * D * sc.R.transpose() - eta * (sc.W * rd_[j] * sc.W);
  }
  const RVector r1 = eta * rp_ - A(Z0);
  const RVector pvec = schur_.solve(r1);
  const Blocks WAtpW = congruence_W(At(pvec));
  Blocks X0(Z0.size());
  for (std::size_t j = 0; j < X0.size(); ++j) X0[j] = Z0[j] + WAtpW[j];

  Direction d;
  d.dtau = (eta * rg_ + block_inner(C_, X0) - b_.dot(pvec) + t_scalar / tau_) / den_;
  d.dy = pvec + q_ * d.dtau;
  d.dX.resize(X0.size());
  const Blocks Atdy = At(d.dy);
  d.dS.resize(X0.size());
  for (std::size_t j = 0; j < X0.size(); ++j) {
    RMatrix dx = X0[j] + X1_[j] * d.dtau;
    d.dX[j] = 0.5 * (dx + dx.transpose());
    d.dS[j] = eta * rd_[j] + C_[j] * d.dtau - Atdy[j];
  }
  d.dkappa = (t_scalar - kappa_ * d.dtau) / tau_;
  return d;
}

void Hsde::take_step(const Direction& d, double alpha) {
  for (int j = 0; j < nblocks_; ++j) {
    const auto js = static_cast<std::size_t>(j);
    X_[js] += alpha * d.dX[js];
    S_[js] += alpha * d.dS[js];
    X_[js] = 0.5 * (X_[js] + X_[js].transpose()).eval();
    S_[js] = 0.5 * (S_[js] + S_[js].transpose()).eval();
    if (p_.block(j).kind == BlockKind::HermitianEmbedded) {
      project_embedded(X_[js]);
      project_embedded(S_[js]);
    }
  }
  y_ += alpha * d.dy;
  tau_ += alpha * d.dtau;
  kappa_ += alpha * d.dkappa;
}

double Hsde::step_length(const Direction& d) const {
  double a = std::numeric_limits<double>::infinity();
  const Blocks dx = scaled_primal(d.dX);
  const Blocks ds = scaled_dual(d.dS);
  for (int j = 0; j < nblocks_; ++j) {
    const auto js = static_cast<std::size_t>(j);
    a = std::min(a, max_step(p_.block(j).kind, scal_[js].lambda, dx[js]));
    a = std::min(a, max_step(p_.block(j).kind, scal_[js].lambda, ds[js]));
  }
  if (d.dtau < 0.0) a = std::min(a, -tau_ / d.dtau);
  if (d.dkappa < 0.0) a = std::min(a, -kappa_ / d.dkappa);
  return a;
}

SdpSolution Hsde::run() {
  SdpSolution sol;
  for (const BlockSpec& b : p_.blocks()) {
    X_.push_back(RMatrix::Identity(b.dim, b.dim));
    S_.push_back(RMatrix::Identity(b.dim, b.dim));
  }
  y_ = RVector::Zero(m_);
  tau_ = 1.0;
  kappa_ = 1.0;
  scal_.resize(static_cast<std::size_t>(nblocks_));

  const double norm_b = b_.norm();
  const double norm_c = block_norm(C_);

  auto finish = [&](SdpStatus status, std::string msg) {
    sol.status = status;
    sol.message = std::move(msg);
    const double inv_tau = 1.0 / tau_;
    sol.X.clear();
    sol.S.clear();
    if (status == SdpStatus::PrimalInfeasible) {
      const double by = b_.dot(y_);
      for (int j = 0; j < nblocks_; ++j) {
        const auto js = static_cast<std::size_t>(j);
        sol.X.push_back(RMatrix::Zero(X_[js].rows(), X_[js].cols()));
        sol.S.push_back(S_[js] / by);
      }
      sol.y = y_ / by;
    } else if (status == SdpStatus::DualInfeasible) {
      const double cx = block_inner(C_, X_);
      for (int j = 0; j < nblocks_; ++j) {
        const auto js = static_cast<std::size_t>(j);
        sol.X.push_back(X_[js] / -cx);
        sol.S.push_back(RMatrix::Zero(S_[js].rows(), S_[js].cols()));
      }
      sol.y = RVector::Zero(m_);
    } else {
      for (int j = 0; j < nblocks_; ++j) {
        const auto js = static_cast<std::size_t>(j);
        sol.X.push_back(X_[js] * inv_tau);
        sol.S.push_back(S_[js] * inv_tau);
      }
      sol.y = y_ * inv_tau;
    }
    return sol;
  };

  // Once converged, pure centering steps until X^{1/2} S X^{1/2} is close to
  // mu I in every block. The stopping test only bounds Tr(X S); an
  // off-centre block can still carry dual errors of order sqrt(mu), and
  // centering removes them without touching the residuals.
  int centering_left = 10;
  for (int iter = 0;; ++iter) {
    const RVector AX = A(X_);
    const Blocks Aty = At(y_);
    rp_ = b_ * tau_ - AX;
    rd_.assign(static_cast<std::size_t>(nblocks_), RMatrix());
    Blocks aty_s(static_cast<std::size_t>(nblocks_));
    for (int j = 0; j < nblocks_; ++j) {
      const auto js = static_cast<std::size_t>(j);
      rd_[js] = C_[js] * tau_ - Aty[js] - S_[js];
      aty_s[js] = Aty[js] + S_[js];
    }
    const double cx = block_inner(C_, X_);
    const double by = b_.dot(y_);
    rg_ = kappa_ + cx - by;
    const double mu = (block_inner(X_, S_) + tau_ * kappa_) / (nu_ + 1.0);

    if (!std::isfinite(mu) || !std::isfinite(cx) || !std::isfinite(by))
      return finish(SdpStatus::NumericalFailure, "non-finite iterate");

    sol.iterations = iter;
    sol.primal_objective = cx / tau_;
    sol.dual_objective = by / tau_;
    sol.residuals.primal = rp_.norm() / tau_ / (1.0 + norm_b);
    sol.residuals.dual = block_norm(rd_) / tau_ / (1.0 + norm_c);
    sol.residuals.gap =
        std::abs(sol.primal_objective - sol.dual_objective) / (1.0 + std::abs(sol.primal_objective));

    if (opt_.record_history) {
      IterationLog log;
      log.iter = iter;
      log.primal_objective = sol.primal_objective;
      log.dual_objective = sol.dual_objective;
      log.residuals = sol.residuals;
      log.mu = mu;
      log.tau = tau_;
      log.kappa = kappa_;
      sol.history.push_back(log);
    }

    const bool converged =
        sol.residuals.primal <= opt_.tol && sol.residuals.dual <= opt_.tol && sol.residuals.gap <= opt_.tol;
    if (converged && centering_left-- <= 0) return finish(SdpStatus::Optimal, "converged");

    if (tau_ < kappa_) {
      if (by > 0.0 && block_norm(aty_s) / by <= opt_.tol)
        return finish(SdpStatus::PrimalInfeasible, "Farkas certificate for the primal found");
      if (cx < 0.0 && AX.norm() / -cx <= opt_.tol)
        return finish(SdpStatus::DualInfeasible, "improving primal ray found");
    }
    if (mu < 1e-20 && tau_ < 1e-10 && kappa_ < 1e-10)
      return finish(SdpStatus::IllPosed, "tau and kappa vanished together");
    if (iter >= opt_.max_iter) return finish(SdpStatus::IterLimit, "iteration limit reached");

    for (int j = 0; j < nblocks_; ++j) {
      const auto js = static_cast<std::size_t>(j);
      const bool ok = p_.block(j).kind == BlockKind::Diagonal
                          ? diagonal_scaling(X_[js], S_[js], scal_[js])
                          : psd_scaling(X_[js], S_[js], opt_.regularization, scal_[js]);
      if (!ok) return finish(SdpStatus::NumericalFailure, "iterate left the cone");
    }
    if (!build_schur()) return finish(SdpStatus::NumericalFailure, "Schur complement factorization failed");

    const Blocks WCW = congruence_W(C_);
    q_ = schur_.solve(b_ + A(WCW));
    const Blocks WAtqW = congruence_W(At(q_));
    X1_.resize(static_cast<std::size_t>(nblocks_));
    for (std::size_t j = 0; j < X1_.size(); ++j) X1_[j] = WAtqW[j] - WCW[j];
    den_ = -block_inner(C_, X1_) + b_.dot(q_) + kappa_ / tau_;
    if (!(std::abs(den_) > 0.0) || !std::isfinite(den_))
      return finish(SdpStatus::NumericalFailure, "degenerate homogeneous pivot");

    Blocks target(static_cast<std::size_t>(nblocks_));
    if (converged) {
      double dev = std::abs(tau_ * kappa_ / mu - 1.0);
      for (const Scaling& sc : scal_)
        dev = std::max(dev, (sc.lambda.cwiseProduct(sc.lambda).array() / mu - 1.0).abs().maxCoeff());
      if (dev <= 1e-3) return finish(SdpStatus::Optimal, "converged");
      for (std::size_t j = 0; j < target.size(); ++j) {
        target[j] = RMatrix((-scal_[j].lambda.cwiseProduct(scal_[j].lambda)).asDiagonal());
        target[j].diagonal().array() += mu;
      }
      const Direction dir = newton(target, mu - tau_ * kappa_, 0.0);
      const double alpha = std::min(1.0, opt_.step_fraction * step_length(dir));
      if (!(alpha > 0.0) || !std::isfinite(alpha)) return finish(SdpStatus::Optimal, "converged");
      take_step(dir, alpha);
      continue;
    }

    // Predictor.
    for (std::size_t j = 0; j < target.size(); ++j)
      target[j] = RMatrix((-scal_[j].lambda.cwiseProduct(scal_[j].lambda)).asDiagonal());
    const Direction aff = newton(target, -tau_ * kappa_, 1.0);
    const double alpha_aff = std::min(1.0, step_length(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), 0.0, 1.0);

    // Corrector with the second-order term of the affine direction.
    const Blocks dxa = scaled_primal(aff.dX);
    const Blocks dsa = scaled_dual(aff.dS);
    for (int j = 0; j < nblocks_; ++j) {
      const auto js = static_cast<std::size_t>(j);
      const RVector& l = scal_[js].lambda;
      RMatrix t = RMatrix((-l.cwiseProduct(l)).asDiagonal());
      t.diagonal().array() += sigma * mu;
      if (p_.block(j).kind == BlockKind::Diagonal) {
        t.diagonal() -= dxa[js].diagonal().cwiseProduct(dsa[js].diagonal());
      } else {
        const RMatrix prod = dxa[js] * dsa[js];
        t -= 0.5 * (prod + prod.transpose());
      }
      target[js] = t;
    }
    const Direction dir =
        newton(target, sigma * mu - tau_ * kappa_ - aff.dtau * aff.dkappa, 1.0 - sigma);
    const double alpha = std::min(1.0, opt_.step_fraction * step_length(dir));
    if (!(alpha > 1e-12) || !std::isfinite(alpha))
      return finish(SdpStatus::NumericalFailure, "step length collapsed");

    take_step(dir, alpha);
    if (opt_.record_history) {
      sol.history.back().step = alpha;
      sol.history.back().sigma = sigma;
    }
  }
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  if (problem.num_blocks() == 0) throw std::invalid_argument("solve: problem has no blocks");
  Hsde engine(problem, options);
  return engine.run();
}

}  // namespace swiptsec::sdp
