#include "swiptsec/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace swiptsec {

namespace {

double min_eig(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

double trace_re(const CMatrix& m) { return m.trace().real(); }

double rho_part(const SystemParams& p, double lambda, double mu, double nu, double rho) {
  double f = nu * rho;
  if (lambda > 0.0) f += lambda * p.gamma_req * p.sigma_s2 / rho;
  if (mu > 0.0 && p.p_min > 0.0) f += mu * p.p_min / (p.eta * (1.0 - rho));
  return f;
}

// Golden-section minimization of a convex function on [lo, hi].
template <class F>
double golden_min(F f, double lo, double hi, int iters = 200) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return std::min({fc, fd, f(lo), f(hi)});
}

bool is_c10(EncodingKind k) { return k == EncodingKind::Sub1; }

}  // namespace

double KktResiduals::worst() const {
  return std::max({stationarity_W, stationarity_V, stationarity_rho, complementarity_scaled,
                   slackness, dual_feasibility, duality_gap});
}

std::vector<ConstraintSlack> constraint_values(const SystemParams& p, const ChannelRealization& chan,
                                               const CMatrix& W, const CMatrix& V, double rho,
                                               bool c10) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<ConstraintSlack> out;
  const double hw = quad_form(chan.h, W), hv = quad_form(chan.h, V);
  out.push_back({"C1", rho > 0.0 ? hw - p.gamma_req * (hv + p.sigma_ant2) -
                                       p.gamma_req * p.sigma_s2 / rho
                                 : -inf});
  for (int k = 0; k < p.eavesdroppers(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const double gw = quad_form(chan.g[ks], W), gv = quad_form(chan.g[ks], V);
    out.push_back({"C2[" + std::to_string(k + 1) + "]",
                   p.gamma_tol[ks] * (gv + p.sigma_ant2 + p.sigma_s2) - gw});
  }
  if (p.p_min > 0.0)
    out.push_back({"C3", rho < 1.0 ? hw + hv + p.sigma_ant2 - p.p_min / (p.eta * (1.0 - rho)) : -inf});
  for (int k = 0; k < p.eavesdroppers(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    if (!(p.p_min_k[ks] > 0.0)) continue;
    const double gw = quad_form(chan.g[ks], W), gv = quad_form(chan.g[ks], V);
    const std::string idx = "[" + std::to_string(k + 1) + "]";
    if (c10)
      out.push_back({"C10" + idx, gv + p.sigma_ant2 - p.p_min_k[ks] / p.eta});
    else
      out.push_back({"C4" + idx, gw + gv + p.sigma_ant2 - p.p_min_k[ks] / p.eta});
  }
  const double tot = trace_re(W) + trace_re(V);
  out.push_back({"C5", p.p_max - tot});
  out.push_back({"C6", p.p_pg - p.p_c - p.epsilon * tot});
  out.push_back({"C7.lo", rho});
  out.push_back({"C7.hi", 1.0 - rho});
  return out;
}

DualCertificate recover_duals(const ProblemEncoding& enc, const sdp::SdpSolution& sol) {
  DualCertificate c;
  c.kind = enc.kind;
  c.fixed_rho = enc.fixed_rho;
  const int e = static_cast<int>(enc.channel_scale.size()) - 1;
  c.beta.assign(static_cast<std::size_t>(e), 0.0);
  c.delta.assign(static_cast<std::size_t>(e), 0.0);

  std::vector<bool> mapped(static_cast<std::size_t>(enc.sdp.num_constraints()), false);
  for (const NamedRow& r : enc.rows) {
    const double m = r.multiplier_scale * sol.y(r.row);
    mapped[static_cast<std::size_t>(r.row)] = true;
    const auto bracket = r.name.find('[');
    const std::string base = r.name.substr(0, bracket);
    const std::size_t k =
        bracket == std::string::npos ? 0 : static_cast<std::size_t>(std::stoi(r.name.substr(bracket + 1)) - 1);
    if (base == "C1") c.lambda = m;
    else if (base == "C2") c.beta[k] = m;
    else if (base == "C3") c.mu = m;
    else if (base == "C4" || base == "C10") c.delta[k] = m;
    else if (base == "C5") c.psi = m;
    else if (base == "C6") c.theta = m;
    else if (base == "C7.lo") c.nu_lo = m;
    else if (base == "C7.hi") c.nu_hi = m;
  }
  const double ynorm = sol.y.size() ? sol.y.cwiseAbs().maxCoeff() : 0.0;
  for (int i = 0; i < enc.sdp.num_constraints(); ++i) {
    const auto is = static_cast<std::size_t>(i);
    if (mapped[is] || enc.sdp.constraints()[is].label.rfind("link:", 0) == 0) continue;
    if (std::abs(sol.y(i)) > 1e-8 * (1.0 + ynorm)) {
      c.ill_posed = true;
      c.note = "nonzero dual on unmapped row " + enc.sdp.constraints()[is].label;
    }
  }
  c.Y = sdp::extract_complex(2.0 * sol.S.at(static_cast<std::size_t>(enc.w_block)));
  c.Z = sdp::extract_complex(2.0 * sol.S.at(static_cast<std::size_t>(enc.v_block)));
  c.primal_objective = enc.power_scale * sol.primal_objective;
  c.dual_objective = enc.power_scale * sol.dual_objective;
  return c;
}

CMatrix stationarity_Y(const SystemParams& p, const ChannelRealization& chan, const DualCertificate& c) {
  const int n = p.n_t;
  CMatrix y = CMatrix::Identity(n, n) * (1.0 + c.psi + p.epsilon * c.theta);
  for (std::size_t k = 0; k < chan.g.size(); ++k) {
    const double w = c.beta[k] - (is_c10(c.kind) ? 0.0 : c.delta[k]);
    y += w * chan.g[k] * chan.g[k].adjoint();
  }
  y -= (c.lambda + c.mu) * chan.h * chan.h.adjoint();
  return y;
}

CMatrix stationarity_Z(const SystemParams& p, const ChannelRealization& chan, const DualCertificate& c) {
  const int n = p.n_t;
  CMatrix z = CMatrix::Identity(n, n) * (1.0 + c.psi + p.epsilon * c.theta);
  for (std::size_t k = 0; k < chan.g.size(); ++k)
    z -= (c.beta[k] * p.gamma_tol[k] + c.delta[k]) * chan.g[k] * chan.g[k].adjoint();
  z += (c.lambda * p.gamma_req - c.mu) * chan.h * chan.h.adjoint();
  return z;
}

double dual_objective(const SystemParams& p, const DualCertificate& c) {
  double v = c.lambda * p.gamma_req * p.sigma_ant2;
  if (p.p_min > 0.0) v -= c.mu * p.sigma_ant2;
  for (std::size_t k = 0; k < c.beta.size(); ++k) {
    v -= c.beta[k] * p.gamma_tol[k] * (p.sigma_ant2 + p.sigma_s2);
    if (p.p_min_k[k] > 0.0) v += c.delta[k] * (p.p_min_k[k] / p.eta - p.sigma_ant2);
  }
  v -= c.psi * p.p_max;
  v -= c.theta * (p.p_pg - p.p_c);
  if (c.fixed_rho) {
    v += rho_part(p, c.lambda, c.mu, 0.0, *c.fixed_rho);
  } else {
    v -= c.nu_hi;
    const double lam = std::max(c.lambda, 0.0), mu = std::max(c.mu, 0.0);
    const double nu = c.nu_hi - c.nu_lo;
    v += golden_min([&](double r) { return rho_part(p, lam, mu, nu, r); }, 1e-15, 1.0 - 1e-15);
  }
  return v;
}

KktResiduals kkt_residuals(const SystemParams& p, const ChannelRealization& chan, const CMatrix& W,
                           const CMatrix& V, double rho, const DualCertificate& c) {
  KktResiduals r;
  const bool baseline = c.kind == EncodingKind::Baseline1 || c.kind == EncodingKind::Baseline2;
  const CMatrix yf = stationarity_Y(p, chan, c);
  CMatrix zf = stationarity_Z(p, chan, c);
  CMatrix v_eff = V;
  if (baseline) {
    const CMatrix nb = null_space_basis(chan.h);
    zf = nb.adjoint() * zf * nb;
    v_eff = nb.adjoint() * V * nb;
  }
  const CMatrix& yc = c.Y.size() ? c.Y : yf;
  const CMatrix& zc = c.Z.size() ? c.Z : zf;
  r.stationarity_W = (yc - yf).norm() / std::max(1.0, yf.norm());
  r.stationarity_V = (zc - zf).norm() / std::max(1.0, zf.norm());

  const double tot = trace_re(W) + trace_re(V);
  const double tiny = std::numeric_limits<double>::min();
  r.complementarity = (yc * W).trace().real() + (zc * v_eff).trace().real();
  r.complementarity_scaled = std::abs(r.complementarity) /
                             (std::max({1.0, max_eig(yc), max_eig(zc)}) * std::max(tot, tiny));

  const auto values = constraint_values(p, chan, W, V, rho, is_c10(c.kind));
  double slack_sum = 0.0;
  for (const auto& cv : values) {
    const auto bracket = cv.name.find('[');
    const std::string base = cv.name.substr(0, bracket);
    const std::size_t k =
        bracket == std::string::npos ? 0 : static_cast<std::size_t>(std::stoi(cv.name.substr(bracket + 1)) - 1);
    double m = 0.0;
    if (base == "C1") m = c.lambda;
    else if (base == "C2") m = c.beta[k];
    else if (base == "C3") m = c.mu;
    else if (base == "C4" || base == "C10") m = c.delta[k];
    else if (base == "C5") m = c.psi;
    else if (base == "C6") m = c.theta;
    else if (base == "C7.lo") m = c.nu_lo;
    else if (base == "C7.hi") m = c.nu_hi;
    if (m != 0.0 && std::isfinite(cv.slack)) slack_sum += std::abs(m * cv.slack);
  }
  r.slackness = slack_sum / std::max(tot, tiny);

  if (!c.fixed_rho) {
    const double a = c.lambda * p.gamma_req * p.sigma_s2 / (rho * rho);
    const double b = p.p_min > 0.0 ? c.mu * p.p_min / (p.eta * (1.0 - rho) * (1.0 - rho)) : 0.0;
    const double d = -a + b + c.nu_hi - c.nu_lo;
    r.stationarity_rho = std::abs(d) / std::max(tot, tiny);
  }

  double neg = 0.0;
  neg = std::max(neg, -c.lambda * chan.h.squaredNorm());
  neg = std::max(neg, -c.mu * chan.h.squaredNorm());
  for (std::size_t k = 0; k < c.beta.size(); ++k) {
    neg = std::max(neg, -c.beta[k] * chan.g[k].squaredNorm());
    neg = std::max(neg, -c.delta[k] * chan.g[k].squaredNorm());
  }
  neg = std::max(neg, -c.psi);
  neg = std::max(neg, -c.theta * p.epsilon);
  neg = std::max(neg, -c.nu_lo / std::max(tot, tiny));
  neg = std::max(neg, -c.nu_hi / std::max(tot, tiny));
  neg = std::max(neg, -min_eig(yf) / std::max(1.0, max_eig(yf)));
  neg = std::max(neg, -min_eig(zf) / std::max(1.0, max_eig(zf)));
  r.dual_feasibility = neg;

  r.duality_gap = std::abs(tot - dual_objective(p, c)) / std::max(tot, tiny);
  return r;
}

Proposition1Report check_proposition1(const ChannelRealization& chan, const DualCertificate& c,
                                      double rank_ratio, double rank_tol, double tol) {
  Proposition1Report r;
  r.condition_holds = true;
  for (std::size_t k = 0; k < c.beta.size(); ++k) {
    const double g2 = chan.g[k].squaredNorm();
    if (c.beta[k] * g2 < c.delta[k] * g2 - tol) r.condition_holds = false;
  }
  r.rank_one = rank_ratio <= rank_tol;
  r.consistent = !r.condition_holds || r.rank_one;
  return r;
}

std::optional<double> rho_star_formula(double lambda, double mu, const SystemParams& p) {
  const double a = std::sqrt(std::max(lambda, 0.0) * p.sigma_s2 * p.gamma_req);
  const double b = std::sqrt(std::max(mu, 0.0) * p.p_min / p.eta);
  if (!(a + b > 0.0)) return std::nullopt;
  return a / (a + b);
}

int numerical_rank(const CMatrix& m, double rel_threshold) {
  if (m.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  if (!(top > 0.0)) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > rel_threshold * top) ++r;
  return r;
}

RankBoundReport rank_bound_check(const SystemParams& p, const ChannelRealization& chan,
                                 const DualCertificate& c, bool w_nonzero, double rel_threshold) {
  RankBoundReport r;
  const int n = p.n_t;
  CMatrix a = CMatrix::Identity(n, n) * (1.0 + c.psi + p.epsilon * c.theta);
  for (std::size_t k = 0; k < chan.g.size(); ++k) {
    const double w = c.beta[k] - (is_c10(c.kind) ? 0.0 : c.delta[k]);
    a += w * chan.g[k] * chan.g[k].adjoint();
  }
  r.a_min_eig = min_eig(a);
  r.a_full_rank = r.a_min_eig > rel_threshold * std::max(1.0, max_eig(a));
  const CMatrix y = c.Y.size() ? c.Y : stationarity_Y(p, chan, c);
  r.y_rank = numerical_rank(y, rel_threshold);
  r.y_rank_ok = r.y_rank >= n - 1 && (!w_nonzero || r.y_rank == n - 1);
  return r;
}

}  // namespace swiptsec
