#include "swiptsec/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace swiptsec {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument("SystemParams: " + what);
}

bool finite_nonzero(const CVector& v) {
  return v.allFinite() && v.squaredNorm() > 0.0;
}

double min_eigenvalue(const CMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

void SystemParams::validate() const {
  require(n_t >= 2, "n_t must be >= 2");
  // K = 1 (no idle receivers) is admitted as a degenerate configuration.
  require(k_receivers >= 1, "k_receivers must be >= 1");
  const auto e = static_cast<std::size_t>(eavesdroppers());
  require(gamma_tol.size() == e, "gamma_tol must have K-1 entries");
  require(p_min_k.size() == e, "p_min_k must have K-1 entries");
  require(sigma_s2 >= 0.0 && sigma_ant2 >= 0.0, "noise powers must be >= 0");
  require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  require(gamma_req > 0.0, "gamma_req must be > 0");
  require(epsilon >= 1.0, "epsilon must be >= 1");
  require(p_min >= 0.0 && p_max >= 0.0 && p_pg >= 0.0 && p_c >= 0.0, "powers must be >= 0");
  require(p_pg > p_c, "p_pg must exceed p_c");
  for (std::size_t k = 0; k < e; ++k) {
    require(gamma_tol[k] >= 0.0, "gamma_tol entries must be >= 0");
    require(p_min_k[k] >= 0.0, "p_min_k entries must be >= 0");
    require(gamma_req > gamma_tol[k], "gamma_req must exceed every gamma_tol");
  }
}

SystemParams SystemParams::defaults(int n_t, int k_receivers, double gamma_req_db) {
  SystemParams p;
  p.n_t = n_t;
  p.k_receivers = k_receivers;
  p.sigma_s2 = dbm_to_watt(-23.0) + dbm_to_watt(-111.0);
  p.sigma_ant2 = dbm_to_watt(-114.0);
  p.eta = 0.5;
  p.gamma_req = db_to_linear(gamma_req_db);
  p.gamma_tol.assign(static_cast<std::size_t>(k_receivers - 1), db_to_linear(-10.0));
  p.p_min = dbm_to_watt(0.0);
  p.p_min_k.assign(static_cast<std::size_t>(k_receivers - 1), dbm_to_watt(0.0));
  p.p_c = dbm_to_watt(30.0);
  p.p_pg = dbm_to_watt(40.0);
  p.epsilon = 1.0 / 0.38;
  p.p_max = (p.p_pg - p.p_c) / p.epsilon;
  return p;
}

SystemParams SystemParams::with_receivers(int k) const {
  SystemParams p = *this;
  p.k_receivers = k;
  const double tol = gamma_tol.empty() ? db_to_linear(-10.0) : gamma_tol.front();
  const double pk = p_min_k.empty() ? p_min : p_min_k.front();
  p.gamma_tol.assign(static_cast<std::size_t>(std::max(k - 1, 0)), tol);
  p.p_min_k.assign(static_cast<std::size_t>(std::max(k - 1, 0)), pk);
  return p;
}

void ChannelRealization::validate(const SystemParams& params) const {
  if (h.size() != params.n_t || !finite_nonzero(h))
    throw std::invalid_argument("ChannelRealization: h must be finite, nonzero, length n_t");
  if (static_cast<int>(g.size()) != params.eavesdroppers())
    throw std::invalid_argument("ChannelRealization: expected K-1 idle-receiver channels");
  for (const auto& gk : g) {
    if (gk.size() != params.n_t || !finite_nonzero(gk))
      throw std::invalid_argument("ChannelRealization: g_k must be finite, nonzero, length n_t");
  }
}

std::string to_string(SolutionStatus s) {
  switch (s) {
    case SolutionStatus::Optimal: return "Optimal";
    case SolutionStatus::RankDeficient: return "RankDeficient";
    case SolutionStatus::Infeasible: return "Infeasible";
    case SolutionStatus::NumericalFailure: return "NumericalFailure";
  }
  return "NumericalFailure";
}

SolutionStatus solution_status_from_string(const std::string& s) {
  if (s == "Optimal") return SolutionStatus::Optimal;
  if (s == "RankDeficient") return SolutionStatus::RankDeficient;
  if (s == "Infeasible") return SolutionStatus::Infeasible;
  if (s == "NumericalFailure") return SolutionStatus::NumericalFailure;
  throw std::invalid_argument("unknown solution status '" + s + "'");
}

double quad_form(const CVector& c, const CMatrix& M) {
  return (c.adjoint() * M * c)(0).real();
}

namespace {

const CVector& idle_channel(const ChannelRealization& chan, int k) {
  if (k < 1 || k > static_cast<int>(chan.g.size()))
    throw std::out_of_range("idle receiver index out of range");
  return chan.g[static_cast<std::size_t>(k - 1)];
}

}  // namespace

Metric desired_sinr(const SystemParams& params, const ChannelRealization& chan,
                    const BeamformingSolution& sol) {
  const double rho = sol.rho;
  if (rho <= 0.0) return {0.0, true};
  const double signal = quad_form(chan.h, sol.W);
  const double an = quad_form(chan.h, sol.V);
  const double denom = rho * (params.sigma_ant2 + an) + params.sigma_s2;
  if (denom <= 0.0) return {signal > 0.0 ? std::numeric_limits<double>::infinity() : 0.0, true};
  return {std::max(0.0, rho * signal / denom), false};
}

double eavesdropper_sinr_bound(const SystemParams& params, const ChannelRealization& chan, int k,
                               const BeamformingSolution& sol) {
  const CVector& g = idle_channel(chan, k);
  const double signal = quad_form(g, sol.W);
  const double denom = params.sigma_ant2 + quad_form(g, sol.V) + params.sigma_s2;
  return std::max(0.0, signal / denom);
}

double eavesdropper_sinr(const SystemParams& params, const ChannelRealization& chan, int k,
                         const BeamformingSolution& sol, double rho_k) {
  const CVector& g = idle_channel(chan, k);
  if (rho_k <= 0.0) return 0.0;
  const double signal = quad_form(g, sol.W);
  const double denom = rho_k * (params.sigma_ant2 + quad_form(g, sol.V)) + params.sigma_s2;
  return std::max(0.0, rho_k * signal / denom);
}

double secrecy_capacity(const SystemParams& params, const ChannelRealization& chan,
                        const BeamformingSolution& sol) {
  const double c_desired = std::log2(1.0 + desired_sinr(params, chan, sol).value);
  double c_eve = 0.0;
  for (int k = 1; k <= params.eavesdroppers(); ++k)
    c_eve = std::max(c_eve, std::log2(1.0 + eavesdropper_sinr_bound(params, chan, k, sol)));
  return std::max(0.0, c_desired - c_eve);
}

Metric harvested_power_desired(const SystemParams& params, const ChannelRealization& chan,
                               const BeamformingSolution& sol) {
  const double share = 1.0 - sol.rho;
  if (share <= 0.0) return {0.0, true};
  const double received = quad_form(chan.h, sol.W) + quad_form(chan.h, sol.V) + params.sigma_ant2;
  return {share * params.eta * received, false};
}

double harvested_power_idle(const SystemParams& params, const ChannelRealization& chan, int k,
                            const BeamformingSolution& sol) {
  const CVector& g = idle_channel(chan, k);
  return params.eta * (quad_form(g, sol.W) + quad_form(g, sol.V) + params.sigma_ant2);
}

double total_harvested_power(const SystemParams& params, const ChannelRealization& chan,
                             const BeamformingSolution& sol) {
  double total = harvested_power_desired(params, chan, sol).value;
  for (int k = 1; k <= params.eavesdroppers(); ++k)
    total += harvested_power_idle(params, chan, k, sol);
  return total;
}

FeasibilityReport check_feasibility(const SystemParams& params, const ChannelRealization& chan,
                                    const BeamformingSolution& sol, double tol) {
  FeasibilityReport rep;
  const double trw = sol.W.trace().real();
  const double trv = sol.V.trace().real();
  const double ptot = trw + trv;
  const double noise = params.sigma_s2 + params.sigma_ant2;
  const double tiny = std::numeric_limits<double>::min();
  auto add = [&](std::string name, double s) { rep.slacks.push_back({std::move(name), s}); };

  const double rho = sol.rho;
  {
    const double scale = chan.h.squaredNorm() * ptot + noise;
    const double hw = quad_form(chan.h, sol.W);
    const double hv = quad_form(chan.h, sol.V);
    // C1 multiplied through by its (positive) denominator.
    const double c1 = rho * hw - params.gamma_req * (rho * (params.sigma_ant2 + hv) + params.sigma_s2);
    add("C1", c1 / std::max(scale, tiny));
    const double c3 = (1.0 - rho) * params.eta * (hw + hv + params.sigma_ant2) - params.p_min;
    add("C3", c3 / std::max(params.eta * scale, tiny));
  }
  for (int k = 1; k <= params.eavesdroppers(); ++k) {
    const CVector& g = chan.g[static_cast<std::size_t>(k - 1)];
    const double scale = g.squaredNorm() * ptot + noise;
    const double gw = quad_form(g, sol.W);
    const double gv = quad_form(g, sol.V);
    const auto idx = static_cast<std::size_t>(k - 1);
    const double c2 = params.gamma_tol[idx] * (params.sigma_ant2 + gv + params.sigma_s2) - gw;
    add("C2[" + std::to_string(k) + "]", c2 / std::max(scale, tiny));
    const double c4 = params.eta * (gw + gv + params.sigma_ant2) - params.p_min_k[idx];
    add("C4[" + std::to_string(k) + "]", c4 / std::max(params.eta * scale, tiny));
  }
  add("C5", (params.p_max - ptot) / std::max({params.p_max, ptot, tiny}));
  add("C6", (params.p_pg - params.p_c - params.epsilon * ptot) / params.p_pg);
  add("C7", std::min(rho, 1.0 - rho));
  const double psd = std::min(min_eigenvalue(sol.W), min_eigenvalue(sol.V));
  add("C8", psd / std::max(ptot, tiny));

  rep.worst = std::numeric_limits<double>::infinity();
  for (const auto& s : rep.slacks) {
    if (s.slack < rep.worst) {
      rep.worst = s.slack;
      rep.worst_name = s.name;
    }
  }
  rep.feasible = rep.worst >= -tol;
  return rep;
}

}  // namespace swiptsec
