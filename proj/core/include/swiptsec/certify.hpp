#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swiptsec/model.hpp"
#include "swiptsec/problems.hpp"
#include "swiptsec/sdp.hpp"

namespace swiptsec {

struct KktResiduals {
  double stationarity_W = 0.0;    // ||Y - Y(multipliers)||_F / max(1, ||Y||_F)
  double stationarity_V = 0.0;    // same for Z
  double stationarity_rho = 0.0;  // |dL/drho| / (Tr W + Tr V)
  double complementarity = 0.0;   // Tr(Y W) + Tr(Z V) in watt
  double complementarity_scaled = 0.0;
  double slackness = 0.0;         // sum_i |m_i g_i| / (Tr W + Tr V)
  double dual_feasibility = 0.0;  // worst normalized negative part of a multiplier or eigenvalue
  double duality_gap = 0.0;       // |primal - dual| / |primal|

  double worst() const;
};

/// Lagrange multipliers of the relaxed problem in physical units, plus the
/// dual matrices of the W and V cones.
///
/// lambda, beta, mu, delta, psi, theta multiply C1, C2[k], C3, C4[k] (or
/// C10[k]), C5, C6, each constraint written as g(W, V, rho) >= 0 in its
/// natural form, e.g. C6 as P_PG - P_C - eps (Tr W + Tr V). Y and Z are
/// dimensionless.
struct DualCertificate {
  double lambda = 0.0;
  std::vector<double> beta;
  double mu = 0.0;
  std::vector<double> delta;
  double theta = 0.0;
  double psi = 0.0;
  double nu_lo = 0.0;  // rho >= 0
  double nu_hi = 0.0;  // rho <= 1
  CMatrix Y;
  CMatrix Z;  // for baselines: dual of the null-space coordinates

  EncodingKind kind = EncodingKind::Relaxed;
  std::optional<double> fixed_rho;
  double primal_objective = 0.0;  // watt
  double dual_objective = 0.0;    // watt
  bool ill_posed = false;         // nonzero dual on a row outside the named map
  std::string note;
  KktResiduals residuals;
};

/// Physical value g_i >= 0 of every named constraint at (W, V, rho), keyed
/// like the encoding rows (C7 as C7.lo / C7.hi).
std::vector<ConstraintSlack> constraint_values(const SystemParams& params,
                                               const ChannelRealization& chan,
                                               const CMatrix& W, const CMatrix& V, double rho,
                                               bool c10 = false);

DualCertificate recover_duals(const ProblemEncoding& enc, const sdp::SdpSolution& sol);

/// Y implied by the multipliers:
/// I (1 + psi + eps theta) + sum_k (beta_k - delta_k) g_k g_k^H - (lambda + mu) h h^H
/// (delta dropped for the C10 form).
CMatrix stationarity_Y(const SystemParams& params, const ChannelRealization& chan,
                       const DualCertificate& cert);

/// Z implied by the multipliers:
/// I (1 + psi + eps theta) - sum_k (beta_k Gamma_tol,k + delta_k) g_k g_k^H
/// + (lambda Gamma_req - mu) h h^H.
CMatrix stationarity_Z(const SystemParams& params, const ChannelRealization& chan,
                       const DualCertificate& cert);

/// Lagrange dual function at the certificate's multipliers (watt); the
/// split-ratio part is minimized numerically over (0, 1).
double dual_objective(const SystemParams& params, const DualCertificate& cert);

KktResiduals kkt_residuals(const SystemParams& params, const ChannelRealization& chan,
                           const CMatrix& W, const CMatrix& V, double rho,
                           const DualCertificate& cert);

struct Proposition1Report {
  bool condition_holds = false;  // beta_k >= delta_k for all k
  bool rank_one = false;
  bool consistent = true;        // condition implies rank one
};

/// The comparison is made on beta_k ||g_k||^2 and delta_k ||g_k||^2 so that
/// the tolerance is dimensionless.
Proposition1Report check_proposition1(const ChannelRealization& chan, const DualCertificate& cert,
                                      double rank_ratio, double rank_tol = 1e-6,
                                      double tol = 1e-8);

/// sqrt(lambda sigma_s^2 Gamma) / (sqrt(lambda sigma_s^2 Gamma) + sqrt(mu P_min / eta)).
/// Empty when both terms vanish.
std::optional<double> rho_star_formula(double lambda, double mu, const SystemParams& params);

struct RankBoundReport {
  double a_min_eig = 0.0;    // smallest eigenvalue of I(1+psi+eps theta) + sum (beta-delta) g g^H
  bool a_full_rank = false;
  int y_rank = 0;
  bool y_rank_ok = false;    // N_t - 1 (or N_t when W = 0)
};

RankBoundReport rank_bound_check(const SystemParams& params, const ChannelRealization& chan,
                                 const DualCertificate& cert, bool w_nonzero,
                                 double rel_threshold = 1e-6);

/// Numerical rank count: eigenvalues above rel_threshold * lambda_max.
int numerical_rank(const CMatrix& m, double rel_threshold = 1e-6);

}  // namespace swiptsec
