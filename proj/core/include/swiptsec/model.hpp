#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swiptsec/types.hpp"

namespace swiptsec {

/// Scalar constants of the downlink resource-allocation problem. Powers are
/// in watt, SINRs linear. Index k of the per-eavesdropper vectors runs over
/// the K-1 idle receivers.
struct SystemParams {
  int n_t = 6;
  int k_receivers = 4;
  double sigma_s2 = 0.0;    // signal-processing noise
  double sigma_ant2 = 0.0;  // antenna noise
  double eta = 0.5;
  double gamma_req = 1.0;
  std::vector<double> gamma_tol;
  double p_min = 0.0;
  std::vector<double> p_min_k;
  double p_max = 0.0;
  double p_pg = 0.0;
  double p_c = 0.0;
  double epsilon = 1.0;

  int eavesdroppers() const { return k_receivers - 1; }

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  /// Simulation defaults: N_t=6, K=4, eta=0.5, Gamma_tol=-10 dB,
  /// epsilon=1/0.38, P_C=30 dBm, P_PG=40 dBm, P_min=P_min_k=0 dBm,
  /// sigma_ant^2=-114 dBm, sigma_s^2=-23 dBm (+) -111 dBm, Gamma_req=9 dB.
  /// P_max defaults to the grid-implied cap (P_PG-P_C)/epsilon.
  static SystemParams defaults(int n_t = 6, int k_receivers = 4,
                               double gamma_req_db = 9.0);

  /// Resize the per-eavesdropper vectors to K-1 entries, filling with the
  /// first entry (or the given fallbacks when empty).
  SystemParams with_receivers(int k) const;
};

struct ChannelRealization {
  CVector h;
  std::vector<CVector> g;
  std::uint64_t seed = 0;

  void validate(const SystemParams& params) const;
};

enum class SolutionStatus { Optimal, RankDeficient, Infeasible, NumericalFailure };

std::string to_string(SolutionStatus s);
SolutionStatus solution_status_from_string(const std::string& s);

struct BeamformingSolution {
  CMatrix W;
  CMatrix V;
  double rho = 1.0;
  std::optional<CVector> w_extracted;
  double objective = 0.0;
  SolutionStatus status = SolutionStatus::NumericalFailure;
  double rank_ratio = 1.0;
  std::string detail;  // solver diagnostics on failure
};

/// A formula value plus a flag set when an endpoint of rho made it a
/// limiting value rather than an interior evaluation.
struct Metric {
  double value = 0.0;
  bool degenerate = false;
  operator double() const { return value; }
};

// Receiver-side quantities. Tr(c c^H M) is evaluated as the real quadratic
// form c^H M c.
double quad_form(const CVector& c, const CMatrix& M);

Metric desired_sinr(const SystemParams& params, const ChannelRealization& chan,
                    const BeamformingSolution& sol);

/// Worst case over the eavesdropper's own split ratio: the receiver routes
/// everything to decoding. `k` is 1-based.
double eavesdropper_sinr_bound(const SystemParams& params, const ChannelRealization& chan,
                               int k, const BeamformingSolution& sol);

/// SINR at idle receiver k when it decodes with split ratio rho_k.
double eavesdropper_sinr(const SystemParams& params, const ChannelRealization& chan, int k,
                         const BeamformingSolution& sol, double rho_k);

/// [log2(1+Gamma) - max_k log2(1+Gamma_k^UP)]^+ in bit/s/Hz.
double secrecy_capacity(const SystemParams& params, const ChannelRealization& chan,
                        const BeamformingSolution& sol);

Metric harvested_power_desired(const SystemParams& params, const ChannelRealization& chan,
                               const BeamformingSolution& sol);

double harvested_power_idle(const SystemParams& params, const ChannelRealization& chan, int k,
                            const BeamformingSolution& sol);

/// Desired-receiver harvest plus all idle-receiver harvests.
double total_harvested_power(const SystemParams& params, const ChannelRealization& chan,
                             const BeamformingSolution& sol);

struct ConstraintSlack {
  std::string name;  // "C1", "C2[k]", ...
  double slack;      // >= 0 satisfied, normalized (dimensionless)
};

struct FeasibilityReport {
  bool feasible = false;
  std::vector<ConstraintSlack> slacks;
  double worst = 0.0;
  std::string worst_name;
};

/// Signed slacks of C1..C8 at (W, V, rho).
///
/// Receiver constraints are normalized by that receiver's noise plus the
/// power it would collect if all radiated power were steered at it,
/// ||c||^2 (Tr W + Tr V) + sigma_s^2 + sigma_ant^2. Power-budget rows are
/// relative to their budget; C7 is min(rho, 1-rho); C8 is the smallest
/// eigenvalue of W and V relative to the total power.
FeasibilityReport check_feasibility(const SystemParams& params, const ChannelRealization& chan,
                                    const BeamformingSolution& sol, double tol = 1e-7);

}  // namespace swiptsec
