#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swiptsec/channel.hpp"
#include "swiptsec/model.hpp"
#include "swiptsec/schemes.hpp"

namespace swiptsec {

enum class SweepAxis { GammaReqDb, KReceivers };

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepSpec {
  SweepAxis axis = SweepAxis::GammaReqDb;
  std::vector<double> grid;
};

/// Monte Carlo experiment. The default reproduces the simulation section:
/// Gamma_req in {0, 3, 6, 9, 12} dB at K = 4, and K in {2, 4, 6, 8} at
/// Gamma_req = 9 dB, all five schemes.
struct ExperimentConfig {
  SystemParams params = SystemParams::defaults();
  ChannelConfig channel;
  std::vector<SweepSpec> sweeps = {{SweepAxis::GammaReqDb, {0, 3, 6, 9, 12}},
                                   {SweepAxis::KReceivers, {2, 4, 6, 8}}};
  int trials = 100;
  std::uint64_t base_seed = 1;
  std::vector<SchemeKind> schemes = {SchemeKind::Relaxed, SchemeKind::Sub1, SchemeKind::Scheme2,
                                     SchemeKind::Baseline1, SchemeKind::Baseline2};
  int threads = 0;  // 0 = hardware concurrency
  SchemeOptions solver;

  void validate() const;
  /// Parameters at one grid point of a sweep.
  SystemParams params_at(SweepAxis axis, double value) const;
};

/// Keys: "params", "channel_config", "sweeps": [{"axis", "grid"}], "trials",
/// "base_seed", "schemes", "threads", "solver_tol", "rank_tol". Missing keys
/// keep their defaults.
ExperimentConfig experiment_from_json(const std::string& text);
std::string experiment_to_json(const ExperimentConfig& cfg);

struct TrialRecord {
  SweepAxis axis = SweepAxis::GammaReqDb;
  double axis_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  SchemeKind scheme = SchemeKind::Relaxed;
  SolutionStatus status = SolutionStatus::NumericalFailure;
  Provenance provenance = Provenance::NotApplicable;
  double tx_power_w = 0.0;
  double tx_power_dbm = 0.0;
  double secrecy_capacity_bps_hz = 0.0;
  double harvested_w = 0.0;  // desired + all idle receivers
  double total_harvested_dbm = 0.0;
  double rho = 0.0;
  bool rank_one = false;
  double rank_ratio = 1.0;
  int prop1_condition = -1;  // -1 when no relaxed certificate
  bool secrecy_tight = false;  // C1 and the strongest eavesdropper's C2 both active
  double solve_ms = 0.0;
  std::string detail;

  /// Optimal or RankDeficient: a solution was produced and is reported.
  bool solved() const;
};

struct AggregateRow {
  SweepAxis axis = SweepAxis::GammaReqDb;
  double axis_value = 0.0;
  SchemeKind scheme = SchemeKind::Relaxed;
  int trials = 0;
  int solved = 0;
  double feasibility_rate = 0.0;
  bool empty = true;  // no solved trial
  double mean_tx_power_w = 0.0;
  double mean_secrecy_bps_hz = 0.0;
  double mean_harvested_w = 0.0;
  double rank_one_rate = 0.0;
  // Averages over the trials solved by every scheme at every point of the sweep.
  int common = 0;
  double common_tx_power_w = 0.0;
  double common_secrecy_bps_hz = 0.0;
  double common_harvested_w = 0.0;
};

struct SweepResult {
  std::vector<TrialRecord> records;
  std::vector<AggregateRow> aggregates;
};

/// Seed of trial t: base_seed XOR t. Results do not depend on the thread count.
SweepResult run_sweep(const ExperimentConfig& cfg);

/// One trial of one sweep point, all configured schemes.
std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, SweepAxis axis, double value, int trial);

std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records);

/// Sum in a fixed tree order, so totals do not depend on how the terms were produced.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace swiptsec
