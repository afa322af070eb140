#include "swiptsec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "swiptsec/io.hpp"

namespace swiptsec {

using nlohmann::json;

std::string to_string(SweepAxis a) {
  return a == SweepAxis::GammaReqDb ? "gamma_req_db" : "k_receivers";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "gamma_req_db") return SweepAxis::GammaReqDb;
  if (s == "k_receivers") return SweepAxis::KReceivers;
  throw std::invalid_argument("unknown sweep axis '" + s + "'");
}

bool TrialRecord::solved() const {
  return status == SolutionStatus::Optimal || status == SolutionStatus::RankDeficient;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (sweeps.empty()) throw std::invalid_argument("at least one sweep is required");
  if (schemes.empty()) throw std::invalid_argument("at least one scheme is required");
  if (threads < 0) throw std::invalid_argument("threads must be >= 0");
  channel.validate();
  for (const SweepSpec& s : sweeps) {
    if (s.grid.empty()) throw std::invalid_argument("sweep grid must be nonempty");
    for (double v : s.grid) {
      if (!std::isfinite(v)) throw std::invalid_argument("sweep grid values must be finite");
      if (s.axis == SweepAxis::KReceivers && (v < 1.0 || v != std::floor(v)))
        throw std::invalid_argument("k_receivers grid values must be positive integers");
      params_at(s.axis, v).validate();
    }
  }
}

SystemParams ExperimentConfig::params_at(SweepAxis axis, double value) const {
  if (axis == SweepAxis::GammaReqDb) {
    SystemParams p = params;
    p.gamma_req = db_to_linear(value);
    return p;
  }
  return params.with_receivers(static_cast<int>(value));
}

ExperimentConfig experiment_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c;
  try {
    if (j.contains("params")) c.params = params_from_json(j["params"].dump());
    if (j.contains("channel_config")) c.channel = channel_config_from_json(j["channel_config"].dump());
    if (j.contains("sweeps")) {
      c.sweeps.clear();
      for (const json& s : j["sweeps"])
        c.sweeps.push_back({sweep_axis_from_string(s.at("axis").get<std::string>()),
                            s.at("grid").get<std::vector<double>>()});
    }
    c.trials = j.value("trials", c.trials);
    c.base_seed = j.value("base_seed", c.base_seed);
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const json& s : j["schemes"]) c.schemes.push_back(scheme_from_string(s.get<std::string>()));
    }
    c.threads = j.value("threads", c.threads);
    c.solver.solver_tol = j.value("solver_tol", c.solver.solver_tol);
    c.solver.rank_tol = j.value("rank_tol", c.solver.rank_tol);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config field: ") + e.what());
  }
  c.validate();
  return c;
}

std::string experiment_to_json(const ExperimentConfig& c) {
  json sweeps = json::array();
  for (const SweepSpec& s : c.sweeps) sweeps.push_back({{"axis", to_string(s.axis)}, {"grid", s.grid}});
  json schemes = json::array();
  for (SchemeKind k : c.schemes) schemes.push_back(to_string(k));
  json j = {{"params", json::parse(params_to_json(c.params))},
            {"channel_config", json::parse(channel_config_to_json(c.channel))},
            {"sweeps", sweeps},
            {"trials", c.trials},
            {"base_seed", c.base_seed},
            {"schemes", schemes},
            {"threads", c.threads},
            {"solver_tol", c.solver.solver_tol},
            {"rank_tol", c.solver.rank_tol}};
  return j.dump(2);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Timed {
  std::optional<SchemeResult> result;
  std::string error;
  double ms = 0.0;
};

template <class F>
Timed timed(F f) {
  Timed t;
  const auto t0 = Clock::now();
  try {
    t.result = f();
  } catch (const std::exception& e) {
    t.error = e.what();
  }
  t.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return t;
}

bool secrecy_tight(const SystemParams& p, const ChannelRealization& chan, const BeamformingSolution& s) {
  if (p.eavesdroppers() == 0) return false;
  const FeasibilityReport rep = check_feasibility(p, chan, s);
  int strongest = 1;
  double best = -1.0;
  for (int k = 1; k <= p.eavesdroppers(); ++k) {
    const double v = eavesdropper_sinr_bound(p, chan, k, s);
    if (v > best) {
      best = v;
      strongest = k;
    }
  }
  const std::string c2 = "C2[" + std::to_string(strongest) + "]";
  bool c1_tight = false, c2_tight = false;
  for (const auto& sl : rep.slacks) {
    if (sl.name == "C1") c1_tight = sl.slack <= 1e-6;
    if (sl.name == c2) c2_tight = sl.slack <= 1e-6;
  }
  return c1_tight && c2_tight;
}

TrialRecord make_record(const SystemParams& p, const ChannelRealization& chan, const Timed& t,
                        const std::optional<SchemeResult>& relaxed, const SchemeOptions& opts) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  TrialRecord r;
  r.seed = chan.seed;
  r.solve_ms = t.ms;
  r.tx_power_dbm = r.total_harvested_dbm = r.secrecy_capacity_bps_hz = nan;
  r.tx_power_w = r.harvested_w = nan;
  if (!t.result) {
    r.status = SolutionStatus::NumericalFailure;
    r.detail = t.error;
    return r;
  }
  const SchemeResult& res = *t.result;
  const BeamformingSolution& s = res.solution;
  r.status = s.status;
  r.provenance = res.provenance;
  r.detail = s.detail;
  r.rank_ratio = s.rank_ratio;
  if (relaxed && relaxed->certificate)
    r.prop1_condition =
        check_proposition1(chan, *relaxed->certificate, relaxed->solution.rank_ratio, opts.rank_tol).condition_holds;
  if (!r.solved()) return r;
  r.rho = s.rho;
  r.rank_one = s.status == SolutionStatus::Optimal;
  r.tx_power_w = s.objective;
  r.tx_power_dbm = watt_to_dbm(s.objective);
  r.secrecy_capacity_bps_hz = secrecy_capacity(p, chan, s);
  r.harvested_w = total_harvested_power(p, chan, s);
  r.total_harvested_dbm = watt_to_dbm(r.harvested_w);
  r.secrecy_tight = secrecy_tight(p, chan, s);
  return r;
}

}  // namespace

std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, SweepAxis axis, double value, int trial) {
  const SystemParams p = cfg.params_at(axis, value);
  const std::uint64_t seed = cfg.base_seed ^ static_cast<std::uint64_t>(trial);
  const ChannelRealization chan = draw_channel(p, cfg.channel, seed);
  const SchemeOptions& opts = cfg.solver;

  const bool want_relaxed = std::find_if(cfg.schemes.begin(), cfg.schemes.end(), [](SchemeKind k) {
                              return k == SchemeKind::Relaxed || k == SchemeKind::Scheme2;
                            }) != cfg.schemes.end();
  const bool want_sub1 = std::find_if(cfg.schemes.begin(), cfg.schemes.end(), [](SchemeKind k) {
                           return k == SchemeKind::Sub1 || k == SchemeKind::Scheme2;
                         }) != cfg.schemes.end();
  Timed relaxed, sub1;
  if (want_relaxed) relaxed = timed([&] { return solve_relaxed(p, chan, opts); });
  if (want_sub1) sub1 = timed([&] { return solve_sub1(p, chan, opts); });

  std::vector<TrialRecord> out;
  for (SchemeKind k : cfg.schemes) {
    Timed t;
    switch (k) {
      case SchemeKind::Relaxed: t = relaxed; break;
      case SchemeKind::Sub1: t = sub1; break;
      case SchemeKind::Scheme2:
        t.ms = relaxed.ms + sub1.ms;
        if (relaxed.result && sub1.result) {
          try {
            t.result = select_scheme2(*relaxed.result, *sub1.result);
          } catch (const std::exception& e) {
            t.error = e.what();
          }
        } else if (relaxed.result && relaxed.result->solution.status == SolutionStatus::Optimal) {
          t.result = relaxed.result;
          t.result->provenance = Provenance::GlobalOptimal;
        } else {
          t.error = relaxed.error.empty() ? sub1.error : relaxed.error;
        }
        break;
      case SchemeKind::Baseline1: t = timed([&] { return solve_baseline(p, chan, 1, opts); }); break;
      case SchemeKind::Baseline2: t = timed([&] { return solve_baseline(p, chan, 2, opts); }); break;
    }
    TrialRecord r = make_record(p, chan, t, relaxed.result, opts);
    if (k != SchemeKind::Relaxed && k != SchemeKind::Scheme2) r.prop1_condition = -1;
    r.axis = axis;
    r.axis_value = value;
    r.trial = trial;
    r.scheme = k;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
  // (axis, value, scheme, trial) -> record
  std::map<std::tuple<int, double, int, int>, const TrialRecord*> index;
  for (const TrialRecord& r : records)
    index[{static_cast<int>(r.axis), r.axis_value, static_cast<int>(r.scheme), r.trial}] = &r;
  auto find = [&](SweepAxis a, double v, SchemeKind k, int t) -> const TrialRecord* {
    auto it = index.find({static_cast<int>(a), v, static_cast<int>(k), t});
    return it == index.end() ? nullptr : it->second;
  };

  std::vector<AggregateRow> out;
  for (const SweepSpec& sw : cfg.sweeps) {
    std::vector<int> common;
    for (int t = 0; t < cfg.trials; ++t) {
      bool all = true;
      for (double v : sw.grid)
        for (SchemeKind k : cfg.schemes) {
          const TrialRecord* r = find(sw.axis, v, k, t);
          all = all && r && r->solved();
        }
      if (all) common.push_back(t);
    }
    for (double v : sw.grid) {
      for (SchemeKind k : cfg.schemes) {
        AggregateRow row;
        row.axis = sw.axis;
        row.axis_value = v;
        row.scheme = k;
        std::vector<double> tx, sec, hv, r1;
        for (int t = 0; t < cfg.trials; ++t) {
          const TrialRecord* r = find(sw.axis, v, k, t);
          if (!r) continue;
          ++row.trials;
          if (!r->solved()) continue;
          tx.push_back(r->tx_power_w);
          sec.push_back(r->secrecy_capacity_bps_hz);
          hv.push_back(r->harvested_w);
          r1.push_back(r->rank_one ? 1.0 : 0.0);
        }
        row.solved = static_cast<int>(tx.size());
        row.feasibility_rate = row.trials ? static_cast<double>(row.solved) / row.trials : 0.0;
        row.empty = row.solved == 0;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        auto mean = [&](const std::vector<double>& x) {
          return x.empty() ? nan : pairwise_sum(x.data(), x.size()) / static_cast<double>(x.size());
        };
        row.mean_tx_power_w = mean(tx);
        row.mean_secrecy_bps_hz = mean(sec);
        row.mean_harvested_w = mean(hv);
        row.rank_one_rate = mean(r1);
        std::vector<double> ctx, csec, chv;
        for (int t : common) {
          const TrialRecord* r = find(sw.axis, v, k, t);
          ctx.push_back(r->tx_power_w);
          csec.push_back(r->secrecy_capacity_bps_hz);
          chv.push_back(r->harvested_w);
        }
        row.common = static_cast<int>(common.size());
        row.common_tx_power_w = mean(ctx);
        row.common_secrecy_bps_hz = mean(csec);
        row.common_harvested_w = mean(chv);
        out.push_back(row);
      }
    }
  }
  return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Task {
    SweepAxis axis;
    double value;
    int trial;
  };
  std::vector<Task> tasks;
  for (const SweepSpec& sw : cfg.sweeps)
    for (double v : sw.grid)
      for (int t = 0; t < cfg.trials; ++t) tasks.push_back({sw.axis, v, t});

  std::vector<std::vector<TrialRecord>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        slots[i] = run_trial(cfg, tasks[i].axis, tasks[i].value, tasks[i].trial);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned n = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  n = std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  SweepResult res;
  for (auto& s : slots)
    for (auto& r : s) res.records.push_back(std::move(r));
  res.aggregates = aggregate(cfg, res.records);
  return res;
}

}  // namespace swiptsec
