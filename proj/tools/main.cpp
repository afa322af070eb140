#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swiptsec/certify.hpp"
#include "swiptsec/channel.hpp"
#include "swiptsec/csv.hpp"
#include "swiptsec/harness.hpp"
#include "swiptsec/io.hpp"
#include "swiptsec/model.hpp"
#include "swiptsec/oracle.hpp"
#include "swiptsec/schemes.hpp"
#include "swiptsec/types.hpp"

namespace fs = std::filesystem;
using namespace swiptsec;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kNumerical = 3 };

// Thrown for bad flag values and malformed config files.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::optional<double> tol;
  std::string scheme;
};

std::string dbm_text(double w) {
  if (!(w > 0.0)) return "-inf dBm";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f dBm", watt_to_dbm(w));
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int exit_for(SolutionStatus s) {
  switch (s) {
    case SolutionStatus::Optimal:
    case SolutionStatus::RankDeficient: return kOk;
    case SolutionStatus::Infeasible: return kInfeasible;
    default: return kNumerical;
  }
}

std::string load(const std::string& path) {
  try {
    return read_text_file(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

template <class F>
auto parse(const std::string& what, F f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw UsageError(what + ": " + e.what());
  }
}

SchemeKind scheme_flag(const std::string& s, SchemeKind fallback) {
  if (s.empty()) return fallback;
  return parse("--scheme", [&] { return scheme_from_string(s); });
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

void print_solution(std::ostream& os, const SystemParams& p, const ChannelRealization& chan,
                    SchemeKind kind, const BeamformingSolution& s, Provenance prov) {
  os << "scheme      " << to_string(kind) << '\n';
  os << "status      " << to_string(s.status) << '\n';
  if (kind == SchemeKind::Scheme2) os << "provenance  " << to_string(prov) << '\n';
  if (s.status != SolutionStatus::Optimal && s.status != SolutionStatus::RankDeficient) {
    if (!s.detail.empty()) os << "detail      " << s.detail << '\n';
    return;
  }
  const double tot = s.W.trace().real() + s.V.trace().real();
  os << "tx power    " << dbm_text(tot) << "  (Tr W " << sci(s.W.trace().real()) << " W, Tr V "
     << sci(s.V.trace().real()) << " W)\n";
  os << "rho         " << s.rho << '\n';
  os << "rank ratio  " << sci(s.rank_ratio) << (s.w_extracted ? "  (rank one)" : "") << '\n';
  os << "secrecy     " << secrecy_capacity(p, chan, s) << " bit/s/Hz\n";
  os << "harvested   " << dbm_text(total_harvested_power(p, chan, s)) << '\n';
  const FeasibilityReport fr = check_feasibility(p, chan, s);
  os << "feasible    " << (fr.feasible ? "yes" : "no") << "  (tightest " << fr.worst_name << " "
     << sci(fr.worst) << ")\n";
}

void print_certificate(std::ostream& os, const DualCertificate& c) {
  os << "multipliers lambda " << sci(c.lambda) << "  mu " << sci(c.mu) << "  psi " << sci(c.psi)
     << "  theta " << sci(c.theta) << '\n';
  for (std::size_t k = 0; k < c.beta.size(); ++k)
    os << "            beta[" << k + 1 << "] " << sci(c.beta[k]) << "  delta[" << k + 1 << "] "
       << sci(c.delta[k]) << '\n';
  const KktResiduals& r = c.residuals;
  os << "residuals   stationarity W " << sci(r.stationarity_W) << "  V " << sci(r.stationarity_V)
     << "  rho " << sci(r.stationarity_rho) << '\n';
  os << "            complementarity " << sci(r.complementarity_scaled) << "  slackness "
     << sci(r.slackness) << "  dual feasibility " << sci(r.dual_feasibility) << '\n';
  os << "            duality gap " << sci(r.duality_gap) << "  (primal " << sci(c.primal_objective)
     << " W, dual " << sci(c.dual_objective) << " W)\n";
  if (c.ill_posed) os << "note        " << c.note << '\n';
}

// Instance from --config (instance JSON) and/or --seed. A seed given on the
// command line redraws the channel unless the file pins h explicitly.
Instance make_instance(const Flags& f, int n_t_default, int k_default) {
  Instance inst;
  if (!f.config.empty()) {
    const std::string text = load(f.config);
    inst = parse(f.config, [&] { return instance_from_json(text); });
    const bool pinned = text.find("\"h\"") != std::string::npos;
    if (f.seed && !pinned) inst.chan = draw_channel(inst.params, inst.config, *f.seed);
  } else {
    inst.params = SystemParams::defaults(n_t_default, k_default);
    inst.chan = draw_channel(inst.params, inst.config, f.seed.value_or(1));
  }
  return inst;
}

SchemeOptions solver_options(const Flags& f) {
  SchemeOptions o;
  if (f.tol) {
    if (!(*f.tol > 0.0)) throw UsageError("--tol must be positive");
    o.solver_tol = *f.tol;
  }
  return o;
}

int cmd_solve(const Flags& f) {
  const Instance inst = make_instance(f, 6, 4);
  const SchemeKind kind = scheme_flag(f.scheme, SchemeKind::Scheme2);
  const SchemeResult r = run_scheme(kind, inst.params, inst.chan, solver_options(f));
  print_solution(std::cout, inst.params, inst.chan, kind, r.solution, r.provenance);
  if (r.certificate) print_certificate(std::cout, *r.certificate);
  if (!f.out.empty()) {
    const fs::path dir(f.out);
    ensure_dir(dir);
    write_text_file(dir / "instance.json", instance_to_json(inst));
    write_text_file(dir / "solution.json", solution_to_json(kind, r));
  }
  return exit_for(r.solution.status);
}

int cmd_sweep(const Flags& f, int trials, int threads, bool timing) {
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    const std::string text = load(f.config);
    cfg = parse(f.config, [&] { return experiment_from_json(text); });
  }
  if (f.seed) cfg.base_seed = *f.seed;
  if (f.tol) cfg.solver.solver_tol = solver_options(f).solver_tol;
  if (!f.scheme.empty()) {
    cfg.schemes.clear();
    std::stringstream ss(f.scheme);
    std::string item;
    while (std::getline(ss, item, ','))
      cfg.schemes.push_back(parse("--scheme", [&] { return scheme_from_string(item); }));
  }
  if (trials > 0) cfg.trials = trials;
  if (threads >= 0) cfg.threads = threads;
  parse("config", [&] {
    cfg.validate();
    return 0;
  });

  const SweepResult res = run_sweep(cfg);
  const fs::path dir(f.out.empty() ? "." : f.out);
  ensure_dir(dir);
  write_text_file(dir / "config.json", experiment_to_json(cfg));
  emit_csv(res.records, dir / "records.csv", timing);
  emit_aggregate_csv(res.aggregates, dir / "aggregate.csv");
  emit_figures(cfg, res, dir);

  std::cout << "axis          value  scheme      solved  tx power (common)   secrecy  common\n";
  for (const AggregateRow& a : res.aggregates) {
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %6g  %-10s %3d/%-3d  %-18s %8.3f  %d\n",
                  to_string(a.axis).c_str(), a.axis_value, to_string(a.scheme).c_str(), a.solved,
                  a.trials, a.common ? dbm_text(a.common_tx_power_w).c_str() : "-",
                  a.common ? a.common_secrecy_bps_hz : std::nan(""), a.common);
    std::cout << line;
  }
  std::cout << "wrote " << (dir / "records.csv").string() << ", aggregate.csv, fig2.csv to fig5.csv\n";
  return kOk;
}

int cmd_certify(const Flags& f, const std::string& instance_path, const std::string& solution_path) {
  const double tol = f.tol.value_or(1e-6);
  if (!(tol > 0.0)) throw UsageError("--tol must be positive");
  const std::string itext = load(instance_path);
  const std::string stext = load(solution_path);
  const Instance inst = parse(instance_path, [&] { return instance_from_json(itext); });
  const StoredSolution stored = parse(solution_path, [&] { return solution_from_json(stext); });
  const SchemeKind kind = scheme_flag(f.scheme.empty() ? stored.scheme : f.scheme, SchemeKind::Relaxed);
  const BeamformingSolution& s = stored.solution;
  parse(instance_path, [&] {
    inst.chan.validate(inst.params);
    return 0;
  });
  if (s.W.rows() != inst.params.n_t || s.V.rows() != inst.params.n_t)
    throw UsageError("solution dimensions do not match the instance");

  print_solution(std::cout, inst.params, inst.chan, kind, s, stored.provenance);
  if (s.status == SolutionStatus::Infeasible) return kInfeasible;
  if (s.status == SolutionStatus::NumericalFailure) return kNumerical;

  const FeasibilityReport fr = check_feasibility(inst.params, inst.chan, s, tol);
  std::optional<DualCertificate> cert = stored.duals;
  std::string source = "embedded";
  if (!cert) {
    SchemeOptions o;
    const SchemeResult r = run_scheme(kind, inst.params, inst.chan, o);
    cert = r.certificate;
    source = "re-solved";
  }
  if (cert) cert->residuals = kkt_residuals(inst.params, inst.chan, s.W, s.V, s.rho, *cert);

  const bool baseline = kind == SchemeKind::Baseline1 || kind == SchemeKind::Baseline2;
  bool kkt_ok = false;
  std::optional<Proposition1Report> prop;
  std::optional<RankBoundReport> bound;
  if (cert) {
    std::cout << "duals       " << source << '\n';
    print_certificate(std::cout, *cert);
    kkt_ok = baseline ? cert->residuals.duality_gap <= tol : cert->residuals.worst() <= tol;
    if (!baseline) {
      prop = check_proposition1(inst.chan, *cert, s.rank_ratio);
      bound = rank_bound_check(inst.params, inst.chan, *cert, s.W.trace().real() > 0.0);
      std::cout << "beta>=delta " << (prop->condition_holds ? "yes" : "no") << "  rank one "
                << (prop->rank_one ? "yes" : "no") << "  consistent " << (prop->consistent ? "yes" : "no")
                << '\n';
      std::cout << "rank bound  lambda_min(A) " << sci(bound->a_min_eig) << "  rank Y " << bound->y_rank
                << (bound->y_rank_ok ? " (ok)" : " (unexpected)") << '\n';
    }
  } else {
    std::cout << "duals       unavailable\n";
  }
  const bool certified = fr.feasible && kkt_ok;
  std::cout << "certified   " << (certified ? "yes" : "no") << "  (tol " << sci(tol) << ")\n";

  if (!f.out.empty()) {
    const fs::path dir(f.out);
    ensure_dir(dir);
    std::ostringstream report;
    print_solution(report, inst.params, inst.chan, kind, s, stored.provenance);
    if (cert) print_certificate(report, *cert);
    report << "certified   " << (certified ? "yes" : "no") << '\n';
    write_text_file(dir / "certificate.txt", report.str());
    if (cert) write_text_file(dir / "certificate.json", certificate_to_json(*cert));
  }
  if (!fr.feasible) return kInfeasible;
  return certified ? kOk : kNumerical;
}

int cmd_oracle(const Flags& f) {
  const Instance inst = make_instance(f, 2, 2);
  if (inst.params.n_t != 2) throw UsageError("oracle needs n_t = 2");
  const SchemeResult rel = solve_relaxed(inst.params, inst.chan, solver_options(f));
  const OracleResult orc = brute_force_oracle(inst.params, inst.chan);
  const bool rel_ok = rel.solution.status == SolutionStatus::Optimal ||
                      rel.solution.status == SolutionStatus::RankDeficient;
  std::cout << "relaxed     " << to_string(rel.solution.status);
  if (rel_ok) std::cout << "  " << dbm_text(rel.solution.objective) << "  (" << sci(rel.solution.objective) << " W)";
  std::cout << '\n';
  std::cout << "grid        " << (orc.feasible ? "feasible" : "no feasible point");
  if (orc.feasible) std::cout << "  " << dbm_text(orc.objective) << "  (" << sci(orc.objective) << " W)";
  std::cout << "  " << orc.evaluations << " evaluations\n";
  if (rel.solution.status == SolutionStatus::NumericalFailure) return kNumerical;
  if (!rel_ok && !orc.feasible) return kInfeasible;
  if (rel_ok != orc.feasible) {
    std::cout << "mismatch    relaxed and grid disagree on feasibility\n";
    return rel_ok ? kOk : kNumerical;
  }
  const double gap = (orc.objective - rel.solution.objective) / rel.solution.objective;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f%%", 100.0 * gap);
  std::cout << "gap         " << buf << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure SWIPT beamforming: solve, sweep, certify, brute-force oracle"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", f.seed, "channel seed (sweep: base seed)");
    sub->add_option("--config", f.config, "config JSON (instance for solve/oracle, experiment for sweep)");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--tol", f.tol, "solver tolerance (certify: residual tolerance)");
    sub->add_option("--scheme", f.scheme, "relaxed, sub1, scheme2, baseline1, baseline2");
  };

  auto* solve = app.add_subcommand("solve", "solve one instance file or seeded draw");
  common(solve);

  int trials = 0, threads = -1;
  bool timing = false;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
  common(sweep);
  sweep->add_option("--trials", trials, "override the trial count")->check(CLI::PositiveNumber);
  sweep->add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  sweep->add_flag("--timing", timing, "add solve_ms to records.csv");

  std::string instance_path, solution_path;
  auto* certify = app.add_subcommand("certify", "check KKT conditions of a stored solution");
  common(certify);
  certify->add_option("instance", instance_path, "instance JSON")->required();
  certify->add_option("solution", solution_path, "solution JSON")->required();

  auto* oracle = app.add_subcommand("oracle", "compare the relaxation with a grid search (n_t = 2)");
  common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*solve) return cmd_solve(f);
    if (*sweep) return cmd_sweep(f, trials, threads, timing);
    if (*certify) return cmd_certify(f, instance_path, solution_path);
    if (*oracle) return cmd_oracle(f);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kUsage;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
