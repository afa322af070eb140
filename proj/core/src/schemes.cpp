#include "swiptsec/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace swiptsec {

std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::Relaxed: return "relaxed";
    case SchemeKind::Sub1: return "sub1";
    case SchemeKind::Scheme2: return "scheme2";
    case SchemeKind::Baseline1: return "baseline1";
    case SchemeKind::Baseline2: return "baseline2";
  }
  return "relaxed";
}

SchemeKind scheme_from_string(const std::string& s) {
  for (auto k : {SchemeKind::Relaxed, SchemeKind::Sub1, SchemeKind::Scheme2, SchemeKind::Baseline1,
                 SchemeKind::Baseline2})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::NotApplicable: return "n/a";
    case Provenance::GlobalOptimal: return "GlobalOptimal";
    case Provenance::LowerBound: return "LowerBound";
  }
  return "n/a";
}

RankOneExtraction extract_rank_one(const CMatrix& W, double rank_tol) {
  RankOneExtraction out;
  const auto n = W.rows();
  const CMatrix herm = 0.5 * (W + W.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  const auto& ev = es.eigenvalues();
  const double l1 = ev(n - 1);
  if (!(l1 > 0.0)) {
    out.zero = true;
    out.ratio = 0.0;
    out.w = CVector::Zero(n);
    return out;
  }
  out.ratio = n > 1 ? std::max(ev(n - 2), 0.0) / l1 : 0.0;
  if (out.ratio > rank_tol) return out;
  CVector w = std::sqrt(l1) * es.eigenvectors().col(n - 1);
  const double big = w.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(w(i)) >= 1e-6 * big) {
      w *= std::conj(w(i)) / std::abs(w(i));
      w(i) = std::abs(w(i));
      break;
    }
  }
  out.w = w;
  return out;
}

namespace {


std::string diagnostics(const sdp::SdpSolution& s) {
  std::ostringstream os;
  os << to_string(s.status) << " after " << s.iterations << " iterations (primal " << s.residuals.primal
     << ", dual " << s.residuals.dual << ", gap " << s.residuals.gap << ")";
  if (!s.message.empty()) os << ": " << s.message;
  return os.str();
}

}  // namespace

SchemeResult solve_encoding(const SystemParams& params, const ChannelRealization& chan,
                            const ProblemEncoding& enc, const SchemeOptions& opts) {
  SchemeResult res;
  sdp::SolverOptions so;
  so.tol = opts.solver_tol;
  so.max_iter = opts.max_iter;
  const sdp::SdpSolution sol = sdp::solve(enc.sdp, so);
  res.sdp_status = sol.status;
  res.iterations = sol.iterations;
  auto& bs = res.solution;
  const int n = params.n_t;
  bs.W = CMatrix::Zero(n, n);
  bs.V = CMatrix::Zero(n, n);
  bs.rho = enc.fixed_rho.value_or(1.0);

  switch (sol.status) {
    case sdp::SdpStatus::Optimal: break;
    case sdp::SdpStatus::PrimalInfeasible:
      bs.status = SolutionStatus::Infeasible;
      bs.detail = diagnostics(sol);
      return res;
    default:
      bs.status = SolutionStatus::NumericalFailure;
      bs.detail = diagnostics(sol);
      return res;
  }

  DecodedSolution d;
  try {
    d = decode(enc, sol);
  } catch (const NumericalFailure& e) {
    bs.status = SolutionStatus::NumericalFailure;
    bs.detail = e.what();
    return res;
  }
  bs.W = d.W;
  bs.V = d.V;
  bs.rho = d.rho;
  bs.objective = d.objective;
  const RankOneExtraction ex = extract_rank_one(bs.W, opts.rank_tol);
  bs.rank_ratio = ex.ratio;
  if (ex.w) {
    bs.w_extracted = ex.w;
    bs.status = SolutionStatus::Optimal;
  } else {
    bs.status = SolutionStatus::RankDeficient;
  }
  try {
    DualCertificate cert = recover_duals(enc, sol);
    cert.residuals = kkt_residuals(params, chan, bs.W, bs.V, bs.rho, cert);
    res.certificate = std::move(cert);
  } catch (const NumericalFailure& e) {
    bs.detail = std::string("dual recovery failed: ") + e.what();
  }
  return res;
}

SchemeResult solve_relaxed(const SystemParams& params, const ChannelRealization& chan,
                           const SchemeOptions& opts) {
  return solve_encoding(params, chan, build_relaxed(params, chan), opts);
}

SchemeResult solve_sub1(const SystemParams& params, const ChannelRealization& chan,
                        const SchemeOptions& opts) {
  SchemeResult r = solve_encoding(params, chan, build_sub1(params, chan), opts);
  if (r.sdp_status == sdp::SdpStatus::Optimal && r.solution.rank_ratio > opts.rank_tol) {
    std::ostringstream os;
    os << "Sub1 solution is not rank one (lambda2/lambda1 = " << r.solution.rank_ratio << ")";
    throw InvariantViolation(os.str());
  }
  return r;
}

SchemeResult solve_scheme2(const SystemParams& params, const ChannelRealization& chan,
                           const SchemeOptions& opts) {
  SchemeResult relaxed, sub1;
  if (opts.parallel_scheme2) {
    auto fut = std::async(std::launch::async, [&] { return solve_sub1(params, chan, opts); });
    relaxed = solve_relaxed(params, chan, opts);
    sub1 = fut.get();
  } else {
    relaxed = solve_relaxed(params, chan, opts);
    sub1 = solve_sub1(params, chan, opts);
  }
  return select_scheme2(std::move(relaxed), std::move(sub1));
}

SchemeResult select_scheme2(SchemeResult relaxed, SchemeResult sub1) {
  if (relaxed.solution.status == SolutionStatus::Infeasible &&
      (sub1.solution.status == SolutionStatus::Optimal ||
       sub1.solution.status == SolutionStatus::RankDeficient))
    throw InvariantViolation("relaxed problem infeasible while Sub1 is feasible");
  if (relaxed.solution.status == SolutionStatus::Optimal) {
    relaxed.provenance = Provenance::GlobalOptimal;
    return relaxed;
  }
  sub1.provenance = Provenance::LowerBound;
  return sub1;
}

SchemeResult solve_baseline(const SystemParams& params, const ChannelRealization& chan, int which,
                            const SchemeOptions& opts) {
  if (which != 1 && which != 2) throw std::invalid_argument("baseline must be 1 or 2");
  const auto enc = build_baseline(params, chan, which == 2 ? std::optional<double>(0.5) : std::nullopt);
  return solve_encoding(params, chan, enc, opts);
}

SchemeResult run_scheme(SchemeKind kind, const SystemParams& params, const ChannelRealization& chan,
                        const SchemeOptions& opts) {
  switch (kind) {
    case SchemeKind::Relaxed: return solve_relaxed(params, chan, opts);
    case SchemeKind::Sub1: return solve_sub1(params, chan, opts);
    case SchemeKind::Scheme2: return solve_scheme2(params, chan, opts);
    case SchemeKind::Baseline1: return solve_baseline(params, chan, 1, opts);
    case SchemeKind::Baseline2: return solve_baseline(params, chan, 2, opts);
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace swiptsec
