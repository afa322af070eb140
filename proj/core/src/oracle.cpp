#include "swiptsec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace swiptsec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
  double a, b, c;  // a p_w + b p_v >= c
};

/// min p_w + p_v over {rows, p_w >= 0, p_v >= 0} by vertex enumeration.
double solve_lp2(std::vector<Row>& rows, double& pw_out, double& pv_out) {
  const std::size_t m = rows.size();
  rows.push_back({1.0, 0.0, 0.0});
  rows.push_back({0.0, 1.0, 0.0});
  double best = kInf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const Row& r1 = rows[i];
      const Row& r2 = rows[j];
      const double det = r1.a * r2.b - r1.b * r2.a;
      const double scale = (std::abs(r1.a) + std::abs(r1.b)) * (std::abs(r2.a) + std::abs(r2.b));
      if (!(std::abs(det) > 1e-14 * scale)) continue;
      const double pw = (r1.c * r2.b - r1.b * r2.c) / det;
      const double pv = (r1.a * r2.c - r1.c * r2.a) / det;
      if (pw < 0.0 || pv < 0.0 || pw + pv >= best) continue;
      bool ok = true;
      for (std::size_t k = 0; k < m && ok; ++k) {
        const Row& r = rows[k];
        const double lhs = r.a * pw + r.b * pv;
        const double mag = std::abs(r.a * pw) + std::abs(r.b * pv) + std::abs(r.c);
        ok = lhs >= r.c - 1e-12 * mag;
      }
      if (ok) {
        best = pw + pv;
        pw_out = pw;
        pv_out = pv;
      }
    }
  }
  rows.resize(m);
  return best;
}

CVector direction(double theta, double phi) {
  CVector v(2);
  v(0) = std::cos(theta);
  v(1) = std::polar(std::sin(theta), phi);
  return v;
}

struct Gains {
  double h = 0.0;
  std::vector<double> g;
};

Gains gains(const ChannelRealization& chan, const CVector& d) {
  Gains out;
  out.h = std::norm(chan.h.dot(d));
  for (const auto& gk : chan.g) out.g.push_back(std::norm(gk.dot(d)));
  return out;
}

struct Evaluator {
  const SystemParams& p;
  std::vector<Row> rows;
  long evaluations = 0;

  double operator()(const Gains& w, const Gains& v, double rho, double& pw, double& pv) {
    ++evaluations;
    rows.clear();
    const double gr = p.gamma_req;
    rows.push_back({w.h, -gr * v.h, gr * p.sigma_ant2 + gr * p.sigma_s2 / rho});
    for (std::size_t k = 0; k < w.g.size(); ++k)
      rows.push_back({-w.g[k], p.gamma_tol[k] * v.g[k], -p.gamma_tol[k] * (p.sigma_ant2 + p.sigma_s2)});
    if (p.p_min > 0.0) rows.push_back({w.h, v.h, p.p_min / (p.eta * (1.0 - rho)) - p.sigma_ant2});
    for (std::size_t k = 0; k < w.g.size(); ++k)
      if (p.p_min_k[k] > 0.0) rows.push_back({w.g[k], v.g[k], p.p_min_k[k] / p.eta - p.sigma_ant2});
    return solve_lp2(rows, pw, pv);
  }
};

struct Candidate {
  double value = kInf;
  double tw = 0, fw = 0, tv = 0, fv = 0;
  double rho = 0.5;
  double pw = 0, pv = 0;
};

}  // namespace

BeamformingSolution OracleResult::as_solution() const {
  BeamformingSolution s;
  s.W = p_w * w_dir * w_dir.adjoint();
  s.V = p_v * v_dir * v_dir.adjoint();
  s.rho = rho;
  s.w_extracted = std::sqrt(p_w) * w_dir;
  s.objective = objective;
  s.status = feasible ? SolutionStatus::Optimal : SolutionStatus::Infeasible;
  s.rank_ratio = 0.0;
  return s;
}

OracleResult brute_force_oracle(const SystemParams& params, const ChannelRealization& chan,
                                const OracleOptions& opts) {
  params.validate();
  chan.validate(params);
  if (params.n_t != 2) throw std::invalid_argument("brute_force_oracle: requires n_t = 2");
  if (opts.coarse_theta < 2 || opts.coarse_phi < 1 || !(opts.rho_step > 0.0 && opts.rho_step < 0.5))
    throw std::invalid_argument("brute_force_oracle: bad grid options");

  const double pi = std::numbers::pi;
  const int nr = static_cast<int>(std::lround(1.0 / opts.rho_step)) - 1;
  const double dt = 0.5 * pi / (opts.coarse_theta - 1);
  const double df = 2.0 * pi / opts.coarse_phi;

  struct Dir {
    double t, f;
    Gains gains;
  };
  std::vector<Dir> dirs;
  for (int i = 0; i < opts.coarse_theta; ++i)
    for (int j = 0; j < opts.coarse_phi; ++j) {
      const double t = i * dt, f = j * df;
      dirs.push_back({t, f, gains(chan, direction(t, f))});
      if (i == 0) break;  // phase is irrelevant at theta = 0
    }

  Evaluator eval{params, {}};
  std::vector<Candidate> top;
  const auto keep = static_cast<std::size_t>(std::max(1, opts.keep));
  for (const Dir& w : dirs) {
    for (const Dir& v : dirs) {
      Candidate best;
      for (int r = 1; r <= nr; ++r) {
        double pw = 0, pv = 0;
        const double val = eval(w.gains, v.gains, r * opts.rho_step, pw, pv);
        if (val < best.value) best = {val, w.t, w.f, v.t, v.f, r * opts.rho_step, pw, pv};
      }
      if (!std::isfinite(best.value)) continue;
      if (top.size() < keep || best.value < top.back().value) {
        top.push_back(best);
        std::sort(top.begin(), top.end(), [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
        if (top.size() > keep) top.pop_back();
      }
    }
  }

  OracleResult out;
  if (top.empty()) {
    out.evaluations = eval.evaluations;
    return out;
  }

  auto evaluate = [&](Candidate& c) {
    c.tw = std::clamp(c.tw, 0.0, 0.5 * pi);
    c.tv = std::clamp(c.tv, 0.0, 0.5 * pi);
    c.rho = std::clamp(c.rho, 0.5 * opts.rho_step, 1.0 - 0.5 * opts.rho_step);
    c.value = eval(gains(chan, direction(c.tw, c.fw)), gains(chan, direction(c.tv, c.fv)),
                   c.rho, c.pw, c.pv);
  };

  Candidate best = top.front();
  for (Candidate cand : top) {
    double st = dt, sf = df, sr = opts.rho_step;
    for (int round = 0; round < opts.refine_rounds; ++round) {
      for (int moves = 0; moves < 50; ++moves) {
        Candidate local = cand;
        for (int a = -1; a <= 1; ++a)
          for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c)
              for (int d = -1; d <= 1; ++d)
                for (int e = -2; e <= 2; ++e) {
                  if (!a && !b && !c && !d && !e) continue;
                  if (std::abs(e) == 2 && round == 0) continue;
                  Candidate t = cand;
                  t.tw += a * st;
                  t.fw += b * sf;
                  t.tv += c * st;
                  t.fv += d * sf;
                  t.rho += std::abs(e) == 2 ? (e / 2) * opts.rho_step : e * sr;
                  evaluate(t);
                  if (t.value < local.value) local = t;
                }
        if (!(local.value < cand.value)) break;
        cand = local;
      }
      st *= 0.5;
      sf *= 0.5;
      sr *= 0.5;
    }
    if (cand.value < best.value) best = cand;
  }

  // C5 and C6 only cap p_w + p_v, so they are applied to the minimum.
  const double cap = std::min(params.p_max, (params.p_pg - params.p_c) / params.epsilon);
  out.feasible = best.value <= cap * (1.0 + 1e-12);
  out.objective = best.value;
  out.w_dir = direction(best.tw, best.fw);
  out.v_dir = direction(best.tv, best.fv);
  out.p_w = best.pw;
  out.p_v = best.pv;
  out.rho = best.rho;
  out.evaluations = eval.evaluations;
  return out;
}

}  // namespace swiptsec
