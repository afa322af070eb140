#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "swiptsec/certify.hpp"
#include "swiptsec/channel.hpp"
#include "swiptsec/problems.hpp"
#include "swiptsec/schemes.hpp"

using namespace swiptsec;

namespace {

ChannelRealization channel(const SystemParams& p, std::uint64_t seed) {
  return draw_channel(p, ChannelConfig{}, seed);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

bool solved(const SchemeResult& r) {
  return r.solution.status == SolutionStatus::Optimal || r.solution.status == SolutionStatus::RankDeficient;
}

}  // namespace

TEST_CASE("relaxed encoding layout for six antennas and four receivers") {
  const auto p = SystemParams::defaults(6, 4);
  const auto enc = build_relaxed(p, channel(p, 1));
  const auto& sdp = enc.sdp;
  int embedded12 = 0, two = 0;
  for (const auto& b : sdp.blocks()) {
    if (b.kind == sdp::BlockKind::HermitianEmbedded && b.dim == 12) ++embedded12;
    if (b.kind == sdp::BlockKind::RealSym && b.dim == 2) ++two;
  }
  CHECK(embedded12 == 2);
  CHECK(two == 2);
  CHECK(enc.named_row_count() == 2 * 3 + 4 + 2);
  CHECK(sdp.block(enc.slack_block).kind == sdp::BlockKind::Diagonal);
  for (const char* name : {"C1", "C2[1]", "C2[3]", "C3", "C4[1]", "C4[3]", "C5", "C6", "C7.lo", "C7.hi"})
    CHECK(enc.find(name) != nullptr);
  CHECK(enc.find("C10[1]") == nullptr);
  CHECK(enc.power_scale > 0.0);
  REQUIRE(enc.channel_scale.size() == 4);
  for (double s : enc.channel_scale) CHECK(s > 0.0);
  // each named row appears once
  for (std::size_t i = 0; i < enc.rows.size(); ++i)
    for (std::size_t j = i + 1; j < enc.rows.size(); ++j) CHECK(enc.rows[i].row != enc.rows[j].row);
}

TEST_CASE("Sub1 swaps the idle-receiver harvest rows") {
  const auto p = SystemParams::defaults(6, 4);
  const auto enc = build_sub1(p, channel(p, 1));
  CHECK(enc.uses_c10());
  CHECK(enc.find("C10[2]") != nullptr);
  CHECK(enc.find("C4[2]") == nullptr);
}

TEST_CASE("rows with zero harvest requirement are left out") {
  auto p = SystemParams::defaults(6, 4);
  p.p_min = 0.0;
  p.p_min_k.assign(3, 0.0);
  const auto enc = build_relaxed(p, channel(p, 1));
  CHECK(enc.find("C3") == nullptr);
  CHECK(enc.find("C4[1]") == nullptr);
  CHECK(enc.harvest_block < 0);
}

TEST_CASE("hyperbolic block: t rho >= c^2") {
  sdp::SdpProblem p;
  const int b = add_hyperbolic_block(p, 1.0, "t rho >= 1");
  RMatrix ct = RMatrix::Zero(2, 2);
  ct(0, 0) = 1.0;
  p.set_objective(b, ct);
  RMatrix er = RMatrix::Zero(2, 2);
  er(1, 1) = 1.0;
  p.add_constraint({{b, er}}, 0.5, "rho = 0.5");
  const auto sol = sdp::solve(p);
  REQUIRE(sol.status == sdp::SdpStatus::Optimal);
  CHECK(sol.X[0](0, 0) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(sol.X[0](0, 1) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("null-space basis") {
  CVector h(2);
  h << 1, 0;
  const CMatrix n = null_space_basis(h);
  REQUIRE(n.rows() == 2);
  REQUIRE(n.cols() == 1);
  CHECK(std::abs(n(0, 0)) < 1e-15);
  CHECK(std::abs(n(1, 0)) == doctest::Approx(1.0));

  const auto p = SystemParams::defaults(6, 4);
  const auto c = channel(p, 3);
  const CMatrix m = null_space_basis(c.h);
  CHECK(m.cols() == 5);
  CHECK((m.adjoint() * c.h).norm() <= 1e-14 * c.h.norm());
  CHECK((m.adjoint() * m - CMatrix::Identity(5, 5)).norm() <= 1e-14);
}

TEST_CASE("decoded solutions satisfy the original constraints") {
  for (int n_t : {2, 4, 6}) {
    auto p = SystemParams::defaults(n_t, n_t == 2 ? 2 : 4);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto c = channel(p, seed);
      for (const auto& enc : {build_relaxed(p, c), build_sub1(p, c), build_baseline(p, c),
                              build_baseline(p, c, 0.5), build_fixed_rho(p, c, EncodingKind::Relaxed, 0.4)}) {
        const auto r = solve_encoding(p, c, enc);
        if (!solved(r)) continue;
        const auto rep = check_feasibility(p, c, r.solution, 1e-7);
        CHECK_MESSAGE(rep.feasible, to_string(enc.kind) << " seed " << seed << " worst " << rep.worst_name
                                                        << " " << rep.worst);
        if (enc.uses_c10())
          for (const auto& s : constraint_values(p, c, r.solution.W, r.solution.V, r.solution.rho, true))
            CHECK(s.slack >= -1e-7 * (1.0 + std::abs(r.solution.objective)));
      }
    }
  }
}

TEST_CASE("Sub1 solutions are feasible for the relaxed problem") {
  const auto p = SystemParams::defaults(6, 4);
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto c = channel(p, seed);
    const auto r = solve_encoding(p, c, build_sub1(p, c));
    if (!solved(r)) continue;
    for (const auto& s : constraint_values(p, c, r.solution.W, r.solution.V, r.solution.rho, false))
      CHECK(s.slack >= -1e-9);
  }
}

TEST_CASE("without idle-receiver harvest Sub1 and relaxed coincide") {
  auto p = SystemParams::defaults(6, 4);
  p.p_min_k.assign(3, 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto c = channel(p, seed);
    const auto a = solve_relaxed(p, c), b = solve_sub1(p, c);
    REQUIRE(solved(a));
    REQUIRE(solved(b));
    CHECK(rel(a.solution.objective, b.solution.objective) <= 1e-6);
  }
}

TEST_CASE("with demanding idle-receiver harvest Sub1 costs more") {
  auto p = SystemParams::defaults(6, 4);
  p.p_min_k.assign(3, dbm_to_watt(5.0));
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto c = channel(p, seed);
    const auto a = solve_relaxed(p, c), b = solve_sub1(p, c);
    if (!solved(a) || !solved(b)) continue;
    ++compared;
    CHECK(b.solution.objective >= a.solution.objective * (1.0 - 1e-7));
  }
  CHECK(compared > 0);
}

TEST_CASE("baseline noise stays out of the desired direction") {
  const auto p = SystemParams::defaults(6, 4);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto c = channel(p, seed);
    const auto r = solve_baseline(p, c, 1);
    if (!solved(r)) continue;
    CHECK(quad_form(c.h, r.solution.V) <= 1e-12 * r.solution.V.trace().real() * c.h.squaredNorm());
    const auto relaxed = solve_relaxed(p, c);
    REQUIRE(solved(relaxed));
    CHECK(r.solution.objective >= relaxed.solution.objective * (1.0 - 1e-7));
  }
}

TEST_CASE("with nobody to hide from and nothing to harvest the baseline sends no noise") {
  auto p = SystemParams::defaults(6, 1);
  p.p_min = 0.0;
  const auto c = channel(p, 4);
  const auto r = solve_baseline(p, c, 1);
  REQUIRE(solved(r));
  CHECK(r.solution.V.trace().real() <= 1e-9);
}

TEST_CASE("joint split-ratio model matches a golden-section search") {
  const auto p = SystemParams::defaults(6, 4);
  int compared = 0;
  for (std::uint64_t seed = 1; compared < 4 && seed < 20; ++seed) {
    const auto c = channel(p, seed);
    const auto joint = solve_relaxed(p, c);
    if (!solved(joint)) continue;
    ++compared;
    const auto gs = oracle::golden_section_rho(p, c);
    REQUIRE(std::isfinite(gs.objective));
    CHECK(rel(joint.solution.objective, gs.objective) <= 1e-3);
    CHECK(joint.solution.objective <= gs.objective * (1.0 + 1e-7));
  }
}

TEST_CASE("channels times alpha with noise and harvest times alpha^2 change nothing") {
  const double alpha = 10.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto p = SystemParams::defaults(6, 4);
    const auto c = channel(p, seed);
    auto q = p;
    q.sigma_ant2 *= alpha * alpha;
    q.sigma_s2 *= alpha * alpha;
    q.p_min *= alpha * alpha;
    for (double& v : q.p_min_k) v *= alpha * alpha;
    auto d = c;
    d.h *= alpha;
    for (auto& g : d.g) g *= alpha;
    const auto a = solve_scheme2(p, c), b = solve_scheme2(q, d);
    CHECK(a.solution.status == b.solution.status);
    CHECK(a.provenance == b.provenance);
    if (!solved(a)) continue;
    CHECK(rel(a.solution.objective, b.solution.objective) <= 1e-6);
    CHECK(std::abs(a.solution.rho - b.solution.rho) <= 1e-6);
    CHECK((a.solution.W - b.solution.W).norm() <= 1e-5 * a.solution.objective);
  }
}

TEST_CASE("scaling every power scales the beamformers") {
  const double k = 3.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = SystemParams::defaults(6, 4);
    const auto c = channel(p, seed);
    auto q = p;
    for (double* v : {&q.sigma_ant2, &q.sigma_s2, &q.p_min, &q.p_max, &q.p_pg, &q.p_c}) *v *= k;
    for (double& v : q.p_min_k) v *= k;
    const auto a = solve_relaxed(p, c), b = solve_relaxed(q, c);
    CHECK(a.solution.status == b.solution.status);
    if (!solved(a)) continue;
    CHECK(rel(k * a.solution.objective, b.solution.objective) <= 1e-6);
    CHECK(std::abs(a.solution.rho - b.solution.rho) <= 1e-6);
    CHECK((k * a.solution.W - b.solution.W).norm() <= 1e-5 * b.solution.objective);
    CHECK((k * a.solution.V - b.solution.V).norm() <= 1e-5 * b.solution.objective);
  }
}

TEST_CASE("encoding dump names every row") {
  const auto p = SystemParams::defaults(4, 3);
  const auto enc = build_relaxed(p, channel(p, 2));
  std::ostringstream os;
  write_encoding(os, enc);
  const std::string s = os.str();
  for (const auto& r : enc.rows) CHECK(s.find(r.name) != std::string::npos);
}
