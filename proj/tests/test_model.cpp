#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "swiptsec/model.hpp"

using namespace swiptsec;

namespace {

SystemParams two_antennas(double s_ant, double s_s) {
  SystemParams p = SystemParams::defaults(2, 2);
  p.sigma_ant2 = s_ant;
  p.sigma_s2 = s_s;
  return p;
}

ChannelRealization chan2(CVector h, CVector g) {
  ChannelRealization c;
  c.h = std::move(h);
  c.g = {std::move(g)};
  return c;
}

CVector vec2(cdouble a, cdouble b) {
  CVector v(2);
  v << a, b;
  return v;
}

CMatrix diag2(double a, double b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

BeamformingSolution sol(CMatrix W, CMatrix V, double rho) {
  BeamformingSolution s;
  s.W = std::move(W);
  s.V = std::move(V);
  s.rho = rho;
  return s;
}

CMatrix random_psd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  CMatrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = {d(rng), d(rng)};
  return A * A.adjoint();
}

CVector random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = {d(rng), d(rng)};
  return v;
}

}  // namespace

TEST_CASE("desired SINR by direct substitution") {
  const auto p = two_antennas(1.0, 1.0);
  const auto c = chan2(vec2(1, 0), vec2(0, 1));
  const Metric m = desired_sinr(p, c, sol(diag2(4, 0), diag2(0, 0), 1.0));
  CHECK(m.value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_FALSE(m.degenerate);
  CHECK(desired_sinr(p, c, sol(diag2(0, 0), diag2(7, 3), 0.4)).value == 0.0);
}

TEST_CASE("desired SINR against the scalar calculator") {
  const auto p = two_antennas(0.1, 0.1);
  const double r = 1.0 / std::sqrt(2.0);
  const auto c = chan2(vec2(r, r), vec2(0, 1));
  const auto s = sol(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2), 0.5);
  const double expect = oracle::desired_sinr(1.0, 1.0, 0.5, 0.1, 0.1);
  CHECK(expect == doctest::Approx(0.7692).epsilon(1e-4));
  CHECK(desired_sinr(p, c, s).value == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("desired SINR at rho = 0 is zero and flagged") {
  const auto p = two_antennas(1.0, 1.0);
  const auto c = chan2(vec2(1, 0), vec2(0, 1));
  const Metric m = desired_sinr(p, c, sol(diag2(4, 0), diag2(0, 0), 0.0));
  CHECK(m.value == 0.0);
  CHECK(m.degenerate);
}

TEST_CASE("eavesdropper SINR bound") {
  const auto p = two_antennas(0.5, 0.5);
  const auto c = chan2(vec2(0, 1), vec2(1, 0));
  CHECK(eavesdropper_sinr_bound(p, c, 1, sol(diag2(1, 0), diag2(3, 0), 0.7)) == doctest::Approx(0.25));
  CHECK(eavesdropper_sinr_bound(p, c, 1, sol(diag2(0, 0), diag2(3, 0), 0.7)) == 0.0);

  const auto p2 = two_antennas(0.1, 0.1);
  const double r = 1.0 / std::sqrt(2.0);
  const auto c2 = chan2(vec2(1, 0), vec2(r, cdouble(0, r)));
  const auto s2 = sol(CMatrix::Identity(2, 2), 2.0 * CMatrix::Identity(2, 2), 0.5);
  const double expect = oracle::eaves_bound(1.0, 2.0, 0.1, 0.1);
  CHECK(expect == doctest::Approx(0.4545).epsilon(1e-4));
  CHECK(eavesdropper_sinr_bound(p2, c2, 1, s2) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("eavesdropper index is checked") {
  const auto p = two_antennas(0.5, 0.5);
  const auto c = chan2(vec2(0, 1), vec2(1, 0));
  const auto s = sol(diag2(1, 0), diag2(3, 0), 0.7);
  CHECK_THROWS(eavesdropper_sinr_bound(p, c, 0, s));
  CHECK_THROWS(eavesdropper_sinr_bound(p, c, 2, s));
  CHECK_THROWS(harvested_power_idle(p, c, 2, s));
}

TEST_CASE("split ratio of an eavesdropper never beats the bound") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = two_antennas(0.3, 0.2);
    p.n_t = 3;
    const auto c = [&] {
      ChannelRealization ch;
      ch.h = random_vec(3, rng);
      ch.g = {random_vec(3, rng)};
      return ch;
    }();
    const auto s = sol(random_psd(3, rng), random_psd(3, rng), 0.5);
    const double bound = eavesdropper_sinr_bound(p, c, 1, s);
    for (double rk : {0.1, 0.5, 1.0}) {
      const double v = eavesdropper_sinr(p, c, 1, s, rk);
      CHECK(v <= bound * (1.0 + 1e-14));
      CHECK(v == doctest::Approx(oracle::eaves_at(oracle::quad(c.g[0], s.W), oracle::quad(c.g[0], s.V), rk,
                                                  p.sigma_ant2, p.sigma_s2)));
    }
    CHECK(eavesdropper_sinr(p, c, 1, s, 1.0) == doctest::Approx(bound).epsilon(1e-14));
  }
}

TEST_CASE("secrecy capacity") {
  const auto p = two_antennas(0.5, 0.5);
  // desired SINR 2, eavesdropper bound 0.25
  const auto c = chan2(vec2(1, 0), vec2(std::sqrt(0.125), 0));
  const auto s = sol(diag2(2, 0), diag2(0, 0), 1.0);
  CHECK(desired_sinr(p, c, s).value == doctest::Approx(2.0));
  CHECK(eavesdropper_sinr_bound(p, c, 1, s) == doctest::Approx(0.25));
  CHECK(secrecy_capacity(p, c, s) == doctest::Approx(std::log2(3.0) - std::log2(1.25)).epsilon(1e-14));
  CHECK(secrecy_capacity(p, c, s) == doctest::Approx(1.2630).epsilon(1e-4));

  // desired 1, eavesdropper 3: clamped
  const auto c2 = chan2(vec2(1, 0), vec2(std::sqrt(3.0), 0));
  const auto s2 = sol(diag2(1, 0), diag2(0, 0), 1.0);
  CHECK(desired_sinr(p, c2, s2).value == doctest::Approx(1.0));
  CHECK(eavesdropper_sinr_bound(p, c2, 1, s2) == doctest::Approx(3.0));
  CHECK(secrecy_capacity(p, c2, s2) == 0.0);

  const double g_req = db_to_linear(9.0), g_tol = db_to_linear(-10.0);
  CHECK(std::log2(1.0 + g_req) - std::log2(1.0 + g_tol) == doctest::Approx(3.0233).epsilon(1e-4));
}

TEST_CASE("secrecy capacity is never negative") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = SystemParams::defaults(3, 4);
    p.sigma_ant2 = 0.1;
    p.sigma_s2 = 0.1;
    ChannelRealization c;
    c.h = random_vec(3, rng);
    for (int k = 0; k < 3; ++k) c.g.push_back(random_vec(3, rng));
    const auto s = sol(random_psd(3, rng), random_psd(3, rng), 0.3);
    CHECK(secrecy_capacity(p, c, s) >= 0.0);
  }
}

TEST_CASE("harvested power at the desired receiver") {
  auto p = two_antennas(1.0, 1.0);
  p.eta = 0.5;
  const auto c = chan2(vec2(1, 0), vec2(0, 1));
  CHECK(harvested_power_desired(p, c, sol(diag2(4, 0), diag2(1, 0), 0.5)).value == doctest::Approx(1.5));
  CHECK(harvested_power_desired(p, c, sol(diag2(4, 0), diag2(1, 0), 1.0)).value == 0.0);

  // 10 mW received at rho = 0.3
  auto q = two_antennas(0.0, 1.0);
  const auto hw = sol(diag2(0.01, 0), diag2(0, 0), 0.3);
  CHECK(harvested_power_desired(q, c, hw).value == doctest::Approx(3.5e-3).epsilon(1e-12));
}

TEST_CASE("the power splitter is passive") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = two_antennas(0.2, 0.3);
    const auto c = chan2(random_vec(2, rng), random_vec(2, rng));
    const double rho = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto s = sol(random_psd(2, rng), random_psd(2, rng), rho);
    const double received = oracle::quad(c.h, s.W) + oracle::quad(c.h, s.V) + p.sigma_ant2;
    const double harvest_share = harvested_power_desired(p, c, s).value / p.eta;
    CHECK(harvest_share + rho * received == doctest::Approx(received).epsilon(1e-13));
  }
}

TEST_CASE("harvested power at an idle receiver") {
  auto p = two_antennas(0.0, 1.0);
  p.eta = 0.5;
  const auto c = chan2(vec2(0, 1), vec2(1, 0));
  CHECK(harvested_power_idle(p, c, 1, sol(diag2(1, 0), diag2(1, 0), 0.5)) == doctest::Approx(1.0));

  auto q = two_antennas(0.25, 1.0);
  CHECK(harvested_power_idle(q, c, 1, sol(diag2(0, 0), diag2(0, 0), 0.5)) == doctest::Approx(0.5 * 0.25));

  auto r = two_antennas(1e-14, 1.0);
  CHECK(harvested_power_idle(r, c, 1, sol(diag2(2, 2), diag2(0, 4), 0.5)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("total harvested power sums every receiver") {
  std::mt19937_64 rng(21);
  auto p = SystemParams::defaults(3, 4);
  ChannelRealization c;
  c.h = random_vec(3, rng);
  for (int k = 0; k < 3; ++k) c.g.push_back(random_vec(3, rng));
  const auto s = sol(random_psd(3, rng), random_psd(3, rng), 0.6);
  double expect = harvested_power_desired(p, c, s).value;
  for (int k = 1; k <= 3; ++k) expect += harvested_power_idle(p, c, k, s);
  CHECK(total_harvested_power(p, c, s) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("feasibility report flags the violated constraint") {
  auto p = two_antennas(1e-3, 1e-3);
  p.p_min = 0.0;
  p.p_min_k = {0.0};
  const auto c = chan2(vec2(1, 0), vec2(0, 1));

  const auto zero = sol(diag2(0, 0), diag2(0, 0), 0.5);
  const auto rep = check_feasibility(p, c, zero);
  CHECK_FALSE(rep.feasible);
  CHECK(rep.worst_name == "C1");

  const auto big = sol(diag2(1.5 * p.p_max, 0), diag2(0, 0), 0.5);
  const auto rep2 = check_feasibility(p, c, big);
  CHECK_FALSE(rep2.feasible);
  bool c5 = false;
  for (const auto& s : rep2.slacks)
    if (s.name == "C5") c5 = s.slack < 0.0;
  CHECK(c5);
}

TEST_CASE("parameter validation") {
  auto ok = SystemParams::defaults();
  CHECK_NOTHROW(ok.validate());
  auto bad = ok;
  bad.eta = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.gamma_tol = {0.1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.gamma_req = 0.05;  // below gamma_tol
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.n_t = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("simulation defaults") {
  const auto p = SystemParams::defaults();
  CHECK(p.n_t == 6);
  CHECK(p.k_receivers == 4);
  CHECK(p.eta == 0.5);
  CHECK(p.gamma_req == doctest::Approx(db_to_linear(9.0)));
  CHECK(p.gamma_tol.size() == 3);
  CHECK(p.gamma_tol[0] == doctest::Approx(0.1));
  CHECK(p.epsilon == doctest::Approx(1.0 / 0.38));
  CHECK(p.p_c == doctest::Approx(1.0));
  CHECK(p.p_pg == doctest::Approx(10.0));
  CHECK(p.p_min == doctest::Approx(1e-3));
  CHECK(p.sigma_ant2 == doctest::Approx(dbm_to_watt(-114.0)));
  CHECK(p.sigma_s2 == doctest::Approx(dbm_to_watt(-23.0) + dbm_to_watt(-111.0)));
  CHECK(p.with_receivers(8).gamma_tol.size() == 7);
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
  CHECK(watt_to_dbm(1e-3) == doctest::Approx(0.0));
  CHECK(linear_to_db(db_to_linear(7.5)) == doctest::Approx(7.5));
}
