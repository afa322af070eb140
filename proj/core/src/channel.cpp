#include "swiptsec/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swiptsec {

namespace {
constexpr double kSpeedOfLight = 299792458.0;

double free_space_db(double carrier_hz, double d) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * d * carrier_hz / kSpeedOfLight);
}
}  // namespace

void ChannelConfig::validate() const {
  if (!(carrier_hz > 0.0)) throw std::invalid_argument("ChannelConfig: carrier_hz must be > 0");
  if (!(ref_dist_m > 0.0 && ref_dist_m < max_dist_m))
    throw std::invalid_argument("ChannelConfig: need 0 < ref_dist_m < max_dist_m");
  if (!(exponent_near > 0.0 && exponent_far > 0.0))
    throw std::invalid_argument("ChannelConfig: exponents must be > 0");
  if (!(breakpoint_m > 0.0)) throw std::invalid_argument("ChannelConfig: breakpoint_m must be > 0");
}

PathLoss path_loss_db(const ChannelConfig& config, double distance_m) {
  PathLoss pl;
  double d = distance_m;
  if (d < config.ref_dist_m) {
    d = config.ref_dist_m;
    pl.clamped = true;
  }
  // Free space is anchored at 1 m with the near exponent, which reduces to
  // Friis for exponent 2.
  const double at_1m = free_space_db(config.carrier_hz, 1.0);
  if (d <= config.breakpoint_m) {
    pl.raw_db = at_1m + 10.0 * config.exponent_near * std::log10(d);
  } else {
    pl.raw_db = at_1m + 10.0 * config.exponent_near * std::log10(config.breakpoint_m) +
                10.0 * config.exponent_far * std::log10(d / config.breakpoint_m);
  }
  pl.net_db = pl.raw_db - config.antenna_gain_db;
  return pl;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double PortableRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

cdouble PortableRng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

CVector draw_small_scale(const ChannelConfig& config, int n_t, PortableRng& rng) {
  const double kappa = db_to_linear(config.rician_k_db);
  double los = 1.0;
  double nlos = 0.0;
  if (std::isfinite(kappa)) {
    los = std::sqrt(kappa / (kappa + 1.0));
    nlos = std::sqrt(1.0 / (kappa + 1.0));
  }
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const cdouble steer = std::polar(1.0, phase);
  CVector v(n_t);
  for (int i = 0; i < n_t; ++i) {
    const cdouble n = rng.complex_normal();
    v(i) = los * steer + nlos * n;
  }
  return v;
}

ReceiverDraw draw_receiver(const ChannelConfig& config, int n_t, std::uint64_t seed, int index) {
  PortableRng rng(mix_seed(seed, static_cast<std::uint64_t>(index)));
  ReceiverDraw r;
  r.distance_m = rng.uniform(config.ref_dist_m, config.max_dist_m);
  r.path_gain = path_gain_linear(path_loss_db(config, r.distance_m));
  r.small_scale = draw_small_scale(config, n_t, rng);
  r.channel = std::sqrt(r.path_gain) * r.small_scale;
  return r;
}

ChannelRealization draw_channel(const SystemParams& params, const ChannelConfig& config,
                                std::uint64_t seed) {
  config.validate();
  ChannelRealization chan;
  chan.seed = seed;
  chan.h = draw_receiver(config, params.n_t, seed, 0).channel;
  chan.g.reserve(static_cast<std::size_t>(params.eavesdroppers()));
  for (int k = 1; k <= params.eavesdroppers(); ++k)
    chan.g.push_back(draw_receiver(config, params.n_t, seed, k).channel);
  return chan;
}

}  // namespace swiptsec
