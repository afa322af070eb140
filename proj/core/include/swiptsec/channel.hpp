#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "swiptsec/model.hpp"

namespace swiptsec {

/// Indoor propagation setup: dual-slope path loss (free space up to the
/// breakpoint, steeper beyond) with Rician small-scale fading.
struct ChannelConfig {
  double carrier_hz = 470e6;
  double ref_dist_m = 2.0;
  double max_dist_m = 10.0;
  double antenna_gain_db = 20.0;  // 10 dB transmit + 10 dB receive
  double rician_k_db = 6.0;
  double breakpoint_m = 5.0;
  double exponent_near = 2.0;
  double exponent_far = 3.5;

  void validate() const;
};

struct PathLoss {
  double raw_db = 0.0;  // before antenna gain
  double net_db = 0.0;  // raw_db - antenna_gain_db
  bool clamped = false;  // distance was below the reference distance
};

PathLoss path_loss_db(const ChannelConfig& config, double distance_m);

inline double path_gain_linear(const PathLoss& pl) { return db_to_linear(-pl.net_db); }

/// SplitMix64 finalizer; used to derive independent per-receiver streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable sampling on top of mt19937_64 (the standard pins its output
/// sequence; the standard distributions are not pinned, so they are avoided).
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();   // N(0, 1), Box-Muller
  cdouble complex_normal();  // CN(0, 1)

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct ReceiverDraw {
  double distance_m = 0.0;
  double path_gain = 0.0;  // linear
  CVector small_scale;     // unit average power per element
  CVector channel;         // sqrt(path_gain) * small_scale
};

/// Rician vector sqrt(k/(k+1)) e^{j phi} 1 + sqrt(1/(k+1)) n, n ~ CN(0, I).
CVector draw_small_scale(const ChannelConfig& config, int n_t, PortableRng& rng);

/// Receiver `index` (0 = desired) drawn from its own stream of `seed`.
ReceiverDraw draw_receiver(const ChannelConfig& config, int n_t, std::uint64_t seed, int index);

ChannelRealization draw_channel(const SystemParams& params, const ChannelConfig& config,
                                std::uint64_t seed);

}  // namespace swiptsec
