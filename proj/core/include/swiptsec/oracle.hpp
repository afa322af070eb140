#pragma once

#include "swiptsec/model.hpp"

namespace swiptsec {

struct OracleOptions {
  int coarse_theta = 19;  // grid over [0, pi/2] for the amplitude angle
  int coarse_phi = 32;    // grid over [0, 2 pi) for the relative phase
  double rho_step = 0.01;
  int keep = 32;          // coarse candidates carried into refinement
  int refine_rounds = 20;
};

/// Best grid point of the original (rank-one) problem for N_t = 2.
struct OracleResult {
  bool feasible = false;
  double objective = 0.0;  // watt
  CVector w_dir;           // unit vectors
  CVector v_dir;
  double p_w = 0.0;
  double p_v = 0.0;
  double rho = 0.0;
  long evaluations = 0;

  BeamformingSolution as_solution() const;
};

/// Brute force over beamformer direction (angle x phase), artificial-noise
/// direction, split ratio on a `rho_step` grid, with the two powers found by
/// exact vertex enumeration of the remaining linear program. The best grid
/// cells are then polished by a shrinking pattern search, in which rho may
/// leave the grid. For two
/// antennas a rank-one noise covariance loses nothing: the values
/// (h^H V h, g^H V g, Tr V) of any 2x2 PSD V are attained by a rank-one one.
OracleResult brute_force_oracle(const SystemParams& params, const ChannelRealization& chan,
                                const OracleOptions& opts = {});

}  // namespace swiptsec
