#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swiptsec/model.hpp"
#include "swiptsec/sdp.hpp"

namespace swiptsec {

enum class EncodingKind { Relaxed, Sub1, Baseline1, Baseline2 };

std::string to_string(EncodingKind k);

enum class Sense { GreaterEq, LessEq };

/// A named resource-allocation constraint and where it lives in the SDP.
///
/// The physical Lagrange multiplier (for the constraint written with unit
/// coefficient on its leading trace term, in watt) is
/// `multiplier_scale * y[row]`; the sign for <= rows is folded in.
struct NamedRow {
  std::string name;  // C1, C2[k], C3, C4[k] / C10[k], C5, C6, C7.lo, C7.hi
  int row = -1;
  Sense sense = Sense::GreaterEq;
  double multiplier_scale = 1.0;
  int slack_index = -1;  // position in the slack block
};

/// Internal units: W and V are divided by `power_scale`; each receiver row
/// is divided by `power_scale * ||c||^2` so that its channel enters with
/// unit norm (`channel_scale` holds that divisor per receiver, 0 = desired).
struct ProblemEncoding {
  sdp::SdpProblem sdp;
  EncodingKind kind = EncodingKind::Relaxed;
  std::optional<double> fixed_rho;
  double power_scale = 1.0;
  std::vector<double> channel_scale;

  int w_block = -1;
  int v_block = -1;        // holds V, or the null-space coordinates Q for baselines
  int slack_block = -1;
  int sinr_block = -1;     // [[t1, sqrt(G sigma_s^2)], [., rho]]
  int harvest_block = -1;  // [[t2, sqrt(P_min/eta)], [., 1 - rho]]
  CMatrix v_basis;         // V = v_basis * Q * v_basis^H

  std::vector<NamedRow> rows;
  std::vector<std::string> row_notes;  // one per solver row

  const NamedRow* find(const std::string& name) const;
  int named_row_count() const { return static_cast<int>(rows.size()); }
  bool uses_c10() const { return kind == EncodingKind::Sub1; }
};

/// Relaxed problem: C9 dropped; C1 and C3 carry their 1/rho and 1/(1-rho)
/// terms through 2x2 PSD blocks; rows with P_min = 0 (or P_min_k = 0) are
/// omitted.
ProblemEncoding build_relaxed(const SystemParams& params, const ChannelRealization& chan);

/// Relaxed problem with C4 replaced by C10 (idle-receiver harvest from the
/// artificial noise alone).
ProblemEncoding build_sub1(const SystemParams& params, const ChannelRealization& chan);

/// Artificial noise confined to the orthogonal complement of h. Without
/// `fixed_rho` the split ratio is optimized (Baseline1); otherwise it is
/// fixed and C1/C3 become linear (Baseline2 uses 0.5).
ProblemEncoding build_baseline(const SystemParams& params, const ChannelRealization& chan,
                               std::optional<double> fixed_rho = std::nullopt);

/// Relaxed or Sub1 problem at a fixed split ratio (linear C1/C3).
ProblemEncoding build_fixed_rho(const SystemParams& params, const ChannelRealization& chan,
                                EncodingKind kind, double rho);

/// Adds the block [[t, c], [c, r]] >= 0 (so t r >= c^2, t, r >= 0) with the
/// off-diagonal pinned to c. Returns the block index.
int add_hyperbolic_block(sdp::SdpProblem& sdp, double c, const std::string& label);

/// Orthonormal basis (n x n-1) of the orthogonal complement of h, from a
/// column-pivoted QR of the projector I - h h^H / ||h||^2.
CMatrix null_space_basis(const CVector& h);

struct DecodedSolution {
  CMatrix W;
  CMatrix V;
  double rho = 1.0;
  double objective = 0.0;  // Tr W + Tr V in watt
};

/// Unscaled (W, V, rho). Throws NumericalFailure if an embedded block lost
/// its complex structure.
DecodedSolution decode(const ProblemEncoding& enc, const sdp::SdpSolution& sol);

/// Sparse text dump of the SDP with each row annotated by its constraint name.
void write_encoding(std::ostream& os, const ProblemEncoding& enc);

}  // namespace swiptsec
