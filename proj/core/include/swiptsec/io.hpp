#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "swiptsec/certify.hpp"
#include "swiptsec/channel.hpp"
#include "swiptsec/model.hpp"
#include "swiptsec/schemes.hpp"

namespace swiptsec {

// JSON layouts. Complex numbers are [re, im] pairs, vectors arrays of pairs,
// matrices arrays of rows. Powers in watt, SINRs linear.
//
// params:   {"n_t", "k_receivers", "sigma_s2", "sigma_ant2", "eta",
//            "gamma_req", "gamma_tol": [...], "p_min", "p_min_k": [...],
//            "p_max", "p_pg", "p_c", "epsilon"}
//           Missing keys take SystemParams::defaults(); "gamma_req_db" may
//           replace "gamma_req". Scalar "gamma_tol" / "p_min_k" are broadcast.
// instance: {"params": {...}, "channel_config": {...}, "seed": n,
//            "h": [...], "g": [[...], ...]}
// solution: {"scheme", "status", "provenance", "objective_w", "rho",
//            "rank_ratio", "W", "V", "w" (or null), "detail",
//            "duals": {...} (optional)}

std::string params_to_json(const SystemParams& p);
SystemParams params_from_json(const std::string& text);

std::string channel_config_to_json(const ChannelConfig& c);
ChannelConfig channel_config_from_json(const std::string& text);

struct Instance {
  SystemParams params;
  ChannelConfig config;
  ChannelRealization chan;
};

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

struct StoredSolution {
  std::string scheme;
  BeamformingSolution solution;
  Provenance provenance = Provenance::NotApplicable;
  std::optional<DualCertificate> duals;
};

std::string solution_to_json(SchemeKind scheme, const SchemeResult& result);
StoredSolution solution_from_json(const std::string& text);

std::string certificate_to_json(const DualCertificate& cert);

/// Throws std::runtime_error naming the path on I/O failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace swiptsec
