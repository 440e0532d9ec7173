#pragma once

#include <filesystem>

#include <json.hpp>

#include "qkdsim/protocol.hpp"
#include "qkdsim/sweep.hpp"

namespace qkdsim {

// Declarative JSON configs. Unknown keys and wrong types raise ConfigError
// naming the field path (e.g. "channel.fraction"). Missing keys keep the
// defaults of SessionConfig / SweepSpec.
//
// Session:
//   { "protocol": "BBM92" | "E91",
//     "source":   { "state": "PhiPlus", "epsilon": 0.785398, "hom_visibility": 1.0 },
//     "channel":  { "kind": "identity" }
//               | { "kind": "werner", "visibility": 0.9 }
//               | { "kind": "depolarizing", "p": 0.1, "arm": "A" | "B" | "both" }
//               | { "kind": "intercept_resend", "fraction": 1.0 },
//     "detector": { "efficiency": 0.6, "efficiency_b": 0.6, "dark_rate": 0, "window_pairs": 1 },
//     "n_pairs": 1000000, "qber_sample_fraction": 0.1, "seed": 1 }
//
// Sweep:
//   { "mechanism": "werner", "grid": [1.0, 0.9], "n_pairs": 100000,
//     "protocol": "BBM92", "state": "PhiPlus", "detector": { ... },
//     "outputs": ["S", "QBER", "I_AB", "I_AE", "r"], "seed": 1 }

SessionConfig session_config_from_json(const nlohmann::json& doc);
SweepSpec sweep_spec_from_json(const nlohmann::json& doc);

/// Reads and parses a JSON file. Relative paths that do not exist are also
/// looked up under $QKDSIM_CONFIG_DIR. Throws IoError / ConfigError.
nlohmann::json load_json_config(const std::filesystem::path& path);

inline constexpr const char* kConfigDirEnv = "QKDSIM_CONFIG_DIR";

}  // namespace qkdsim
