#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace oactl {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance record written by the end-to-end reproduction command.  Two runs
// with identical configs and seeds produce identical manifests except for the
// started_at / finished_at timestamps.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string experiment;   // "exp1" | "exp2" | config stem
  std::string config_path;
  std::uint64_t soundness_seed = 0;
  std::uint64_t monte_carlo_seed = 0;
  std::string started_at;   // ISO 8601 UTC
  std::string finished_at;

  // Logical name -> path, e.g. "overapprox" -> "out/exp1.oa".
  std::map<std::string, std::string> artifacts;

  double alpha_informed = 0.0;
  double alpha_uninformed = 0.0;
  bool informed_rollout_ok = false;
  bool uninformed_rollout_ok = false;

  // Target band checked by the reproduction run.
  double alpha_informed_lo = 0.0, alpha_informed_hi = 0.0;
  double alpha_uninformed_lo = 0.0, alpha_uninformed_hi = 0.0;
  double min_gap = 0.0;
  bool targets_met = false;
};

std::string current_utc_timestamp();

void save_manifest(const RunManifest& manifest, const std::string& path);
RunManifest load_manifest(const std::string& path);

}  // namespace oactl
