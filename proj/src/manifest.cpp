#include "oactl/manifest.hpp"

#include <ctime>
#include <fstream>

#include <json.hpp>

#include "oactl/errors.hpp"

namespace oactl {

std::string current_utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void save_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["tool_version"] = m.tool_version;
  j["experiment"] = m.experiment;
  j["config_path"] = m.config_path;
  j["seeds"] = {{"soundness", m.soundness_seed}, {"monte_carlo", m.monte_carlo_seed}};
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["artifacts"] = m.artifacts;
  j["alpha"] = {{"informed", m.alpha_informed}, {"uninformed", m.alpha_uninformed}};
  j["rollouts"] = {{"informed_ok", m.informed_rollout_ok},
                   {"uninformed_ok", m.uninformed_rollout_ok}};
  j["targets"] = {{"alpha_informed", {m.alpha_informed_lo, m.alpha_informed_hi}},
                  {"alpha_uninformed", {m.alpha_uninformed_lo, m.alpha_uninformed_hi}},
                  {"min_gap", m.min_gap},
                  {"met", m.targets_met}};

  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw InputError("failed while writing '" + path + "'");
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  try {
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.experiment = j.at("experiment").get<std::string>();
    m.config_path = j.at("config_path").get<std::string>();
    m.soundness_seed = j.at("seeds").at("soundness").get<std::uint64_t>();
    m.monte_carlo_seed = j.at("seeds").at("monte_carlo").get<std::uint64_t>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    m.alpha_informed = j.at("alpha").at("informed").get<double>();
    m.alpha_uninformed = j.at("alpha").at("uninformed").get<double>();
    m.informed_rollout_ok = j.at("rollouts").at("informed_ok").get<bool>();
    m.uninformed_rollout_ok = j.at("rollouts").at("uninformed_ok").get<bool>();
    m.alpha_informed_lo = j.at("targets").at("alpha_informed").at(0).get<double>();
    m.alpha_informed_hi = j.at("targets").at("alpha_informed").at(1).get<double>();
    m.alpha_uninformed_lo = j.at("targets").at("alpha_uninformed").at(0).get<double>();
    m.alpha_uninformed_hi = j.at("targets").at("alpha_uninformed").at(1).get<double>();
    m.min_gap = j.at("targets").at("min_gap").get<double>();
    m.targets_met = j.at("targets").at("met").get<bool>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": missing or malformed manifest field: " + e.what());
  }
}

}  // namespace oactl
