#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cutstock/baselines.hpp"
#include "cutstock/harness.hpp"
#include "cutstock/instance.hpp"
#include "cutstock/trainer.hpp"

namespace cutstock {

inline constexpr const char* kBuiltinPaper = "builtin:paper";

/// Every recognised key with its default value. User files and overrides
/// may only set keys that appear here.
nlohmann::json default_run_config();

/// Sets one dotted path, e.g. "train.transitions=5000". Short aliases
/// (L1, L2, gamma, N1, N2, rho, seed) map onto their full paths. The value
/// is read as JSON when it parses, otherwise as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Defaults merged with `user`; throws ValidationError on unknown keys.
nlohmann::json merge_run_config(const nlohmann::json& user);
nlohmann::json load_run_config_file(const std::filesystem::path& path);

struct RunConfig {
  std::string instance_ref;
  std::filesystem::path output_root;
  int threads = 1;
  TrainConfig train;
  EvalConfig eval;
  std::vector<double> sweep_gammas;
  MyopicConfig myopic;
  nlohmann::json echo;  // fully merged document
};

/// Loads the instance named by doc["instance"] (relative paths resolve
/// against base_dir) and builds typed configs for it.
struct ResolvedRun {
  ProblemInstance instance;
  RunConfig config;
};
ResolvedRun resolve_run_config(const nlohmann::json& merged, const std::filesystem::path& base_dir);

ProblemInstance load_instance_ref(const std::string& ref, const std::filesystem::path& base_dir);

}  // namespace cutstock
