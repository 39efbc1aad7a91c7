#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cutstock/basis.hpp"
#include "cutstock/cem.hpp"
#include "cutstock/instance.hpp"
#include "cutstock/lstd.hpp"

namespace cutstock {

struct TrainConfig {
  double gamma = 0.8;
  int policy_iterations = 30;
  int transitions = 50'000;  // per policy iteration
  CemConfig cem;
  BasisSpec basis;
  std::uint64_t seed = 1;
  double theta0_stddev = 1.0;
  double ridge = 0.0;
  int threads = 1;  // not part of the result; any value gives identical output

  void validate(int items) const;
};

struct IterationDiagnostics {
  int iteration = 0;  // produces thetas[iteration] = theta^(iteration + 1)
  SolvePath path = SolvePath::exact;
  double condition = 0.0;
  int rank = 0;
  double theta_norm = 0.0;
  double mean_cost = 0.0;
  double wall_seconds = 0.0;  // logged only, never serialised
};

struct TrainRun {
  TrainConfig config;
  PolicyParams theta0;
  std::vector<PolicyParams> thetas;
  std::vector<IterationDiagnostics> diagnostics;
  bool complete = true;
  std::string failure;
};

using IterationCallback = std::function<void(const IterationDiagnostics&)>;

/// Approximate policy iteration. theta^(0) ~ N(0, theta0_stddev^2) i.i.d.;
/// iteration i evaluates the greedy policy of theta^(i) with sampled LSTD to
/// obtain theta^(i+1). All L1 parameter vectors are kept. Iteration i
/// samples from a stream derived from (seed, i) only, so changing L1 never
/// perturbs earlier iterations. A sampling failure stops the run and
/// returns the completed iterations with complete = false.
TrainRun train(const ProblemInstance& inst, const TrainConfig& cfg, const IterationCallback& on_iteration = {});

/// Exact policy iteration on an enumerable instance: evaluation by
/// evaluate_policy_exhaustive, improvement by exact_greedy_action. Stops
/// when theta repeats exactly or after max_iterations.
struct ExactIterationResult {
  std::vector<PolicyParams> thetas;
  bool converged = false;
};
ExactIterationResult policy_iteration_exhaustive(const ProblemInstance& inst, const FeatureMap& features,
                                                 double gamma, PolicyParams theta0, int max_iterations);

nlohmann::json basis_to_json(const BasisSpec& spec);
BasisSpec basis_from_json(const nlohmann::json& doc, int items, int s_max);
nlohmann::json cem_to_json(const CemConfig& cfg);
CemConfig cem_from_json(const nlohmann::json& doc);

/// Artifact document: format tag, instance, config echo, theta^(0), all
/// thetas at full precision and per-iteration diagnostics.
nlohmann::json run_to_json(const ProblemInstance& inst, const TrainRun& run);
struct LoadedRun {
  ProblemInstance instance;
  TrainRun run;
};
LoadedRun run_from_json(const nlohmann::json& doc);

void save_run(const ProblemInstance& inst, const TrainRun& run, const std::filesystem::path& path);
LoadedRun load_run(const std::filesystem::path& path);

inline constexpr const char* kRunFormat = "cutstock-train-run";
inline constexpr int kRunFormatVersion = 1;

}  // namespace cutstock
