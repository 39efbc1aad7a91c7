#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cutstock/dynamics.hpp"
#include "cutstock/instance.hpp"
#include "cutstock/policy.hpp"
#include "cutstock/trainer.hpp"

namespace cutstock {

struct EvalConfig {
  int replications = 10;
  int horizon = 200;
  std::uint64_t seed = 1;
  int bootstrap_resamples = 1000;
  double confidence = 0.95;
  double discount = 0.8;     // only for the logged discounted return
  bool record_traces = true;
  int threads = 1;

  void validate() const;
};

struct StepRecord {
  State state;
  Decision decision;
  std::vector<int> available;  // post-decision inventory s + A x
  Demand demand;
  State next;
  double cost = 0.0;
};

struct ReplicationResult {
  std::vector<double> costs;  // c_{t+1} for t < horizon
  double average = 0.0;       // undiscounted per-step mean
  double discounted = 0.0;
  std::vector<StepRecord> trace;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct EvalReport {
  std::string policy;
  std::vector<ReplicationResult> replications;
  double mean = 0.0;  // mean of replication averages
  Interval ci;
  std::vector<double> rolling;  // rolling average cost, averaged over replications
};

/// Per replication r: s_0 uniform, then horizon steps of decide / demand /
/// cost / transition. The initial state, the demand sequence and the
/// policy's own randomness come from three streams derived from (seed, r),
/// so every policy faces the same demand trajectories.
EvalReport simulate(const ProblemInstance& inst, const Policy& policy, const EvalConfig& cfg);

/// Percentile bootstrap of the sample mean. The interval is widened to
/// contain the sample mean if resampling noise leaves it outside.
Interval bootstrap_ci(std::span<const double> values, int resamples, double confidence, RngStream rng);

/// rolling[t] = (c_0 + ... + c_t) / (t + 1).
std::vector<double> rolling_average(std::span<const double> costs);

struct Reevaluation {
  int best_index = 0;
  std::vector<EvalReport> reports;
};

/// Simulates the cross-entropy greedy policy of every theta in the run and
/// picks the lowest mean cost (first index on ties).
Reevaluation reevaluate_run(const ProblemInstance& inst, const TrainRun& run, const CemConfig& cem,
                            const EvalConfig& cfg);

struct SweepRow {
  double gamma = 0.0;
  int best_index = 0;
  double mean = 0.0;
  Interval ci;
};

/// Trains and re-evaluates once per discount factor. The training seed for
/// each gamma is derived from (base.seed, gamma), so rows do not depend on
/// the order of the list.
std::vector<SweepRow> sweep_gamma(const ProblemInstance& inst, std::span<const double> gammas,
                                  const TrainConfig& base, const EvalConfig& eval,
                                  const IterationCallback& on_iteration = {});

std::uint64_t sweep_seed(std::uint64_t base_seed, double gamma);

void write_costs_csv(const std::filesystem::path& path, const EvalReport& report);
void write_summary_csv(const std::filesystem::path& path, std::span<const EvalReport> reports);
/// Replication 0 trace: initial inventory, available inventory after cutting, demand.
void write_inventory_csv(const std::filesystem::path& path, const EvalReport& report);
void write_gamma_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);

struct Series {
  std::string label;
  std::vector<double> values;
};
/// Minimal standalone SVG line chart.
void write_svg_chart(const std::filesystem::path& path, const std::string& title, std::span<const Series> series,
                     bool log_scale = false);

}  // namespace cutstock
