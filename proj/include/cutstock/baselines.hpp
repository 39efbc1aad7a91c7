#pragma once

#include <atomic>
#include <span>
#include <vector>

#include "cutstock/dynamics.hpp"
#include "cutstock/instance.hpp"
#include "cutstock/policy.hpp"

namespace cutstock {

/// E[d_i] = p_i * (d_min + d_max) / 2.
std::vector<double> expected_demand(const DemandSpec& demand);

struct CoverOptions {
  /// Also enforce sum(x) <= x_max and s + A x <= s_max.
  bool enforce_capacity = false;
  /// Coverage rows to impose; empty means every item.
  std::vector<int> rows;
  long node_cap = 2'000'000;
};

struct CoverSolution {
  Decision x;
  double objective = 0.0;
  bool feasible = false;        // an integer solution meeting every imposed row was found
  bool proven_optimal = false;  // search finished within the node cap
  long nodes = 0;
};

/// min sum_j g_j x_j  s.t.  s_i + sum_j a_ij x_j >= target_i,  x integer >= 0.
/// Depth-first branch and bound over patterns in ascending g order. Bounds
/// need no LP: the remaining cost is at least max_i r_i * min_j g_j / a_ij
/// over the patterns still free, and no pattern needs more copies than it
/// takes to cover the largest residual row it touches on its own.
CoverSolution solve_cover_ilp(const ProblemInstance& inst, const State& s, std::span<const double> target,
                              const CoverOptions& options = {});

struct MyopicConfig {
  std::vector<double> d_bar;
  long node_cap = 2'000'000;
};

MyopicConfig default_myopic_config(const ProblemInstance& inst);

struct MyopicOutcome {
  Decision x;
  double objective = 0.0;
  bool clipped = false;         // unconstrained optimum violated the feasible set
  bool node_cap_hit = false;
  std::vector<int> dropped_rows;  // coverage rows abandoned while clipping
};

/// Solves the covering ILP as written. If its optimum is not feasible for s
/// the ILP is re-solved with the capacity constraints added, keeping
/// coverage rows in order of largest residual requirement first and
/// dropping any row that cannot be kept alongside those already retained.
MyopicOutcome myopic_decide(const ProblemInstance& inst, const State& s, const MyopicConfig& cfg);

Decision random_decide(const ProblemInstance& inst, const State& s, RngStream& rng);

class MyopicPolicy final : public Policy {
 public:
  explicit MyopicPolicy(MyopicConfig cfg) : cfg_(std::move(cfg)) {}

  Decision decide(const ProblemInstance& inst, const State& s, RngStream& rng) const override;
  std::string name() const override { return "myopic"; }

  long clipped_periods() const { return clipped_.load(); }

 private:
  MyopicConfig cfg_;
  mutable std::atomic<long> clipped_{0};
};

class RandomPolicy final : public Policy {
 public:
  Decision decide(const ProblemInstance& inst, const State& s, RngStream& rng) const override {
    return random_decide(inst, s, rng);
  }
  std::string name() const override { return "random"; }
};

}  // namespace cutstock
