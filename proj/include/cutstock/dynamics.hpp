#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cutstock/instance.hpp"
#include "cutstock/rng.hpp"

namespace cutstock {

/// Inventory per item at the start of a period.
struct State {
  std::vector<int> level;
  bool operator==(const State&) const = default;
};

/// Objects cut per pattern in a period.
struct Decision {
  std::vector<int> count;
  int total() const;
  bool operator==(const Decision&) const = default;
};

/// Units demanded per item during a period.
struct Demand {
  std::vector<int> qty;
  int total() const;
  bool operator==(const Demand&) const = default;
};

struct CostBreakdown {
  double trim = 0.0;
  double holding = 0.0;
  double lost_sales = 0.0;
  double total() const { return trim + holding + lost_sales; }
};

inline constexpr int kDefaultRejectionCap = 10'000;

State zero_state(const ProblemInstance& inst);
Decision zero_decision(const ProblemInstance& inst);
/// Decision cutting `objects` objects with pattern `pattern`.
Decision single_pattern(const ProblemInstance& inst, int pattern, int objects = 1);

/// Available inventory after cutting, before demand: s + A x.
std::vector<int> post_decision(const ProblemInstance& inst, const State& s, const Decision& x);

/// s'_i = max(0, s_i + (A x)_i - d_i). Requires is_feasible(s, x).
State transition(const ProblemInstance& inst, const State& s, const Decision& x, const Demand& d);

CostBreakdown cost_terms(const ProblemInstance& inst, const State& s, const Decision& x, const Demand& d);
double cost(const ProblemInstance& inst, const State& s, const Decision& x, const Demand& d);

/// s + A x <= s_max componentwise, sum(x) <= x_max, x >= 0.
bool is_feasible(const ProblemInstance& inst, const State& s, const Decision& x);
bool is_valid_state(const ProblemInstance& inst, const State& s);

/// Each component ~ DiscUnif(0, s_max) independently.
State sample_state(const ProblemInstance& inst, RngStream& rng);

/// Total ~ DiscUnif(d_min, d_max), then a multinomial split by sequential
/// categorical draws.
Demand sample_demand(const ProblemInstance& inst, RngStream& rng);

/// Repeats {total ~ DiscUnif(0, x_max); x ~ Multinomial(total, probs)} until
/// x is feasible for s. A draw is abandoned as soon as some item exceeds
/// s_max, since adding objects can only raise the post-decision state.
Decision sample_feasible_decision(const ProblemInstance& inst, const State& s, const Categorical& probs, RngStream& rng,
                                  int rejection_cap = kDefaultRejectionCap);
Decision sample_feasible_decision(const ProblemInstance& inst, const State& s, std::span<const double> probs,
                                  RngStream& rng, int rejection_cap = kDefaultRejectionCap);

std::vector<double> uniform_probs(int n);

// Exhaustive enumeration, only practical for micro instances.

/// Every demand vector in the support together with its probability.
std::vector<std::pair<Demand, double>> enumerate_demand(const DemandSpec& spec);
/// All states in {0..s_max}^m in lexicographic order.
std::vector<State> enumerate_states(const ProblemInstance& inst);
/// All feasible decisions for s in lexicographic order (zero first).
std::vector<Decision> enumerate_feasible(const ProblemInstance& inst, const State& s);

}  // namespace cutstock
