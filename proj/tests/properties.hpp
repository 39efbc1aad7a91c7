#pragma once

// Checks shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cutstock/dynamics.hpp"

namespace cutstock::testing {

/// Upper 0.001 quantile of chi-square with 10 degrees of freedom.
inline constexpr double kChiSquare10At001 = 29.58829844507442;

struct PropertyReport {
  int samples = 0;
  int violations = 0;
  std::string first;
};

/// Draws (s, x, d) triples and checks the transition and cost contracts on each.
inline PropertyReport dynamics_properties(const ProblemInstance& inst, RngStream rng, int samples) {
  PropertyReport report;
  report.samples = samples;
  auto fail = [&](const std::string& what) {
    if (report.violations++ == 0) report.first = what;
  };
  const auto probs = uniform_probs(inst.pattern_count());
  const auto& c = inst.costs();
  for (int k = 0; k < samples; ++k) {
    RngStream step = rng.derive(k);
    State s = sample_state(inst, step);
    Decision x = sample_feasible_decision(inst, s, probs, step);
    Demand d = sample_demand(inst, step);
    if (!is_feasible(inst, s, x)) fail("sampled decision infeasible");
    std::vector<int> available = post_decision(inst, s, x);
    State next = transition(inst, s, x, d);
    CostBreakdown terms = cost_terms(inst, s, x, d);
    if (!is_valid_state(inst, next)) fail("next state leaves [0, s_max]");
    double expected_holding = 0.0, expected_lost = 0.0, expected_trim = 0.0;
    for (int i = 0; i < inst.items(); ++i) {
      if (available[i] > inst.s_max()) fail("post-decision state above s_max");
      if (next.level[i] != std::max(0, available[i] - d.qty[i])) fail("transition is not max(0, s + Ax - d)");
      if (next.level[i] > available[i]) fail("demand increased inventory");
      int over = available[i] - d.qty[i];
      expected_holding += over > 0 ? c.holding_cost[i] * over : 0.0;
      expected_lost += over < 0 ? c.lost_sales_cost[i] * -over : 0.0;
      if (over > 0 && next.level[i] == 0) fail("holding item with zero carried stock");
    }
    for (int j = 0; j < inst.pattern_count(); ++j) expected_trim += c.trim_cost[j] * x.count[j];
    if (terms.trim < 0 || terms.holding < 0 || terms.lost_sales < 0) fail("negative cost term");
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)); };
    if (!close(terms.trim, expected_trim) || !close(terms.holding, expected_holding) ||
        !close(terms.lost_sales, expected_lost)) {
      fail("cost terms disagree with direct evaluation");
    }
    if (!close(cost(inst, s, x, d), terms.total())) fail("cost is not the sum of its terms");
    // Monotonicity: one extra unit of demand on item 0 never raises the next state.
    Demand more = d;
    ++more.qty[0];
    State next_more = transition(inst, s, x, more);
    for (int i = 0; i < inst.items(); ++i) {
      if (next_more.level[i] > next.level[i]) fail("transition not monotone in demand");
    }
    // The zero decision is feasible from every reachable state.
    if (!is_feasible(inst, next, zero_decision(inst))) fail("zero decision infeasible at next state");
  }
  return report;
}

struct DemandStats {
  double chi_square = 0.0;
  std::vector<double> share;  // aggregate share of each item
  bool totals_in_range = true;
};

inline DemandStats demand_statistics(const ProblemInstance& inst, RngStream rng, int draws) {
  const DemandSpec& spec = inst.demand();
  const int bins = spec.d_max - spec.d_min + 1;
  std::vector<long> hist(bins, 0);
  std::vector<double> per_item(inst.items(), 0.0);
  double units = 0.0;
  DemandStats out;
  for (int k = 0; k < draws; ++k) {
    Demand d = sample_demand(inst, rng);
    int total = d.total();
    if (total < spec.d_min || total > spec.d_max) {
      out.totals_in_range = false;
      continue;
    }
    ++hist[total - spec.d_min];
    for (int i = 0; i < inst.items(); ++i) per_item[i] += d.qty[i];
    units += total;
  }
  const double expected = static_cast<double>(draws) / bins;
  for (long h : hist) out.chi_square += (h - expected) * (h - expected) / expected;
  for (double v : per_item) out.share.push_back(v / units);
  return out;
}

}  // namespace cutstock::testing
