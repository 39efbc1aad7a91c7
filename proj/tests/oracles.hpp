#pragma once

// Reference computations that avoid the library's own estimators.

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "cutstock/dynamics.hpp"
#include "cutstock/lstd.hpp"

namespace cutstock::testing {

/// Demand law of a two-item instance: total uniform, item 0 binomial given the total.
inline std::vector<std::pair<Demand, double>> two_item_demand_law(const DemandSpec& spec) {
  std::vector<std::pair<Demand, double>> out;
  const double p = spec.p.at(0);
  const double per_total = 1.0 / (spec.d_max - spec.d_min + 1);
  for (int t = spec.d_min; t <= spec.d_max; ++t) {
    double choose = 1.0;
    for (int k = 0; k <= t; ++k) {
      if (k > 0) choose = choose * (t - k + 1) / k;
      double prob = choose * std::pow(p, k) * std::pow(1.0 - p, t - k);
      out.push_back({Demand{{k, t - k}}, per_total * prob});
    }
  }
  return out;
}

/// Index of every feasible (s, x) pair of a two-item instance with s enumerated by nested loops.
struct PairIndex {
  std::vector<std::pair<State, Decision>> pairs;
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> lookup;

  explicit PairIndex(const ProblemInstance& inst) {
    const int n = inst.pattern_count();
    for (int a = 0; a <= inst.s_max(); ++a) {
      for (int b = 0; b <= inst.s_max(); ++b) {
        State s{{a, b}};
        // Every x with entries in [0, x_max]; the feasibility test does the rest.
        std::vector<int> x(n, 0);
        for (;;) {
          Decision dx{x};
          if (is_feasible(inst, s, dx)) {
            lookup[{s.level, x}] = static_cast<int>(pairs.size());
            pairs.emplace_back(s, dx);
          }
          int j = n - 1;
          while (j >= 0 && x[j] == inst.x_max()) x[j--] = 0;
          if (j < 0) break;
          ++x[j];
        }
      }
    }
  }

  int at(const State& s, const Decision& x) const { return lookup.at({s.level, x.count}); }
};

/// q_pi over all feasible pairs from the dense system (I - gamma P_pi) q = c_bar.
inline Eigen::VectorXd tabular_q(const ProblemInstance& inst, const PairIndex& index, const DeterministicRule& rule,
                                 double gamma) {
  const auto law = two_item_demand_law(inst.demand());
  const int n = static_cast<int>(index.pairs.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd c_bar = Eigen::VectorXd::Zero(n);
  const auto& costs = inst.costs();
  for (int row = 0; row < n; ++row) {
    const auto& [s, x] = index.pairs[row];
    std::vector<int> avail = s.level;
    double trim = 0.0;
    for (int j = 0; j < inst.pattern_count(); ++j) {
      trim += costs.trim_cost[j] * x.count[j];
      for (int i = 0; i < 2; ++i) avail[i] += inst.patterns().counts[j][i] * x.count[j];
    }
    for (const auto& [d, prob] : law) {
      State next{{0, 0}};
      double c = trim;
      for (int i = 0; i < 2; ++i) {
        int left = avail[i] - d.qty[i];
        next.level[i] = left > 0 ? left : 0;
        c += left > 0 ? costs.holding_cost[i] * left : -costs.lost_sales_cost[i] * left;
      }
      c_bar[row] += prob * c;
      m(row, index.at(next, rule(next))) -= gamma * prob;
    }
  }
  return m.partialPivLu().solve(c_bar);
}

}  // namespace cutstock::testing
