#pragma once

// Small enumerable instances shared by the test suites.

#include "cutstock/instance.hpp"
#include "cutstock/rng.hpp"

namespace cutstock::testing {

/// Two items, two patterns, finite demand support.
inline ProblemInstance micro_instance(int s_max = 3, int x_max = 2, int d_min = 0, int d_max = 2) {
  ItemCatalog catalog{{4, 3}};
  PatternMatrix patterns;
  patterns.object_length = 10;
  patterns.counts = {{2, 0}, {1, 2}};  // trims 2 and 0
  CostSpec costs{{0.2, 0.05}, {0.04, 0.03}, {4.0, 3.0}};
  return ProblemInstance(catalog, patterns, costs, CapacityBounds{s_max, x_max}, DemandSpec{{0.6, 0.4}, d_min, d_max});
}

/// Random micro instance with m items and n patterns; every pattern fits.
inline ProblemInstance random_micro_instance(RngStream& rng, int m, int n, int s_max, int x_max) {
  ItemCatalog catalog;
  for (int i = 0; i < m; ++i) catalog.lengths.push_back(static_cast<int>(rng.uniform_int(2, 9)));
  PatternMatrix patterns;
  patterns.object_length = 20;
  while (static_cast<int>(patterns.counts.size()) < n) {
    std::vector<int> column(m, 0);
    int used = 0;
    bool any = false;
    for (int i = 0; i < m; ++i) {
      int room = (patterns.object_length - used) / catalog.lengths[i];
      int take = static_cast<int>(rng.uniform_int(0, std::min(room, 3)));
      column[i] = take;
      used += take * catalog.lengths[i];
      any = any || take > 0;
    }
    if (any) patterns.counts.push_back(column);
  }
  std::vector<int> trim = compute_trim(patterns, catalog);
  CostSpec costs;
  for (int t : trim) costs.trim_cost.push_back(0.1 * t + 0.05 * static_cast<double>(rng.uniform_int(0, 10)));
  for (int l : catalog.lengths) {
    costs.holding_cost.push_back(0.01 * l);
    costs.lost_sales_cost.push_back(1.0 * l);
  }
  std::vector<double> p(m, 1.0 / m);
  double sum = 0.0;
  for (int i = 0; i + 1 < m; ++i) sum += p[i];
  p[m - 1] = 1.0 - sum;
  return ProblemInstance(catalog, patterns, costs, CapacityBounds{s_max, x_max}, DemandSpec{p, 0, 3});
}

}  // namespace cutstock::testing
