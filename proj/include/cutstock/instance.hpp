#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace cutstock {

/// Item types demanded by customers; lengths in cm.
struct ItemCatalog {
  std::vector<int> lengths;

  int size() const { return static_cast<int>(lengths.size()); }
  bool operator==(const ItemCatalog&) const = default;
};

/// Cutting patterns stored column-per-pattern: counts[j][i] is the number of
/// items of type i obtained from one object cut with pattern j.
struct PatternMatrix {
  int object_length = 0;
  std::vector<std::vector<int>> counts;
  std::vector<int> trim;

  int size() const { return static_cast<int>(counts.size()); }
  int yield(int item, int pattern) const { return counts[pattern][item]; }
  bool operator==(const PatternMatrix&) const = default;
};

struct CostSpec {
  std::vector<double> trim_cost;     // g_j, per object cut with pattern j
  std::vector<double> holding_cost;  // h+_i, per item carried to next period
  std::vector<double> lost_sales_cost;  // h-_i, per unit of unmet demand
  bool operator==(const CostSpec&) const = default;
};

struct CapacityBounds {
  int s_max = 0;  // per-item inventory ceiling
  int x_max = 0;  // objects available per period
  bool operator==(const CapacityBounds&) const = default;
};

/// Total demand ~ DiscUnif(d_min, d_max), split across items ~ Multinomial(total, p).
struct DemandSpec {
  std::vector<double> p;
  int d_min = 0;
  int d_max = 0;
  bool operator==(const DemandSpec&) const = default;
};

/// Multipliers used to build costs from item lengths and pattern trims.
struct CostFactors {
  double holding = 0.01;
  double lost_sales = 1.0;
  double trim = 0.1;
};

class ProblemInstance {
 public:
  /// Validates every invariant; throws ValidationError on the first failure.
  ProblemInstance(ItemCatalog catalog, PatternMatrix patterns, CostSpec costs,
                  CapacityBounds bounds, DemandSpec demand);

  const ItemCatalog& catalog() const { return catalog_; }
  const PatternMatrix& patterns() const { return patterns_; }
  const CostSpec& costs() const { return costs_; }
  const CapacityBounds& bounds() const { return bounds_; }
  const DemandSpec& demand() const { return demand_; }

  int items() const { return catalog_.size(); }
  int pattern_count() const { return patterns_.size(); }
  int s_max() const { return bounds_.s_max; }
  int x_max() const { return bounds_.x_max; }

  bool operator==(const ProblemInstance&) const = default;

 private:
  ItemCatalog catalog_;
  PatternMatrix patterns_;
  CostSpec costs_;
  CapacityBounds bounds_;
  DemandSpec demand_;
};

/// object_length - sum_i counts[j][i] * lengths[i] per pattern. Throws
/// ValidationError if a pattern does not fit in the object.
std::vector<int> compute_trim(const PatternMatrix& patterns, const ItemCatalog& catalog);

/// Builds g, h+, h- from the factors: h+ = holding*l, h- = lost_sales*l, g = trim*trim_j.
CostSpec costs_from_factors(const ItemCatalog& catalog, const std::vector<int>& trim,
                            const CostFactors& factors);

/// Steel-bar dataset: 7 item types, 15 handcrafted patterns, 1500 cm stock.
ProblemInstance default_paper_instance();

ProblemInstance instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const ProblemInstance& inst);

ProblemInstance load_instance(const std::filesystem::path& path);
void save_instance(const ProblemInstance& inst, const std::filesystem::path& path);

}  // namespace cutstock
