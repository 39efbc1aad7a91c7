#include "cutstock/instance.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cutstock/errors.hpp"

namespace cutstock {

namespace {

using nlohmann::json;

std::string pattern_label(int j) { return "pattern " + std::to_string(j + 1); }
std::string item_label(int i) { return "item " + std::to_string(i + 1); }

void check_nonneg(const std::vector<double>& v, const std::string& what) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k]) || v[k] < 0.0) {
      throw ValidationError(what + "[" + std::to_string(k + 1) + "] must be a finite non-negative number");
    }
  }
}

template <typename T>
T read_field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::vector<int> compute_trim(const PatternMatrix& patterns, const ItemCatalog& catalog) {
  std::vector<int> trim(patterns.counts.size());
  for (std::size_t j = 0; j < patterns.counts.size(); ++j) {
    const auto& column = patterns.counts[j];
    if (column.size() != catalog.lengths.size()) {
      throw ContractViolation(pattern_label(static_cast<int>(j)) + " has " + std::to_string(column.size()) +
                              " entries, expected " + std::to_string(catalog.lengths.size()));
    }
    long used = 0;
    for (std::size_t i = 0; i < column.size(); ++i) used += static_cast<long>(column[i]) * catalog.lengths[i];
    long rest = patterns.object_length - used;
    if (rest < 0) {
      throw ValidationError(pattern_label(static_cast<int>(j)) + " exceeds object length (" + std::to_string(used) +
                            " > " + std::to_string(patterns.object_length) + ")");
    }
    trim[j] = static_cast<int>(rest);
  }
  return trim;
}

CostSpec costs_from_factors(const ItemCatalog& catalog, const std::vector<int>& trim, const CostFactors& factors) {
  CostSpec c;
  for (int l : catalog.lengths) {
    c.holding_cost.push_back(factors.holding * l);
    c.lost_sales_cost.push_back(factors.lost_sales * l);
  }
  for (int t : trim) c.trim_cost.push_back(factors.trim * t);
  return c;
}

ProblemInstance::ProblemInstance(ItemCatalog catalog, PatternMatrix patterns, CostSpec costs, CapacityBounds bounds,
                                 DemandSpec demand)
    : catalog_(std::move(catalog)),
      patterns_(std::move(patterns)),
      costs_(std::move(costs)),
      bounds_(bounds),
      demand_(std::move(demand)) {
  const int m = catalog_.size();
  if (m < 1) throw ValidationError("at least one item type is required");
  if (patterns_.object_length <= 0) throw ValidationError("object length must be positive");
  for (int i = 0; i < m; ++i) {
    int l = catalog_.lengths[i];
    if (l <= 0) throw ValidationError(item_label(i) + " length must be positive");
    if (l > patterns_.object_length) throw ValidationError(item_label(i) + " is longer than the stock object");
  }

  const int n = patterns_.size();
  if (n < 1) throw ValidationError("at least one cutting pattern is required");
  for (int j = 0; j < n; ++j) {
    const auto& column = patterns_.counts[j];
    if (static_cast<int>(column.size()) != m) {
      throw ValidationError(pattern_label(j) + " has " + std::to_string(column.size()) + " entries, expected " +
                            std::to_string(m));
    }
    bool any = false;
    for (int a : column) {
      if (a < 0) throw ValidationError(pattern_label(j) + " has a negative count");
      any = any || a > 0;
    }
    if (!any) throw ValidationError(pattern_label(j) + " is empty (all counts zero)");
  }
  std::vector<int> trim = compute_trim(patterns_, catalog_);
  if (patterns_.trim.empty()) {
    patterns_.trim = trim;
  } else {
    if (static_cast<int>(patterns_.trim.size()) != n) throw ValidationError("trim has wrong length");
    for (int j = 0; j < n; ++j) {
      if (patterns_.trim[j] != trim[j]) {
        throw ValidationError(pattern_label(j) + " declares trim " + std::to_string(patterns_.trim[j]) +
                              " but computed trim is " + std::to_string(trim[j]));
      }
    }
  }

  if (static_cast<int>(costs_.trim_cost.size()) != n) throw ValidationError("trim cost vector must have one entry per pattern");
  if (static_cast<int>(costs_.holding_cost.size()) != m) throw ValidationError("holding cost vector must have one entry per item");
  if (static_cast<int>(costs_.lost_sales_cost.size()) != m) {
    throw ValidationError("lost-sales cost vector must have one entry per item");
  }
  check_nonneg(costs_.trim_cost, "trim cost");
  check_nonneg(costs_.holding_cost, "holding cost");
  check_nonneg(costs_.lost_sales_cost, "lost-sales cost");

  if (bounds_.s_max < 1) throw ValidationError("s_max must be at least 1");
  if (bounds_.x_max < 1) throw ValidationError("x_max must be at least 1");

  if (static_cast<int>(demand_.p.size()) != m) throw ValidationError("demand probabilities must have one entry per item");
  double total = 0.0;
  for (double q : demand_.p) {
    if (!std::isfinite(q) || q < 0.0) throw ValidationError("demand probabilities must be non-negative");
    total += q;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("demand probabilities must sum to 1");
  if (demand_.d_min < 0 || demand_.d_min > demand_.d_max) throw ValidationError("demand bounds require 0 <= d_min <= d_max");
}

ProblemInstance default_paper_instance() {
  ItemCatalog catalog{{115, 180, 267, 314, 880, 1180, 1200}};
  // One row per item type below; PatternMatrix stores one column per pattern.
  const int table[7][15] = {
      {10, 13, 3, 3, 2, 2, 1, 1, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 1, 1, 2, 0, 1, 1, 0, 0, 0, 0, 0, 0, 1},
      {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 2, 2, 3, 0},
      {1, 0, 0, 3, 0, 0, 0, 0, 0, 0, 1, 0, 3, 2, 4},
      {0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0},
  };
  PatternMatrix patterns;
  patterns.object_length = 1500;
  patterns.counts.assign(15, std::vector<int>(7));
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 15; ++j) patterns.counts[j][i] = table[i][j];
  }
  patterns.trim = compute_trim(patterns, catalog);
  CostSpec costs = costs_from_factors(catalog, patterns.trim, CostFactors{});
  DemandSpec demand{{0.30, 0.20, 0.20, 0.10, 0.10, 0.05, 0.05}, 40, 50};
  return ProblemInstance(std::move(catalog), std::move(patterns), std::move(costs), CapacityBounds{70, 30},
                         std::move(demand));
}

ProblemInstance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("instance document must be an object");
  ItemCatalog catalog{read_field<std::vector<int>>(doc, "item_lengths")};
  PatternMatrix patterns;
  patterns.object_length = read_field<int>(doc, "object_length");
  patterns.counts = read_field<std::vector<std::vector<int>>>(doc, "patterns");
  if (doc.contains("trim")) patterns.trim = read_field<std::vector<int>>(doc, "trim");

  // Trim must be known before building factor costs; mismatches are reported by the constructor.
  std::vector<int> trim;
  try {
    trim = compute_trim(patterns, catalog);
  } catch (const ContractViolation& e) {
    throw ValidationError(e.what());
  }

  CostSpec costs;
  bool have_factors = doc.contains("cost_factors");
  if (have_factors) {
    const json& f = doc.at("cost_factors");
    CostFactors factors{read_field<double>(f, "holding"), read_field<double>(f, "lost_sales"),
                        read_field<double>(f, "trim")};
    costs = costs_from_factors(catalog, trim, factors);
  }
  if (doc.contains("costs")) {
    const json& c = doc.at("costs");
    if (c.contains("trim")) costs.trim_cost = read_field<std::vector<double>>(c, "trim");
    if (c.contains("holding")) costs.holding_cost = read_field<std::vector<double>>(c, "holding");
    if (c.contains("lost_sales")) costs.lost_sales_cost = read_field<std::vector<double>>(c, "lost_sales");
  } else if (!have_factors) {
    throw ParseError("one of 'costs' or 'cost_factors' is required");
  }

  CapacityBounds bounds{read_field<int>(doc, "s_max"), read_field<int>(doc, "x_max")};
  if (!doc.contains("demand")) throw ParseError("missing key 'demand'");
  const json& d = doc.at("demand");
  DemandSpec demand{read_field<std::vector<double>>(d, "p"), read_field<int>(d, "d_min"), read_field<int>(d, "d_max")};
  return ProblemInstance(std::move(catalog), std::move(patterns), std::move(costs), bounds, std::move(demand));
}

json instance_to_json(const ProblemInstance& inst) {
  json doc;
  doc["object_length"] = inst.patterns().object_length;
  doc["item_lengths"] = inst.catalog().lengths;
  doc["patterns"] = inst.patterns().counts;
  doc["trim"] = inst.patterns().trim;
  doc["costs"] = {{"trim", inst.costs().trim_cost},
                  {"holding", inst.costs().holding_cost},
                  {"lost_sales", inst.costs().lost_sales_cost}};
  doc["s_max"] = inst.s_max();
  doc["x_max"] = inst.x_max();
  doc["demand"] = {{"p", inst.demand().p}, {"d_min", inst.demand().d_min}, {"d_max", inst.demand().d_max}};
  return doc;
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return instance_from_json(doc);
}

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << instance_to_json(inst).dump(2) << '\n';
}

}  // namespace cutstock
