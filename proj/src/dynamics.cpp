#include "cutstock/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cutstock/errors.hpp"

namespace cutstock {

namespace {

void check_state(const ProblemInstance& inst, const State& s) {
  if (static_cast<int>(s.level.size()) != inst.items()) {
    throw ContractViolation("state has " + std::to_string(s.level.size()) + " components, expected " +
                            std::to_string(inst.items()));
  }
}

void check_decision(const ProblemInstance& inst, const Decision& x) {
  if (static_cast<int>(x.count.size()) != inst.pattern_count()) {
    throw ContractViolation("decision has " + std::to_string(x.count.size()) + " components, expected " +
                            std::to_string(inst.pattern_count()));
  }
}

void check_demand(const ProblemInstance& inst, const Demand& d) {
  if (static_cast<int>(d.qty.size()) != inst.items()) {
    throw ContractViolation("demand has " + std::to_string(d.qty.size()) + " components, expected " +
                            std::to_string(inst.items()));
  }
}

std::vector<int> multinomial(int total, const Categorical& cat, RngStream& rng) {
  std::vector<int> out(cat.size(), 0);
  for (int k = 0; k < total; ++k) ++out[cat.sample(rng)];
  return out;
}

}  // namespace

int Decision::total() const { return std::accumulate(count.begin(), count.end(), 0); }
int Demand::total() const { return std::accumulate(qty.begin(), qty.end(), 0); }

State zero_state(const ProblemInstance& inst) { return State{std::vector<int>(inst.items(), 0)}; }
Decision zero_decision(const ProblemInstance& inst) { return Decision{std::vector<int>(inst.pattern_count(), 0)}; }

Decision single_pattern(const ProblemInstance& inst, int pattern, int objects) {
  if (pattern < 0 || pattern >= inst.pattern_count()) throw ContractViolation("pattern index out of range");
  Decision x = zero_decision(inst);
  x.count[pattern] = objects;
  return x;
}

std::vector<int> post_decision(const ProblemInstance& inst, const State& s, const Decision& x) {
  check_state(inst, s);
  check_decision(inst, x);
  std::vector<int> out = s.level;
  const auto& counts = inst.patterns().counts;
  for (int j = 0; j < inst.pattern_count(); ++j) {
    if (x.count[j] == 0) continue;
    for (int i = 0; i < inst.items(); ++i) out[i] += counts[j][i] * x.count[j];
  }
  return out;
}

State transition(const ProblemInstance& inst, const State& s, const Decision& x, const Demand& d) {
  check_demand(inst, d);
  std::vector<int> next = post_decision(inst, s, x);
  for (int i = 0; i < inst.items(); ++i) next[i] = std::max(0, next[i] - d.qty[i]);
  return State{std::move(next)};
}

CostBreakdown cost_terms(const ProblemInstance& inst, const State& s, const Decision& x, const Demand& d) {
  check_demand(inst, d);
  std::vector<int> available = post_decision(inst, s, x);
  const CostSpec& c = inst.costs();
  CostBreakdown out;
  for (int j = 0; j < inst.pattern_count(); ++j) out.trim += c.trim_cost[j] * x.count[j];
  for (int i = 0; i < inst.items(); ++i) {
    int left = available[i] - d.qty[i];
    if (left > 0) {
      out.holding += c.holding_cost[i] * left;
    } else if (left < 0) {
      out.lost_sales += c.lost_sales_cost[i] * -left;
    }
  }
  return out;
}

double cost(const ProblemInstance& inst, const State& s, const Decision& x, const Demand& d) {
  return cost_terms(inst, s, x, d).total();
}

bool is_feasible(const ProblemInstance& inst, const State& s, const Decision& x) {
  check_state(inst, s);
  check_decision(inst, x);
  long objects = 0;
  for (int v : x.count) {
    if (v < 0) return false;
    objects += v;
  }
  if (objects > inst.x_max()) return false;
  std::vector<int> available = post_decision(inst, s, x);
  return std::all_of(available.begin(), available.end(), [&](int v) { return v <= inst.s_max(); });
}

bool is_valid_state(const ProblemInstance& inst, const State& s) {
  if (static_cast<int>(s.level.size()) != inst.items()) return false;
  return std::all_of(s.level.begin(), s.level.end(), [&](int v) { return v >= 0 && v <= inst.s_max(); });
}

State sample_state(const ProblemInstance& inst, RngStream& rng) {
  State s = zero_state(inst);
  for (int& v : s.level) v = static_cast<int>(rng.uniform_int(0, inst.s_max()));
  return s;
}

Demand sample_demand(const ProblemInstance& inst, RngStream& rng) {
  const DemandSpec& spec = inst.demand();
  int total = static_cast<int>(rng.uniform_int(spec.d_min, spec.d_max));
  Categorical cat(spec.p);
  return Demand{multinomial(total, cat, rng)};
}

Decision sample_feasible_decision(const ProblemInstance& inst, const State& s, const Categorical& probs,
                                  RngStream& rng, int rejection_cap) {
  check_state(inst, s);
  if (probs.size() != inst.pattern_count()) throw ContractViolation("probability vector length must equal pattern count");
  const int m = inst.items();
  const int s_max = inst.s_max();
  const auto& counts = inst.patterns().counts;
  Decision x = zero_decision(inst);
  std::vector<int> available(m);
  for (int attempt = 0; attempt < rejection_cap; ++attempt) {
    std::fill(x.count.begin(), x.count.end(), 0);
    std::copy(s.level.begin(), s.level.end(), available.begin());
    int total = static_cast<int>(rng.uniform_int(0, inst.x_max()));
    bool ok = true;
    for (int k = 0; k < total && ok; ++k) {
      int j = probs.sample(rng);
      ++x.count[j];
      const auto& column = counts[j];
      for (int i = 0; i < m; ++i) {
        available[i] += column[i];
        if (available[i] > s_max) ok = false;
      }
    }
    if (ok) return x;
  }
  throw SamplingError("no feasible decision after " + std::to_string(rejection_cap) + " attempts");
}

Decision sample_feasible_decision(const ProblemInstance& inst, const State& s, std::span<const double> probs,
                                  RngStream& rng, int rejection_cap) {
  return sample_feasible_decision(inst, s, Categorical(probs), rng, rejection_cap);
}

std::vector<double> uniform_probs(int n) { return std::vector<double>(n, 1.0 / n); }

std::vector<std::pair<Demand, double>> enumerate_demand(const DemandSpec& spec) {
  const int m = static_cast<int>(spec.p.size());
  std::vector<std::pair<Demand, double>> out;
  const double total_weight = 1.0 / (spec.d_max - spec.d_min + 1);
  for (int total = spec.d_min; total <= spec.d_max; ++total) {
    // Compositions of `total` into m parts, each weighted by the multinomial pmf.
    std::vector<int> d(m, 0);
    auto recurse = [&](auto&& self, int item, int left) -> void {
      if (item == m - 1) {
        d[item] = left;
        double logp = std::lgamma(total + 1.0);
        for (int i = 0; i < m; ++i) {
          if (d[i] == 0) continue;
          if (spec.p[i] == 0.0) return;
          logp += d[i] * std::log(spec.p[i]) - std::lgamma(d[i] + 1.0);
        }
        out.emplace_back(Demand{d}, total_weight * std::exp(logp));
        return;
      }
      for (int v = 0; v <= left; ++v) {
        d[item] = v;
        self(self, item + 1, left - v);
      }
    };
    recurse(recurse, 0, total);
  }
  return out;
}

std::vector<State> enumerate_states(const ProblemInstance& inst) {
  const int m = inst.items();
  std::vector<State> out;
  State s = zero_state(inst);
  for (;;) {
    out.push_back(s);
    int i = m - 1;
    while (i >= 0 && s.level[i] == inst.s_max()) s.level[i--] = 0;
    if (i < 0) break;
    ++s.level[i];
  }
  return out;
}

std::vector<Decision> enumerate_feasible(const ProblemInstance& inst, const State& s) {
  const int n = inst.pattern_count();
  std::vector<Decision> out;
  Decision x = zero_decision(inst);
  auto recurse = [&](auto&& self, int j, int budget) -> void {
    if (j == n) {
      if (is_feasible(inst, s, x)) out.push_back(x);
      return;
    }
    for (int v = 0; v <= budget; ++v) {
      x.count[j] = v;
      self(self, j + 1, budget - v);
    }
    x.count[j] = 0;
  };
  recurse(recurse, 0, inst.x_max());
  return out;
}

}  // namespace cutstock
