#include "cutstock/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cutstock/errors.hpp"

namespace cutstock {

namespace {

constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

class CoverSearch {
 public:
  CoverSearch(const ProblemInstance& inst, const State& s, std::span<const double> target, const CoverOptions& opt)
      : inst_(inst), opt_(opt), m_(inst.items()), n_(inst.pattern_count()) {
    const auto& g = inst.costs().trim_cost;
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return g[a] < g[b]; });

    std::vector<bool> active(m_, opt.rows.empty());
    for (int r : opt.rows) {
      if (r < 0 || r >= m_) throw ContractViolation("coverage row out of range");
      active[r] = true;
    }
    residual_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (active[i]) residual_[i] = target[i] - s.level[i];
    }
    available_ = s.level;

    // Suffix tables over the branching order.
    min_ratio_.assign((n_ + 1) * m_, kInf);
    max_yield_.assign((n_ + 1) * m_, 0);
    for (int k = n_ - 1; k >= 0; --k) {
      int j = order_[k];
      for (int i = 0; i < m_; ++i) {
        double ratio = kInf;
        int a = inst.patterns().yield(i, j);
        if (a > 0) ratio = g[j] / a;
        min_ratio_[k * m_ + i] = std::min(min_ratio_[(k + 1) * m_ + i], ratio);
        max_yield_[k * m_ + i] = std::max(max_yield_[(k + 1) * m_ + i], a);
      }
    }
    current_.assign(n_, 0);
  }

  CoverSolution run() {
    dfs(0, 0.0, 0);
    CoverSolution out;
    out.feasible = best_cost_ < kInf;
    out.proven_optimal = !aborted_;
    out.nodes = nodes_;
    if (out.feasible) {
      out.x = Decision{best_};
      out.objective = best_cost_;
    } else {
      out.x = Decision{std::vector<int>(n_, 0)};
    }
    return out;
  }

 private:
  void dfs(int k, double cost, int used) {
    if (aborted_) return;
    if (++nodes_ > opt_.node_cap) {
      aborted_ = true;
      return;
    }
    double bound = 0.0;
    bool covered = true;
    for (int i = 0; i < m_; ++i) {
      double r = residual_[i];
      if (r <= kEps) continue;
      covered = false;
      double ratio = min_ratio_[k * m_ + i];
      if (ratio == kInf) return;
      bound = std::max(bound, r * ratio);
      if (opt_.enforce_capacity) {
        long reach = std::min<long>(inst_.s_max() - available_[i],
                                    static_cast<long>(inst_.x_max() - used) * max_yield_[k * m_ + i]);
        if (r > reach + kEps) return;
      }
    }
    if (covered) {
      // Remaining patterns stay at zero: costs are non-negative.
      if (cost < best_cost_ - kEps) {
        best_cost_ = cost;
        best_ = current_;
      }
      return;
    }
    if (k == n_ || cost + bound >= best_cost_ - kEps) return;

    const int j = order_[k];
    const auto& column = inst_.patterns().counts[j];
    int upper = 0;
    for (int i = 0; i < m_; ++i) {
      if (column[i] > 0 && residual_[i] > kEps) {
        upper = std::max(upper, static_cast<int>(std::ceil(residual_[i] / column[i] - kEps)));
      }
    }
    if (opt_.enforce_capacity) {
      upper = std::min(upper, inst_.x_max() - used);
      for (int i = 0; i < m_; ++i) {
        if (column[i] > 0) upper = std::min(upper, (inst_.s_max() - available_[i]) / column[i]);
      }
    }
    const double g = inst_.costs().trim_cost[j];
    for (int v = upper; v >= 0; --v) {
      apply(j, v);
      dfs(k + 1, cost + g * v, used + v);
      apply(j, -v);
      if (aborted_) return;
    }
  }

  void apply(int j, int v) {
    if (v == 0) return;
    const auto& column = inst_.patterns().counts[j];
    for (int i = 0; i < m_; ++i) {
      residual_[i] -= column[i] * v;
      available_[i] += column[i] * v;
    }
    current_[j] += v;
  }

  const ProblemInstance& inst_;
  const CoverOptions& opt_;
  int m_, n_;
  std::vector<int> order_;
  std::vector<double> residual_;
  std::vector<int> available_;
  std::vector<double> min_ratio_;
  std::vector<int> max_yield_;
  std::vector<int> current_;
  std::vector<int> best_;
  double best_cost_ = kInf;
  long nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace

std::vector<double> expected_demand(const DemandSpec& demand) {
  const double mean_total = 0.5 * (demand.d_min + demand.d_max);
  std::vector<double> out;
  out.reserve(demand.p.size());
  for (double p : demand.p) out.push_back(p * mean_total);
  return out;
}

CoverSolution solve_cover_ilp(const ProblemInstance& inst, const State& s, std::span<const double> target,
                              const CoverOptions& options) {
  if (static_cast<int>(target.size()) != inst.items()) throw ContractViolation("coverage target has wrong length");
  if (static_cast<int>(s.level.size()) != inst.items()) throw ContractViolation("state has wrong length");
  for (double t : target) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ContractViolation("coverage target must be finite and non-negative");
  }
  return CoverSearch(inst, s, target, options).run();
}

MyopicConfig default_myopic_config(const ProblemInstance& inst) {
  return MyopicConfig{expected_demand(inst.demand()), 2'000'000};
}

MyopicOutcome myopic_decide(const ProblemInstance& inst, const State& s, const MyopicConfig& cfg) {
  CoverOptions plain;
  plain.node_cap = cfg.node_cap;
  CoverSolution sol = solve_cover_ilp(inst, s, cfg.d_bar, plain);
  MyopicOutcome out;
  out.node_cap_hit = !sol.proven_optimal;
  if (sol.feasible && is_feasible(inst, s, sol.x)) {
    out.x = std::move(sol.x);
    out.objective = sol.objective;
    return out;
  }

  out.clipped = true;
  CoverOptions capped;
  capped.enforce_capacity = true;
  capped.node_cap = cfg.node_cap;
  CoverSolution clipped = solve_cover_ilp(inst, s, cfg.d_bar, capped);
  if (!clipped.feasible) {
    std::vector<int> rows;
    for (int i = 0; i < inst.items(); ++i) {
      if (cfg.d_bar[i] - s.level[i] > kEps) rows.push_back(i);
    }
    std::stable_sort(rows.begin(), rows.end(), [&](int a, int b) {
      return cfg.d_bar[a] - s.level[a] > cfg.d_bar[b] - s.level[b];
    });
    capped.rows.clear();
    clipped = CoverSolution{zero_decision(inst), 0.0, true, true, 0};
    for (int row : rows) {
      capped.rows.push_back(row);
      CoverSolution attempt = solve_cover_ilp(inst, s, cfg.d_bar, capped);
      out.node_cap_hit = out.node_cap_hit || !attempt.proven_optimal;
      if (attempt.feasible) {
        clipped = std::move(attempt);
      } else {
        capped.rows.pop_back();
        out.dropped_rows.push_back(row);
      }
    }
  }
  out.node_cap_hit = out.node_cap_hit || !clipped.proven_optimal;
  out.x = std::move(clipped.x);
  out.objective = clipped.objective;
  return out;
}

Decision random_decide(const ProblemInstance& inst, const State& s, RngStream& rng) {
  return sample_feasible_decision(inst, s, uniform_probs(inst.pattern_count()), rng);
}

Decision MyopicPolicy::decide(const ProblemInstance& inst, const State& s, RngStream&) const {
  MyopicOutcome out = myopic_decide(inst, s, cfg_);
  if (out.clipped) clipped_.fetch_add(1);
  return std::move(out.x);
}

}  // namespace cutstock
