#include "cutstock/cem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cutstock/errors.hpp"

namespace cutstock {

int CemConfig::elite_rank() const {
  return std::max(1, static_cast<int>(std::ceil(elite_fraction * candidates - 1e-9)));
}

void CemConfig::validate() const {
  if (iterations < 1) throw ValidationError("cem iterations must be >= 1");
  if (candidates < 1) throw ValidationError("cem candidates must be >= 1");
  if (!(elite_fraction > 0.0 && elite_fraction < 1.0)) throw ValidationError("cem elite fraction must lie in (0, 1)");
  if (rejection_cap < 1) throw ValidationError("cem rejection cap must be >= 1");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw ValidationError("cem smoothing must lie in [0, 1)");
}

std::vector<double> update_probs(std::span<const Decision> elites, std::span<const double> current) {
  if (elites.empty()) throw ContractViolation("update_probs: elite set is empty");
  const std::size_t n = current.size();
  std::vector<double> freq(n, 0.0);
  double total = 0.0;
  for (const Decision& e : elites) {
    if (e.count.size() != n) throw ContractViolation("update_probs: elite has wrong length");
    for (std::size_t j = 0; j < n; ++j) {
      freq[j] += e.count[j];
      total += e.count[j];
    }
  }
  if (total == 0.0) return {current.begin(), current.end()};
  for (double& f : freq) f /= total;
  return freq;
}

CemResult cem_search(const ProblemInstance& inst, const FeatureMap& features, const PolicyParams& params,
                     const State& s, const CemConfig& cfg, RngStream& rng) {
  if (params.size() != features.size()) throw ContractViolation("theta length does not match feature count");
  const int n = inst.pattern_count();
  const int elite_rank = cfg.elite_rank();

  CemResult result;
  result.probs = uniform_probs(n);
  result.best_q = std::numeric_limits<double>::infinity();

  std::vector<Decision> candidates(cfg.candidates);
  std::vector<double> scores(cfg.candidates);
  std::vector<double> sorted(cfg.candidates);
  std::vector<Decision> elites;
  elites.reserve(cfg.candidates);

  for (int round = 0; round < cfg.iterations; ++round) {
    Categorical sampler(result.probs);
    for (int c = 0; c < cfg.candidates; ++c) {
      candidates[c] = sample_feasible_decision(inst, s, sampler, rng, cfg.rejection_cap);
      scores[c] = features.q_value(inst, s, candidates[c], params);
      if (scores[c] < result.best_q) {
        result.best_q = scores[c];
        result.best = candidates[c];
      }
    }
    result.best_q_history.push_back(result.best_q);

    std::copy(scores.begin(), scores.end(), sorted.begin());
    std::nth_element(sorted.begin(), sorted.begin() + (elite_rank - 1), sorted.end());
    const double threshold = sorted[elite_rank - 1];
    elites.clear();
    for (int c = 0; c < cfg.candidates; ++c) {
      if (scores[c] <= threshold) elites.push_back(candidates[c]);
    }
    std::vector<double> refit = update_probs(elites, result.probs);
    if (cfg.smoothing > 0.0) {
      for (int j = 0; j < n; ++j) refit[j] = (1.0 - cfg.smoothing) * refit[j] + cfg.smoothing * result.probs[j];
    }
    result.probs = std::move(refit);
  }
  return result;
}

Decision greedy_action(const ProblemInstance& inst, const FeatureMap& features, const PolicyParams& params,
                       const State& s, const CemConfig& cfg, RngStream& rng) {
  return cem_search(inst, features, params, s, cfg, rng).best;
}

GreedyPolicy::GreedyPolicy(std::shared_ptr<const FeatureMap> features, PolicyParams params, CemConfig cfg,
                           std::string label)
    : features_(std::move(features)), params_(std::move(params)), cfg_(cfg), label_(std::move(label)) {
  cfg_.validate();
  if (params_.size() != features_->size()) throw ContractViolation("theta length does not match feature count");
}

Decision GreedyPolicy::decide(const ProblemInstance& inst, const State& s, RngStream& rng) const {
  return greedy_action(inst, *features_, params_, s, cfg_, rng);
}

}  // namespace cutstock
