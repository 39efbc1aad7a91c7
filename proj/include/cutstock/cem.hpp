#pragma once

#include <memory>
#include <span>
#include <vector>

#include "cutstock/basis.hpp"
#include "cutstock/dynamics.hpp"
#include "cutstock/policy.hpp"

namespace cutstock {

struct CemConfig {
  int iterations = 10;        // rounds of sampling and refitting
  int candidates = 100;       // feasible candidates per round
  double elite_fraction = 0.1;
  int rejection_cap = kDefaultRejectionCap;
  double smoothing = 0.0;     // p <- (1 - a) p' + a p

  /// ceil(elite_fraction * candidates).
  int elite_rank() const;
  void validate() const;
};

struct CemResult {
  Decision best;
  double best_q = 0.0;
  std::vector<double> best_q_history;  // best q after each round
  std::vector<double> probs;           // final pattern probabilities
};

/// Cross-entropy search for argmin_x phi(s, x) . theta over feasible x.
/// Candidates come from sample_feasible_decision under the current pattern
/// probabilities (uniform at start); the elites are candidates scoring at
/// or below the elite_rank-th order statistic, and the probabilities are
/// refit to the pattern frequencies of the elites. The best candidate seen
/// in any round is returned; ties keep the first one encountered.
CemResult cem_search(const ProblemInstance& inst, const FeatureMap& features, const PolicyParams& params,
                     const State& s, const CemConfig& cfg, RngStream& rng);

Decision greedy_action(const ProblemInstance& inst, const FeatureMap& features, const PolicyParams& params,
                       const State& s, const CemConfig& cfg, RngStream& rng);

/// p'_j = sum_e x_e[j] / sum_e sum_j x_e[j]. If every elite is the zero
/// decision the current probabilities are returned unchanged.
std::vector<double> update_probs(std::span<const Decision> elites, std::span<const double> current);

/// Greedy policy with respect to a linear q-function, solved by cem_search.
class GreedyPolicy final : public Policy {
 public:
  GreedyPolicy(std::shared_ptr<const FeatureMap> features, PolicyParams params, CemConfig cfg,
               std::string label = "greedy");

  Decision decide(const ProblemInstance& inst, const State& s, RngStream& rng) const override;
  std::string name() const override { return label_; }

 private:
  std::shared_ptr<const FeatureMap> features_;
  PolicyParams params_;
  CemConfig cfg_;
  std::string label_;
};

}  // namespace cutstock
