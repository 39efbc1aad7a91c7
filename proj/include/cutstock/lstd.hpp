#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

#include "cutstock/basis.hpp"
#include "cutstock/cem.hpp"
#include "cutstock/dynamics.hpp"
#include "cutstock/rng.hpp"

namespace cutstock {

/// One sampled transition (s_t, x_t) -> c_{t+1}, (s_{t+1}, x(s_{t+1})).
struct TransitionSample {
  FeatureVector phi_sx;
  FeatureVector phi_next;
  double cost = 0.0;
};

/// Running sums A = sum w phi (phi - gamma phi')^T and b = sum w phi c.
/// The 1/N normalisation is omitted; it cancels in A theta = b.
class LstdAccumulator {
 public:
  LstdAccumulator(int features, double gamma);

  void absorb(const FeatureVector& phi_sx, const FeatureVector& phi_next, double cost, double weight = 1.0);
  void absorb(const TransitionSample& t) { absorb(t.phi_sx, t.phi_next, t.cost); }
  /// Adds another accumulator's sums (same shape and gamma).
  void merge(const LstdAccumulator& other);

  const Eigen::MatrixXd& a_hat() const { return a_; }
  const Eigen::VectorXd& b_hat() const { return b_; }
  long count() const { return count_; }
  double gamma() const { return gamma_; }
  int features() const { return static_cast<int>(b_.size()); }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  long count_ = 0;
  double gamma_;
};

enum class SolvePath { exact, pseudo_inverse };
std::string to_string(SolvePath path);

struct SolveOptions {
  double ridge = 0.0;             // added to the diagonal of A before solving
  double rank_tolerance = 1e-10;  // relative to the largest singular value
};

struct LstdSolution {
  PolicyParams params;
  SolvePath path = SolvePath::exact;
  double condition = 0.0;  // sigma_max / sigma_min; infinity when singular
  int rank = 0;
};

/// Solves A theta = b. Full numerical rank uses an LU solve; otherwise the
/// minimum-norm least-squares solution from the truncated SVD.
LstdSolution solve(const LstdAccumulator& acc, const SolveOptions& options = {});

/// Chooses x(s') for the successor state of a sampled transition.
using NextActionRule = std::function<Decision(const State&, RngStream&)>;

struct SamplingOptions {
  int threads = 1;
  int chunk_size = 250;  // transitions per accumulator shard; fixes summation order
  SolveOptions solve;
};

struct PolicyEvaluation {
  LstdSolution solution;
  double mean_cost = 0.0;  // average sampled c_{t+1}
  long transitions = 0;
};

/// Off-policy LSTD: for each t < transitions draws s_t ~ uniform states,
/// x_t ~ uniform-probability feasible generator, d_{t+1} ~ demand, then
/// x_{t+1} = next_action(s_{t+1}) and absorbs the transition. Transition t
/// draws from stream.derive(t), so results do not depend on `threads`.
PolicyEvaluation evaluate_policy(const ProblemInstance& inst, const FeatureMap& features,
                                 const NextActionRule& next_action, double gamma, int transitions,
                                 const RngStream& stream, const SamplingOptions& options = {});

/// Same, with x_{t+1} the cross-entropy greedy action under `previous`.
PolicyEvaluation evaluate_policy(const ProblemInstance& inst, const FeatureMap& features,
                                 const PolicyParams& previous, const CemConfig& cem, double gamma, int transitions,
                                 const RngStream& stream, const SamplingOptions& options = {});

/// Deterministic stationary rule for exhaustive evaluation.
using DeterministicRule = std::function<Decision(const State&)>;

/// Feeds every (s, x) pair of an enumerable instance once, with every demand
/// outcome weighted by its probability, i.e. the exact expectation of the
/// sampled estimator under a uniform weighting of pairs.
LstdSolution evaluate_policy_exhaustive(const ProblemInstance& inst, const FeatureMap& features,
                                        const DeterministicRule& rule, double gamma,
                                        const SolveOptions& options = {});

/// argmin over enumerate_feasible(s) of the q-function; ties keep the first.
Decision exact_greedy_action(const ProblemInstance& inst, const FeatureMap& features, const PolicyParams& params,
                             const State& s);

}  // namespace cutstock
