#include "cutstock/lstd.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "cutstock/errors.hpp"
#include "cutstock/parallel.hpp"

namespace cutstock {

LstdAccumulator::LstdAccumulator(int features, double gamma)
    : a_(Eigen::MatrixXd::Zero(features, features)), b_(Eigen::VectorXd::Zero(features)), gamma_(gamma) {
  if (features < 1) throw ContractViolation("accumulator needs at least one feature");
}

void LstdAccumulator::absorb(const FeatureVector& phi_sx, const FeatureVector& phi_next, double cost, double weight) {
  if (phi_sx.size() != b_.size() || phi_next.size() != b_.size()) {
    throw ContractViolation("transition feature length does not match accumulator");
  }
  a_.noalias() += (weight * phi_sx) * (phi_sx - gamma_ * phi_next).transpose();
  b_.noalias() += (weight * cost) * phi_sx;
  ++count_;
}

void LstdAccumulator::merge(const LstdAccumulator& other) {
  if (other.b_.size() != b_.size() || other.gamma_ != gamma_) throw ContractViolation("cannot merge accumulators");
  a_ += other.a_;
  b_ += other.b_;
  count_ += other.count_;
}

std::string to_string(SolvePath path) { return path == SolvePath::exact ? "exact" : "pseudo_inverse"; }

LstdSolution solve(const LstdAccumulator& acc, const SolveOptions& options) {
  if (acc.count() == 0) throw EmptySampleError("LSTD solve on an empty sample");
  const int k = acc.features();
  Eigen::MatrixXd a = acc.a_hat();
  if (options.ridge != 0.0) a.diagonal().array() += options.ridge;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double largest = sigma.size() > 0 ? sigma(0) : 0.0;
  const double smallest = sigma.size() > 0 ? sigma(sigma.size() - 1) : 0.0;

  LstdSolution out;
  out.condition = smallest > 0.0 ? largest / smallest : std::numeric_limits<double>::infinity();
  out.rank = 0;
  for (int i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > options.rank_tolerance * largest) ++out.rank;
  }
  if (largest > 0.0 && out.rank == k) {
    out.path = SolvePath::exact;
    out.params.theta = a.partialPivLu().solve(acc.b_hat());
  } else {
    out.path = SolvePath::pseudo_inverse;
    if (largest == 0.0) {
      out.params.theta = Eigen::VectorXd::Zero(k);
    } else {
      svd.setThreshold(options.rank_tolerance);
      out.params.theta = svd.solve(acc.b_hat());
    }
  }
  return out;
}

PolicyEvaluation evaluate_policy(const ProblemInstance& inst, const FeatureMap& features,
                                 const NextActionRule& next_action, double gamma, int transitions,
                                 const RngStream& stream, const SamplingOptions& options) {
  if (transitions < 1) throw ContractViolation("evaluate_policy needs at least one transition");
  const int k = features.size();
  const int chunk = std::max(1, options.chunk_size);
  const int shards = (transitions + chunk - 1) / chunk;
  const std::vector<double> uniform = uniform_probs(inst.pattern_count());
  const Categorical explore(uniform);

  std::vector<LstdAccumulator> partial(shards, LstdAccumulator(k, gamma));
  std::vector<double> cost_sums(shards, 0.0);

  parallel_for(shards, options.threads, [&](int shard) {
    FeatureVector phi(k), phi_next(k);
    const int begin = shard * chunk;
    const int end = std::min(transitions, begin + chunk);
    for (int t = begin; t < end; ++t) {
      RngStream rng = stream.derive(static_cast<std::uint64_t>(t));
      State s = sample_state(inst, rng);
      Decision x = sample_feasible_decision(inst, s, explore, rng);
      Demand d = sample_demand(inst, rng);
      double c = cost(inst, s, x, d);
      State next = transition(inst, s, x, d);
      Decision next_x = next_action(next, rng);
      features.evaluate(inst, s, x, phi);
      features.evaluate(inst, next, next_x, phi_next);
      partial[shard].absorb(phi, phi_next, c);
      cost_sums[shard] += c;
    }
  });

  LstdAccumulator total(k, gamma);
  double cost_sum = 0.0;
  for (int shard = 0; shard < shards; ++shard) {
    total.merge(partial[shard]);
    cost_sum += cost_sums[shard];
  }
  PolicyEvaluation out;
  out.solution = solve(total, options.solve);
  out.mean_cost = cost_sum / transitions;
  out.transitions = transitions;
  return out;
}

PolicyEvaluation evaluate_policy(const ProblemInstance& inst, const FeatureMap& features,
                                 const PolicyParams& previous, const CemConfig& cem, double gamma, int transitions,
                                 const RngStream& stream, const SamplingOptions& options) {
  cem.validate();
  NextActionRule greedy = [&](const State& s, RngStream& rng) {
    return greedy_action(inst, features, previous, s, cem, rng);
  };
  return evaluate_policy(inst, features, greedy, gamma, transitions, stream, options);
}

LstdSolution evaluate_policy_exhaustive(const ProblemInstance& inst, const FeatureMap& features,
                                        const DeterministicRule& rule, double gamma, const SolveOptions& options) {
  const int k = features.size();
  const auto outcomes = enumerate_demand(inst.demand());
  LstdAccumulator acc(k, gamma);
  FeatureVector phi(k), phi_next(k);
  for (const State& s : enumerate_states(inst)) {
    for (const Decision& x : enumerate_feasible(inst, s)) {
      features.evaluate(inst, s, x, phi);
      for (const auto& [d, prob] : outcomes) {
        State next = transition(inst, s, x, d);
        features.evaluate(inst, next, rule(next), phi_next);
        acc.absorb(phi, phi_next, cost(inst, s, x, d), prob);
      }
    }
  }
  return solve(acc, options);
}

Decision exact_greedy_action(const ProblemInstance& inst, const FeatureMap& features, const PolicyParams& params,
                             const State& s) {
  Decision best;
  double best_q = std::numeric_limits<double>::infinity();
  for (Decision& x : enumerate_feasible(inst, s)) {
    double q = features.q_value(inst, s, x, params);
    if (q < best_q) {
      best_q = q;
      best = std::move(x);
    }
  }
  return best;
}

}  // namespace cutstock
