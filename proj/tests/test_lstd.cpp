#include <Eigen/Dense>

#include "doctest.h"

#include "cutstock/errors.hpp"
#include "cutstock/lstd.hpp"
#include "micro.hpp"
#include "oracles.hpp"

using namespace cutstock;

namespace {

Eigen::VectorXd unit(int k, int size) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(size);
  e[k] = 1.0;
  return e;
}

/// A feasible, state-dependent deterministic rule.
DeterministicRule mixed_rule(const ProblemInstance& inst) {
  return [&inst](const State& s) {
    auto xs = enumerate_feasible(inst, s);
    return xs[(7 * s.level[0] + 3 * s.level[1]) % xs.size()];
  };
}

}  // namespace

TEST_CASE("accumulator update examples") {
  LstdAccumulator acc(1, 0.5);
  acc.absorb(Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 1.0), 3.0);
  CHECK(acc.a_hat()(0, 0) == 3.0);
  CHECK(acc.b_hat()[0] == 6.0);
  LstdSolution sol = solve(acc);
  CHECK(sol.params.theta[0] == doctest::Approx(2.0));
  CHECK(sol.path == SolvePath::exact);

  LstdAccumulator zero(3, 0.9);
  zero.absorb(Eigen::VectorXd::Zero(3), unit(1, 3), 5.0);
  CHECK(zero.a_hat().isZero());
  CHECK(zero.b_hat().isZero());
  LstdSolution z = solve(zero);
  CHECK(z.params.theta.isZero());
  CHECK(z.path == SolvePath::pseudo_inverse);
  CHECK(z.rank == 0);
}

TEST_CASE("solve rejects empty samples and shape mismatches") {
  LstdAccumulator acc(2, 0.5);
  CHECK_THROWS_AS(solve(acc), EmptySampleError);
  CHECK_THROWS_AS(acc.absorb(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2), 1.0), ContractViolation);
  CHECK_THROWS_AS(acc.merge(LstdAccumulator(2, 0.6)), ContractViolation);
}

TEST_CASE("two-state chain matches the dense Bellman solve") {
  // P = [[0.3, 0.7], [0.6, 0.4]], c = (1, 2), gamma = 0.9; q = (I - gamma P)^-1 c = (1900, 2000) / 127.
  const double p[2][2] = {{0.3, 0.7}, {0.6, 0.4}};
  const double c[2] = {1.0, 2.0};
  LstdAccumulator acc(2, 0.9);
  for (int s = 0; s < 2; ++s) {
    for (int n = 0; n < 2; ++n) acc.absorb(unit(s, 2), unit(n, 2), c[s], p[s][n]);
  }
  LstdSolution sol = solve(acc);
  CHECK(sol.params.theta[0] == doctest::Approx(1900.0 / 127.0).epsilon(1e-12));
  CHECK(sol.params.theta[1] == doctest::Approx(2000.0 / 127.0).epsilon(1e-12));
}

TEST_CASE("singular systems take the minimum-norm path") {
  // Duplicate feature column: theta is only identified up to the split between them.
  LstdAccumulator acc(2, 0.0);
  Eigen::Vector2d phi(1.0, 1.0);
  acc.absorb(phi, phi, 4.0);
  LstdSolution sol = solve(acc);
  CHECK(sol.path == SolvePath::pseudo_inverse);
  CHECK(sol.rank == 1);
  CHECK(sol.params.theta[0] == doctest::Approx(2.0));
  CHECK(sol.params.theta[1] == doctest::Approx(2.0));
  LstdSolution ridged = solve(acc, SolveOptions{1e-3, 1e-10});
  CHECK(ridged.path == SolvePath::exact);
}

TEST_CASE("merge is order independent and equals streaming") {
  RngStream rng(17);
  const int k = 4;
  std::vector<std::tuple<Eigen::VectorXd, Eigen::VectorXd, double>> samples;
  for (int t = 0; t < 60; ++t) {
    Eigen::VectorXd a(k), b(k);
    for (int i = 0; i < k; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
    }
    samples.emplace_back(a, b, rng.uniform01() * 10.0);
  }
  LstdAccumulator stream(k, 0.7), left(k, 0.7), right(k, 0.7);
  for (int t = 0; t < 60; ++t) {
    const auto& [a, b, c] = samples[t];
    stream.absorb(a, b, c);
    (t < 25 ? left : right).absorb(a, b, c);
  }
  LstdAccumulator lr = left, rl = right;
  lr.merge(right);
  rl.merge(left);
  CHECK(lr.count() == 60);
  CHECK((lr.a_hat() - rl.a_hat()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((lr.a_hat() - stream.a_hat()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((lr.b_hat() - stream.b_hat()).cwiseAbs().maxCoeff() <= 1e-12);

  LstdSolution sol = solve(stream);
  double residual = (stream.a_hat() * sol.params.theta - stream.b_hat()).norm();
  CHECK(residual <= 1e-8 * (1.0 + stream.b_hat().norm()));

  // Scaling every cost scales theta.
  LstdAccumulator scaled(k, 0.7);
  for (const auto& [a, b, c] : samples) scaled.absorb(a, b, 3.0 * c);
  LstdSolution sol3 = solve(scaled);
  CHECK((sol3.params.theta - 3.0 * sol.params.theta).cwiseAbs().maxCoeff() <=
        1e-9 * (1.0 + sol.params.theta.cwiseAbs().maxCoeff()));
}

TEST_CASE("sampled evaluation with gamma zero is least squares on the same transitions") {
  ProblemInstance inst = default_paper_instance();
  BasisFeatures f(default_basis(BasisKind::polynomial, inst), 7);
  const int transitions = 400;
  RngStream stream(55);
  NextActionRule stay = [&inst](const State&, RngStream&) { return zero_decision(inst); };
  PolicyEvaluation eval = evaluate_policy(inst, f, stay, 0.0, transitions, stream);

  // Regenerate the transitions from the same per-index streams and solve the normal equations by QR.
  Eigen::MatrixXd design(transitions, f.size());
  Eigen::VectorXd target(transitions);
  auto probs = uniform_probs(15);
  double mean = 0.0;
  for (int t = 0; t < transitions; ++t) {
    RngStream rng = stream.derive(t);
    State s = sample_state(inst, rng);
    Decision x = sample_feasible_decision(inst, s, probs, rng);
    Demand d = sample_demand(inst, rng);
    design.row(t) = f(inst, s, x).transpose();
    target[t] = cost(inst, s, x, d);
    mean += target[t] / transitions;
  }
  Eigen::VectorXd ols = design.colPivHouseholderQr().solve(target);
  CHECK(eval.mean_cost == doctest::Approx(mean).epsilon(1e-12));
  double scale = 1.0 + ols.cwiseAbs().maxCoeff();
  CHECK((eval.solution.params.theta - ols).cwiseAbs().maxCoeff() <= 1e-6 * scale);
}

TEST_CASE("sampled evaluation is deterministic and thread invariant") {
  ProblemInstance inst = default_paper_instance();
  BasisFeatures f(default_basis(BasisKind::fourier, inst), 7);
  RngStream stream(404);
  NextActionRule stay = [&inst](const State&, RngStream&) { return zero_decision(inst); };
  SamplingOptions one, three;
  three.threads = 3;
  PolicyEvaluation a = evaluate_policy(inst, f, stay, 0.8, 1200, stream, one);
  PolicyEvaluation b = evaluate_policy(inst, f, stay, 0.8, 1200, stream, three);
  PolicyEvaluation c = evaluate_policy(inst, f, stay, 0.8, 1200, stream, one);
  CHECK(a.solution.params.theta == b.solution.params.theta);
  CHECK(a.solution.params.theta == c.solution.params.theta);
  CHECK(a.mean_cost == b.mean_cost);

  PolicyEvaluation single = evaluate_policy(inst, f, stay, 0.8, 1, stream, one);
  PolicyEvaluation again = evaluate_policy(inst, f, stay, 0.8, 1, stream, one);
  CHECK(single.solution.params.theta == again.solution.params.theta);
  CHECK_THROWS_AS(evaluate_policy(inst, f, stay, 0.8, 0, stream, one), ContractViolation);
}

TEST_CASE("exhaustive tabular evaluation recovers q_pi") {
  for (int s_max : {2, 3}) {
    ProblemInstance inst = testing::micro_instance(s_max, 2, 0, 2);
    TabularFeatures tab(inst);
    testing::PairIndex index(inst);
    REQUIRE(static_cast<int>(index.pairs.size()) == tab.size());
    DeterministicRule rule = mixed_rule(inst);
    for (double gamma : {0.5, 0.8, 0.95}) {
      LstdSolution sol = evaluate_policy_exhaustive(inst, tab, rule, gamma);
      Eigen::VectorXd oracle = testing::tabular_q(inst, index, rule, gamma);
      double err = 0.0;
      for (int r = 0; r < tab.size(); ++r) {
        const auto& [s, x] = index.pairs[r];
        err = std::max(err, std::abs(sol.params.theta[tab.index(s, x)] - oracle[r]));
      }
      CHECK(err <= 1e-6);
      CHECK(sol.path == SolvePath::exact);
    }
  }
}
