#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "cutstock/errors.hpp"
#include "cutstock/trainer.hpp"
#include "micro.hpp"
#include "oracles.hpp"

using namespace cutstock;

namespace {

TrainConfig small_config(const ProblemInstance& inst, int iterations, int transitions) {
  TrainConfig cfg;
  cfg.policy_iterations = iterations;
  cfg.transitions = transitions;
  cfg.cem.iterations = 3;
  cfg.cem.candidates = 30;
  cfg.basis = default_basis(BasisKind::fourier, inst);
  cfg.seed = 123;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config validation") {
  ProblemInstance inst = default_paper_instance();
  TrainConfig cfg = small_config(inst, 1, 1);
  CHECK_NOTHROW(cfg.validate(7));
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(cfg.validate(7), ValidationError);
  cfg = small_config(inst, 0, 1);
  CHECK_THROWS_AS(cfg.validate(7), ValidationError);
  cfg = small_config(inst, 1, 0);
  CHECK_THROWS_AS(cfg.validate(7), ValidationError);
  cfg = small_config(inst, 1, 1);
  CHECK_THROWS_AS(cfg.validate(6), ValidationError);
}

TEST_CASE("training is reproducible and independent of thread count") {
  ProblemInstance inst = default_paper_instance();
  TrainConfig cfg = small_config(inst, 1, 1);
  TrainRun a = train(inst, cfg);
  TrainRun b = train(inst, cfg);
  REQUIRE(a.thetas.size() == 1);
  CHECK(a.thetas[0].theta == b.thetas[0].theta);
  CHECK(a.theta0.theta == b.theta0.theta);

  TrainConfig bigger = small_config(inst, 2, 300);
  TrainRun one = train(inst, bigger);
  bigger.threads = 3;
  TrainRun three = train(inst, bigger);
  for (int i = 0; i < 2; ++i) CHECK(one.thetas[i].theta == three.thetas[i].theta);
  CHECK(one.complete);
  CHECK(one.diagnostics.size() == 2);
}

TEST_CASE("more iterations never perturb earlier ones") {
  ProblemInstance inst = default_paper_instance();
  TrainRun short_run = train(inst, small_config(inst, 2, 200));
  int calls = 0;
  TrainRun long_run = train(inst, small_config(inst, 3, 200), [&](const IterationDiagnostics&) { ++calls; });
  CHECK(calls == 3);
  REQUIRE(long_run.thetas.size() == 3);
  for (int i = 0; i < 2; ++i) CHECK(short_run.thetas[i].theta == long_run.thetas[i].theta);
}

TEST_CASE("theta0 follows the configured spread") {
  ProblemInstance inst = default_paper_instance();
  TrainConfig cfg = small_config(inst, 1, 1);
  cfg.theta0_stddev = 0.0;
  CHECK(train(inst, cfg).theta0.theta.isZero());
  cfg.theta0_stddev = 2.0;
  TrainRun run = train(inst, cfg);
  double sq = run.theta0.theta.squaredNorm() / run.theta0.theta.size();
  CHECK(sq > 2.0);
  CHECK(sq < 8.0);
}

TEST_CASE("a tiny rejection budget aborts with a partial run") {
  ProblemInstance inst = default_paper_instance();
  TrainConfig cfg = small_config(inst, 3, 200);
  cfg.cem.rejection_cap = 1;
  TrainRun run = train(inst, cfg);
  CHECK_FALSE(run.complete);
  CHECK(run.thetas.size() < 3);
  CHECK(run.failure.find("iteration 0") != std::string::npos);
}

TEST_CASE("exact policy iteration converges on a micro instance") {
  ProblemInstance inst = testing::micro_instance(3, 2, 0, 2);
  TabularFeatures tab(inst);
  RngStream rng(8);
  PolicyParams theta0{Eigen::VectorXd(tab.size())};
  for (int k = 0; k < tab.size(); ++k) theta0.theta[k] = rng.normal();
  ExactIterationResult result = policy_iteration_exhaustive(inst, tab, 0.8, theta0, 50);
  CHECK(result.converged);
  REQUIRE(result.thetas.size() >= 2);
  const PolicyParams& last = result.thetas.back();
  CHECK(last.theta == result.thetas[result.thetas.size() - 2].theta);

  // The fixed point is the q-function of its own greedy policy, and no state can improve on it.
  testing::PairIndex index(inst);
  DeterministicRule greedy = [&](const State& s) { return exact_greedy_action(inst, tab, last, s); };
  Eigen::VectorXd q = testing::tabular_q(inst, index, greedy, 0.8);
  for (int r = 0; r < tab.size(); ++r) {
    const auto& [s, x] = index.pairs[r];
    CHECK(std::abs(last.theta[tab.index(s, x)] - q[r]) <= 1e-6);
  }
}

TEST_CASE("artifact round trip") {
  ProblemInstance inst = default_paper_instance();
  TrainConfig cfg = small_config(inst, 2, 100);
  TrainRun run = train(inst, cfg);
  auto dir = std::filesystem::temp_directory_path() / "cutstock_test_trainer";
  std::filesystem::create_directories(dir);
  save_run(inst, run, dir / "a.json");
  LoadedRun loaded = load_run(dir / "a.json");
  CHECK(loaded.instance == inst);
  REQUIRE(loaded.run.thetas.size() == 2);
  for (int i = 0; i < 2; ++i) CHECK(loaded.run.thetas[i].theta == run.thetas[i].theta);
  CHECK(loaded.run.theta0.theta == run.theta0.theta);
  CHECK(loaded.run.config.basis == cfg.basis);
  CHECK(loaded.run.config.gamma == cfg.gamma);
  CHECK(loaded.run.config.cem.candidates == 30);
  CHECK(loaded.run.diagnostics[1].condition == run.diagnostics[1].condition);

  // Saving the loaded run reproduces the file byte for byte.
  save_run(loaded.instance, loaded.run, dir / "b.json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));

  nlohmann::json doc = run_to_json(inst, run);
  CHECK(doc.at("format") == kRunFormat);
  doc["format"] = "something-else";
  CHECK_THROWS_AS(run_from_json(doc), ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("basis json defaults") {
  BasisSpec spec = basis_from_json(nlohmann::json{{"kind", "polynomial"}, {"terms", nullptr}}, 7, 70);
  CHECK(spec.size() == 15);
  CHECK(spec.s_max == 70);
  CHECK(basis_from_json(basis_to_json(spec), 7, 70) == spec);
  CemConfig cem;
  cem.smoothing = 0.25;
  CemConfig back = cem_from_json(cem_to_json(cem));
  CHECK(back.smoothing == 0.25);
  CHECK(back.candidates == cem.candidates);
}
