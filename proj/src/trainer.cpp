#include "cutstock/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "cutstock/errors.hpp"

namespace cutstock {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTheta0Tag = 0x7468657461300000ULL;
constexpr std::uint64_t kIterationTag = 0x6974657261740000ULL;

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json& doc) {
  auto values = doc.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void TrainConfig::validate(int items) const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0, 1)");
  if (policy_iterations < 1) throw ValidationError("policy_iterations must be >= 1");
  if (transitions < 1) throw ValidationError("transitions must be >= 1");
  if (!(theta0_stddev >= 0.0)) throw ValidationError("theta0_stddev must be non-negative");
  if (ridge < 0.0) throw ValidationError("ridge must be non-negative");
  cem.validate();
  validate_basis(basis, items);
}

TrainRun train(const ProblemInstance& inst, const TrainConfig& cfg, const IterationCallback& on_iteration) {
  cfg.validate(inst.items());
  const BasisFeatures features(cfg.basis, inst.items());
  const RngStream master(cfg.seed);

  TrainRun run;
  run.config = cfg;
  RngStream init = master.derive(kTheta0Tag);
  run.theta0.theta.resize(features.size());
  for (int k = 0; k < features.size(); ++k) run.theta0.theta[k] = cfg.theta0_stddev * init.normal();

  SamplingOptions options;
  options.threads = cfg.threads;
  options.solve.ridge = cfg.ridge;

  PolicyParams current = run.theta0;
  for (int i = 0; i < cfg.policy_iterations; ++i) {
    auto started = std::chrono::steady_clock::now();
    PolicyEvaluation eval;
    try {
      eval = evaluate_policy(inst, features, current, cfg.cem, cfg.gamma, cfg.transitions,
                             master.derive(kIterationTag, static_cast<std::uint64_t>(i)), options);
    } catch (const SamplingError& e) {
      run.complete = false;
      run.failure = "iteration " + std::to_string(i) + ": " + e.what();
      return run;
    }
    IterationDiagnostics diag;
    diag.iteration = i;
    diag.path = eval.solution.path;
    diag.condition = eval.solution.condition;
    diag.rank = eval.solution.rank;
    diag.theta_norm = eval.solution.params.theta.norm();
    diag.mean_cost = eval.mean_cost;
    diag.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    current = eval.solution.params;
    run.thetas.push_back(current);
    run.diagnostics.push_back(diag);
    if (on_iteration) on_iteration(diag);
  }
  return run;
}

ExactIterationResult policy_iteration_exhaustive(const ProblemInstance& inst, const FeatureMap& features,
                                                 double gamma, PolicyParams theta0, int max_iterations) {
  ExactIterationResult out;
  PolicyParams current = std::move(theta0);
  for (int i = 0; i < max_iterations; ++i) {
    DeterministicRule greedy = [&](const State& s) { return exact_greedy_action(inst, features, current, s); };
    PolicyParams next = evaluate_policy_exhaustive(inst, features, greedy, gamma).params;
    bool repeated = next.theta == current.theta;
    out.thetas.push_back(next);
    current = std::move(next);
    if (repeated) {
      out.converged = true;
      break;
    }
  }
  return out;
}

json basis_to_json(const BasisSpec& spec) {
  return json{{"kind", to_string(spec.kind)}, {"s_max", spec.s_max}, {"normalize", spec.normalize},
              {"terms", spec.terms}};
}

BasisSpec basis_from_json(const json& doc, int items, int s_max) {
  BasisSpec spec;
  spec.kind = basis_kind_from_string(doc.value("kind", std::string("fourier")));
  spec.s_max = doc.value("s_max", s_max);
  spec.normalize = doc.value("normalize", false);
  if (doc.contains("terms") && !doc.at("terms").is_null()) {
    spec.terms = doc.at("terms").get<std::vector<std::vector<int>>>();
  } else {
    spec.terms = default_terms(spec.kind, items);
  }
  validate_basis(spec, items);
  return spec;
}

json cem_to_json(const CemConfig& cfg) {
  return json{{"iterations", cfg.iterations},       {"candidates", cfg.candidates},
              {"elite_fraction", cfg.elite_fraction}, {"rejection_cap", cfg.rejection_cap},
              {"smoothing", cfg.smoothing}};
}

CemConfig cem_from_json(const json& doc) {
  CemConfig cfg;
  cfg.iterations = doc.value("iterations", cfg.iterations);
  cfg.candidates = doc.value("candidates", cfg.candidates);
  cfg.elite_fraction = doc.value("elite_fraction", cfg.elite_fraction);
  cfg.rejection_cap = doc.value("rejection_cap", cfg.rejection_cap);
  cfg.smoothing = doc.value("smoothing", cfg.smoothing);
  cfg.validate();
  return cfg;
}

json run_to_json(const ProblemInstance& inst, const TrainRun& run) {
  const TrainConfig& cfg = run.config;
  json doc;
  doc["format"] = kRunFormat;
  doc["version"] = kRunFormatVersion;
  doc["instance"] = instance_to_json(inst);
  doc["basis"] = basis_to_json(cfg.basis);
  doc["config"] = {{"gamma", cfg.gamma},
                   {"policy_iterations", cfg.policy_iterations},
                   {"transitions", cfg.transitions},
                   {"seed", cfg.seed},
                   {"theta0_stddev", cfg.theta0_stddev},
                   {"ridge", cfg.ridge},
                   {"cem", cem_to_json(cfg.cem)}};
  doc["theta0"] = vector_to_json(run.theta0.theta);
  json thetas = json::array();
  for (const auto& p : run.thetas) thetas.push_back(vector_to_json(p.theta));
  doc["thetas"] = std::move(thetas);
  json diags = json::array();
  for (const auto& d : run.diagnostics) {
    diags.push_back({{"iteration", d.iteration},
                     {"solver_path", to_string(d.path)},
                     {"condition", finite_or_null(d.condition)},
                     {"rank", d.rank},
                     {"theta_norm", d.theta_norm},
                     {"mean_cost", d.mean_cost}});
  }
  doc["diagnostics"] = std::move(diags);
  doc["complete"] = run.complete;
  doc["failure"] = run.failure;
  return doc;
}

LoadedRun run_from_json(const json& doc) {
  try {
    if (doc.value("format", std::string()) != kRunFormat) throw ParseError("not a training artifact");
    if (doc.value("version", 0) != kRunFormatVersion) throw ParseError("unsupported artifact version");
    ProblemInstance inst = instance_from_json(doc.at("instance"));
    TrainRun run;
    const json& c = doc.at("config");
    run.config.gamma = c.at("gamma").get<double>();
    run.config.policy_iterations = c.at("policy_iterations").get<int>();
    run.config.transitions = c.at("transitions").get<int>();
    run.config.seed = c.at("seed").get<std::uint64_t>();
    run.config.theta0_stddev = c.at("theta0_stddev").get<double>();
    run.config.ridge = c.at("ridge").get<double>();
    run.config.cem = cem_from_json(c.at("cem"));
    run.config.basis = basis_from_json(doc.at("basis"), inst.items(), inst.s_max());
    run.theta0.theta = vector_from_json(doc.at("theta0"));
    for (const json& t : doc.at("thetas")) {
      PolicyParams p{vector_from_json(t)};
      if (p.size() != run.config.basis.size()) throw ParseError("theta length does not match the basis");
      run.thetas.push_back(std::move(p));
    }
    for (const json& d : doc.at("diagnostics")) {
      IterationDiagnostics diag;
      diag.iteration = d.at("iteration").get<int>();
      diag.path = d.at("solver_path").get<std::string>() == "exact" ? SolvePath::exact : SolvePath::pseudo_inverse;
      diag.condition = d.at("condition").is_null() ? INFINITY : d.at("condition").get<double>();
      diag.rank = d.at("rank").get<int>();
      diag.theta_norm = d.at("theta_norm").get<double>();
      diag.mean_cost = d.at("mean_cost").get<double>();
      run.diagnostics.push_back(diag);
    }
    run.complete = doc.at("complete").get<bool>();
    run.failure = doc.at("failure").get<std::string>();
    return LoadedRun{std::move(inst), std::move(run)};
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed training artifact: ") + e.what());
  }
}

void save_run(const ProblemInstance& inst, const TrainRun& run, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << run_to_json(inst, run).dump(1) << '\n';
}

LoadedRun load_run(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open artifact " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return run_from_json(doc);
}

}  // namespace cutstock
