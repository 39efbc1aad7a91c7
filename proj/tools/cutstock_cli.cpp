// Command-line front end: train, evaluate, sweep, inspect, validate.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cutstock/baselines.hpp"
#include "cutstock/cem.hpp"
#include "cutstock/errors.hpp"
#include "cutstock/harness.hpp"
#include "cutstock/run_config.hpp"
#include "cutstock/trainer.hpp"

namespace fs = std::filesystem;
using namespace cutstock;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitRuntime = 4;
constexpr const char* kOutputRootEnv = "CUTSTOCK_OUTPUT_ROOT";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_root;
  std::string name;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Run config file (JSON); defaults apply when omitted");
  cmd->add_option("--override", opts.overrides, "Set a config value, e.g. train.transitions=5000 or L2=5000")
      ->take_all();
  cmd->add_option("--output-root", opts.output_root,
                  std::string("Root directory for run outputs (default: $") + kOutputRootEnv +
                      ", then config output_root)");
  cmd->add_option("--name", opts.name, "Run directory name (default: timestamp)");
  cmd->add_option("--threads", opts.threads, "Worker threads (default: config, 0 = all cores)")->check(CLI::NonNegativeNumber);
}

std::string timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  localtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return out.str();
}

class RunLog {
 public:
  explicit RunLog(const fs::path& path) : file_(path, std::ios::app) {}
  template <typename... Args>
  void line(const Args&... args) {
    std::ostringstream msg;
    (msg << ... << args);
    std::string text = "[" + timestamp() + "] " + msg.str();
    std::cerr << text << '\n';
    if (file_) file_ << text << '\n' << std::flush;
  }

 private:
  std::ofstream file_;
};

struct Context {
  ResolvedRun resolved;
  fs::path run_dir;
  std::unique_ptr<RunLog> log;

  const ProblemInstance& inst() const { return resolved.instance; }
  RunConfig& cfg() { return resolved.config; }
};

Context open_context(const CommonOptions& opts, const std::vector<std::string>& extra_overrides) {
  json doc;
  fs::path base_dir = fs::current_path();
  if (!opts.config_path.empty()) {
    doc = load_run_config_file(opts.config_path);
    base_dir = fs::absolute(opts.config_path).parent_path();
  } else {
    doc = default_run_config();
  }
  for (const auto& o : opts.overrides) apply_override(doc, o);
  for (const auto& o : extra_overrides) apply_override(doc, o);
  if (opts.threads > 0) doc["threads"] = opts.threads;

  Context ctx{resolve_run_config(doc, base_dir), {}, {}};
  fs::path root = ctx.cfg().output_root;
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) root = env;
  if (!opts.output_root.empty()) root = opts.output_root;
  ctx.run_dir = root / (opts.name.empty() ? timestamp() : opts.name);
  fs::create_directories(ctx.run_dir / "logs");
  fs::create_directories(ctx.run_dir / "csv");
  {
    std::ofstream echo(ctx.run_dir / "config.json", std::ios::binary);
    echo << ctx.cfg().echo.dump(2) << '\n';
  }
  ctx.log = std::make_unique<RunLog>(ctx.run_dir / "logs" / "run.log");
  return ctx;
}

void log_iteration(RunLog& log, const IterationDiagnostics& d) {
  log.line("iteration ", d.iteration + 1, ": solver=", to_string(d.path), " cond=", d.condition, " rank=", d.rank,
           " |theta|=", d.theta_norm, " mean_sampled_cost=", d.mean_cost, " wall=", d.wall_seconds, "s");
}

void print_summary(std::span<const EvalReport> reports) {
  std::cout << std::left << std::setw(24) << "policy" << std::right << std::setw(14) << "mean_cost" << std::setw(14)
            << "ci_lo" << std::setw(14) << "ci_hi" << '\n';
  std::cout << std::fixed << std::setprecision(2);
  for (const auto& r : reports) {
    std::cout << std::left << std::setw(24) << r.policy << std::right << std::setw(14) << r.mean << std::setw(14)
              << r.ci.lo << std::setw(14) << r.ci.hi << '\n';
  }
  std::cout.unsetf(std::ios::fixed);
}

std::vector<double> parse_gammas(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      double g = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(g);
    } catch (const std::exception&) {
      throw UsageError("bad gamma value '" + item + "'");
    }
  }
  return out;
}

int cmd_train(const CommonOptions& opts, const std::string& seed) {
  std::vector<std::string> extra;
  if (!seed.empty()) extra.push_back("train.seed=" + seed);
  Context ctx = open_context(opts, extra);
  const TrainConfig& tc = ctx.cfg().train;
  ctx.log->line("train: instance=", ctx.cfg().instance_ref, " basis=", to_string(tc.basis.kind), " K=",
                tc.basis.size(), " gamma=", tc.gamma, " L1=", tc.policy_iterations, " L2=", tc.transitions,
                " seed=", tc.seed, " threads=", tc.threads);
  TrainRun run = train(ctx.inst(), tc, [&](const IterationDiagnostics& d) { log_iteration(*ctx.log, d); });
  fs::path artifact = ctx.run_dir / "artifact.json";
  save_run(ctx.inst(), run, artifact);
  if (!run.complete) {
    ctx.log->line("train: aborted (", run.failure, "); partial artifact with ", run.thetas.size(),
                  " policies written to ", artifact.string());
    return kExitRuntime;
  }
  ctx.log->line("train: wrote ", run.thetas.size(), " policies to ", artifact.string());
  std::cout << artifact.string() << '\n';
  return kExitOk;
}

void write_policy_outputs(const fs::path& csv_dir, const EvalReport& report) {
  fs::path dir = csv_dir / report.policy;
  fs::create_directories(dir);
  write_costs_csv(dir / "costs.csv", report);
  write_inventory_csv(dir / "inventory.csv", report);
}

int cmd_evaluate(const CommonOptions& opts, const std::vector<std::string>& targets, const std::string& select,
                 int replications, const std::string& seed) {
  std::vector<std::string> extra;
  if (replications > 0) extra.push_back("eval.replications=" + std::to_string(replications));
  if (!seed.empty()) extra.push_back("eval.seed=" + seed);
  Context ctx = open_context(opts, extra);
  const ProblemInstance& inst = ctx.inst();
  const EvalConfig& ec = ctx.cfg().eval;
  fs::path csv_dir = ctx.run_dir / "csv";
  std::vector<EvalReport> summary;

  for (const std::string& target : targets) {
    if (target == "myopic") {
      MyopicPolicy policy(ctx.cfg().myopic);
      ctx.log->line("evaluate: myopic policy, ", ec.replications, " replications x ", ec.horizon, " steps");
      summary.push_back(simulate(inst, policy, ec));
      ctx.log->line("evaluate: myopic clipped periods = ", policy.clipped_periods());
    } else if (target == "random") {
      ctx.log->line("evaluate: random policy, ", ec.replications, " replications x ", ec.horizon, " steps");
      summary.push_back(simulate(inst, RandomPolicy{}, ec));
    } else {
      LoadedRun loaded = load_run(target);
      if (!(loaded.instance == inst)) {
        ctx.log->line("evaluate: note: artifact instance differs from the configured instance; using the artifact's");
      }
      const ProblemInstance& run_inst = loaded.instance;
      const TrainRun& run = loaded.run;
      if (run.thetas.empty()) throw std::runtime_error("artifact has no policies");
      auto features = std::make_shared<const BasisFeatures>(run.config.basis, run_inst.items());
      if (select == "best" || select == "all") {
        ctx.log->line("evaluate: re-evaluating ", run.thetas.size(), " policies from ", target);
        Reevaluation re = reevaluate_run(run_inst, run, run.config.cem, ec);
        write_summary_csv(csv_dir / "reevaluation.csv", re.reports);
        std::vector<double> curve;
        for (const auto& r : re.reports) curve.push_back(r.mean);
        std::vector<Series> s{{"mean cost per policy iteration", curve}};
        write_svg_chart(ctx.run_dir / "csv" / "reevaluation.svg", "Re-evaluated policies", s, true);
        ctx.log->line("evaluate: best policy is ", re.reports[re.best_index].policy);
        if (select == "all") {
          for (auto& r : re.reports) summary.push_back(std::move(r));
        } else {
          summary.push_back(std::move(re.reports[re.best_index]));
        }
      } else {
        int index = 0;
        if (select == "last") {
          index = static_cast<int>(run.thetas.size()) - 1;
        } else {
          try {
            index = std::stoi(select) - 1;
          } catch (const std::exception&) {
            throw UsageError("--select must be best, all, last or a 1-based policy index");
          }
        }
        if (index < 0 || index >= static_cast<int>(run.thetas.size())) throw UsageError("--select index out of range");
        GreedyPolicy policy(features, run.thetas[index], run.config.cem, "theta_" + std::to_string(index + 1));
        summary.push_back(simulate(run_inst, policy, ec));
      }
    }
  }

  std::vector<Series> rolling;
  for (const auto& r : summary) {
    write_policy_outputs(csv_dir, r);
    rolling.push_back({r.policy, r.rolling});
  }
  write_summary_csv(csv_dir / "summary.csv", summary);
  write_svg_chart(csv_dir / "rolling_cost.svg", "Rolling average cost", rolling, true);
  print_summary(summary);
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opts, const std::string& gamma_text, bool gammas_given) {
  Context ctx = open_context(opts, {});
  std::vector<double> gammas = ctx.cfg().sweep_gammas;
  if (gammas_given) gammas = parse_gammas(gamma_text);
  if (gammas.empty()) throw UsageError("gamma list is empty");
  ctx.log->line("sweep: ", gammas.size(), " discount factors, L1=", ctx.cfg().train.policy_iterations,
                " L2=", ctx.cfg().train.transitions);
  auto rows = sweep_gamma(ctx.inst(), gammas, ctx.cfg().train, ctx.cfg().eval,
                          [&](const IterationDiagnostics& d) { log_iteration(*ctx.log, d); });
  write_gamma_sweep_csv(ctx.run_dir / "csv" / "gamma_sweep.csv", rows);
  std::cout << std::setw(8) << "gamma" << std::setw(14) << "mean_cost" << std::setw(14) << "ci_lo" << std::setw(14)
            << "ci_hi" << '\n'
            << std::fixed << std::setprecision(2);
  for (const auto& r : rows) {
    std::cout << std::setw(8) << r.gamma << std::setw(14) << r.mean << std::setw(14) << r.ci.lo << std::setw(14)
              << r.ci.hi << '\n';
  }
  return kExitOk;
}

int cmd_inspect(const std::string& path) {
  LoadedRun loaded = load_run(path);
  const TrainRun& run = loaded.run;
  const TrainConfig& c = run.config;
  std::cout << "basis: " << to_string(c.basis.kind) << " K=" << c.basis.size() << '\n'
            << "gamma=" << c.gamma << " L1=" << c.policy_iterations << " L2=" << c.transitions << " seed=" << c.seed
            << " cem=(" << c.cem.iterations << ", " << c.cem.candidates << ", " << c.cem.elite_fraction << ")\n"
            << "complete: " << (run.complete ? "yes" : "no (" + run.failure + ")") << '\n';
  std::cout << std::setw(6) << "iter" << std::setw(16) << "solver" << std::setw(14) << "condition" << std::setw(6)
            << "rank" << std::setw(14) << "|theta|" << std::setw(16) << "sampled_cost" << '\n';
  for (const auto& d : run.diagnostics) {
    std::cout << std::setw(6) << d.iteration + 1 << std::setw(16) << to_string(d.path) << std::setw(14)
              << std::setprecision(4) << d.condition << std::setw(6) << d.rank << std::setw(14) << d.theta_norm
              << std::setw(16) << d.mean_cost << '\n';
  }
  return kExitOk;
}

int cmd_validate(const std::string& ref) {
  ProblemInstance inst = load_instance_ref(ref, fs::current_path());
  std::cout << "ok: " << inst.items() << " items, " << inst.pattern_count() << " patterns, object length "
            << inst.patterns().object_length << ", s_max=" << inst.s_max() << ", x_max=" << inst.x_max() << '\n'
            << "trim:";
  for (int t : inst.patterns().trim) std::cout << ' ' << t;
  std::cout << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic cutting stock: approximate policy iteration and baselines"};
  app.require_subcommand(1);
  app.allow_extras(false);

  CommonOptions train_opts, eval_opts, sweep_opts;
  std::string train_seed, eval_seed, select = "best", gamma_text, inspect_path, validate_ref;
  std::vector<std::string> targets;
  int replications = 0;

  auto* train_cmd = app.add_subcommand("train", "Run approximate policy iteration and write a training artifact");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--seed", train_seed, "Training seed (overrides train.seed)");

  auto* eval_cmd = app.add_subcommand("evaluate", "Simulate policies and write cost CSVs");
  add_common(eval_cmd, eval_opts);
  eval_cmd->add_option("targets", targets, "Training artifact path(s), 'myopic' or 'random'")->required();
  eval_cmd->add_option("--select", select, "For artifacts: best (default), all, last or a 1-based index");
  eval_cmd->add_option("--replications", replications, "Simulation replications (overrides eval.replications)")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed (overrides eval.seed)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Train and re-evaluate for several discount factors");
  add_common(sweep_cmd, sweep_opts);
  auto* gammas_opt = sweep_cmd->add_option("--gammas", gamma_text, "Comma-separated discount factors");

  auto* inspect_cmd = app.add_subcommand("inspect", "Print a training artifact's diagnostics and theta norms");
  inspect_cmd->add_option("artifact", inspect_path, "Training artifact")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Check an instance file");
  validate_cmd->add_option("instance", validate_ref, "Instance file or builtin:paper")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_opts, train_seed);
    if (*eval_cmd) return cmd_evaluate(eval_opts, targets, select, replications, eval_seed);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, gamma_text, gammas_opt->count() > 0);
    if (*inspect_cmd) return cmd_inspect(inspect_path);
    if (*validate_cmd) return cmd_validate(validate_ref);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SamplingError& e) {
    std::cerr << "runtime error (sampling): " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
