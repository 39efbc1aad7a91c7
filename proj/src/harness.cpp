#include "cutstock/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "cutstock/cem.hpp"
#include "cutstock/errors.hpp"
#include "cutstock/parallel.hpp"

namespace cutstock {

namespace {

constexpr std::uint64_t kReplicationTag = 0x7265706c00000000ULL;
constexpr std::uint64_t kBootstrapTag = 0x626f6f7400000000ULL;
constexpr std::uint64_t kSweepTag = 0x7377656570000000ULL;

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(12);
  return out;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * (sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - lo;
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / v.size();
}

}  // namespace

void EvalConfig::validate() const {
  if (replications < 1) throw ValidationError("replications must be >= 1");
  if (horizon < 1) throw ValidationError("horizon must be >= 1");
  if (bootstrap_resamples < 1) throw ValidationError("bootstrap_resamples must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ValidationError("confidence must lie in (0, 1)");
  if (!(discount > 0.0 && discount <= 1.0)) throw ValidationError("discount must lie in (0, 1]");
}

std::vector<double> rolling_average(std::span<const double> costs) {
  std::vector<double> out(costs.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < costs.size(); ++t) {
    sum += costs[t];
    out[t] = sum / static_cast<double>(t + 1);
  }
  return out;
}

Interval bootstrap_ci(std::span<const double> values, int resamples, double confidence, RngStream rng) {
  if (values.empty()) throw ContractViolation("bootstrap of an empty sample");
  const double centre = mean_of(values);
  const auto n = static_cast<std::int64_t>(values.size());
  std::vector<double> means(resamples);
  for (int b = 0; b < resamples; ++b) {
    double sum = 0.0;
    for (std::int64_t k = 0; k < n; ++k) sum += values[rng.uniform_int(0, n - 1)];
    means[b] = sum / n;
  }
  std::sort(means.begin(), means.end());
  const double alpha = 1.0 - confidence;
  Interval ci{quantile(means, alpha / 2), quantile(means, 1.0 - alpha / 2)};
  ci.lo = std::min(ci.lo, centre);
  ci.hi = std::max(ci.hi, centre);
  return ci;
}

EvalReport simulate(const ProblemInstance& inst, const Policy& policy, const EvalConfig& cfg) {
  cfg.validate();
  EvalReport report;
  report.policy = policy.name();
  report.replications.resize(cfg.replications);
  const RngStream master(cfg.seed);

  parallel_for(cfg.replications, cfg.threads, [&](int r) {
    RngStream base = master.derive(kReplicationTag, static_cast<std::uint64_t>(r));
    RngStream init_rng = base.derive(0);
    RngStream demand_rng = base.derive(1);
    RngStream policy_rng = base.derive(2);
    ReplicationResult& rep = report.replications[r];
    State s = sample_state(inst, init_rng);
    double weight = 1.0;
    rep.costs.reserve(cfg.horizon);
    for (int t = 0; t < cfg.horizon; ++t) {
      Decision x = policy.decide(inst, s, policy_rng);
      if (!is_feasible(inst, s, x)) {
        throw std::logic_error("policy '" + policy.name() + "' returned an infeasible decision");
      }
      Demand d = sample_demand(inst, demand_rng);
      double c = cost(inst, s, x, d);
      State next = transition(inst, s, x, d);
      rep.costs.push_back(c);
      rep.discounted += weight * c;
      weight *= cfg.discount;
      if (cfg.record_traces) {
        std::vector<int> available = post_decision(inst, s, x);
        rep.trace.push_back(StepRecord{s, std::move(x), std::move(available), std::move(d), next, c});
      }
      s = std::move(next);
    }
    rep.average = mean_of(rep.costs);
  });

  std::vector<double> averages;
  report.rolling.assign(cfg.horizon, 0.0);
  for (const auto& rep : report.replications) {
    averages.push_back(rep.average);
    std::vector<double> roll = rolling_average(rep.costs);
    for (int t = 0; t < cfg.horizon; ++t) report.rolling[t] += roll[t];
  }
  for (double& v : report.rolling) v /= cfg.replications;
  report.mean = mean_of(averages);
  report.ci = bootstrap_ci(averages, cfg.bootstrap_resamples, cfg.confidence, master.derive(kBootstrapTag));
  return report;
}

Reevaluation reevaluate_run(const ProblemInstance& inst, const TrainRun& run, const CemConfig& cem,
                            const EvalConfig& cfg) {
  if (run.thetas.empty()) throw ContractViolation("training run has no policies to re-evaluate");
  auto features = std::make_shared<const BasisFeatures>(run.config.basis, inst.items());
  Reevaluation out;
  for (std::size_t i = 0; i < run.thetas.size(); ++i) {
    GreedyPolicy policy(features, run.thetas[i], cem, "theta_" + std::to_string(i + 1));
    out.reports.push_back(simulate(inst, policy, cfg));
    if (out.reports.back().mean < out.reports[out.best_index].mean) out.best_index = static_cast<int>(i);
  }
  return out;
}

std::uint64_t sweep_seed(std::uint64_t base_seed, double gamma) {
  return RngStream(base_seed).derive(kSweepTag, std::bit_cast<std::uint64_t>(gamma)).next_u64();
}

std::vector<SweepRow> sweep_gamma(const ProblemInstance& inst, std::span<const double> gammas,
                                  const TrainConfig& base, const EvalConfig& eval,
                                  const IterationCallback& on_iteration) {
  if (gammas.empty()) throw ValidationError("gamma sweep needs at least one value");
  std::vector<SweepRow> rows;
  for (double gamma : gammas) {
    TrainConfig cfg = base;
    cfg.gamma = gamma;
    cfg.seed = sweep_seed(base.seed, gamma);
    TrainRun run = train(inst, cfg, on_iteration);
    if (!run.complete) throw SamplingError("training for gamma " + std::to_string(gamma) + " failed: " + run.failure);
    Reevaluation re = reevaluate_run(inst, run, cfg.cem, eval);
    const EvalReport& best = re.reports[re.best_index];
    rows.push_back(SweepRow{gamma, re.best_index, best.mean, best.ci});
  }
  return rows;
}

void write_costs_csv(const std::filesystem::path& path, const EvalReport& report) {
  auto out = open_csv(path);
  out << "replication,step,cost,rolling_mean\n";
  for (std::size_t r = 0; r < report.replications.size(); ++r) {
    const auto& costs = report.replications[r].costs;
    std::vector<double> roll = rolling_average(costs);
    for (std::size_t t = 0; t < costs.size(); ++t) out << r << ',' << t << ',' << costs[t] << ',' << roll[t] << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, std::span<const EvalReport> reports) {
  auto out = open_csv(path);
  out << "policy,mean,ci_lo,ci_hi\n";
  for (const auto& r : reports) out << r.policy << ',' << r.mean << ',' << r.ci.lo << ',' << r.ci.hi << '\n';
}

void write_inventory_csv(const std::filesystem::path& path, const EvalReport& report) {
  auto out = open_csv(path);
  out << "step,item,initial,available,demand\n";
  if (report.replications.empty()) return;
  const auto& trace = report.replications.front().trace;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const StepRecord& step = trace[t];
    for (std::size_t i = 0; i < step.state.level.size(); ++i) {
      out << t << ',' << (i + 1) << ',' << step.state.level[i] << ',' << step.available[i] << ','
          << step.demand.qty[i] << '\n';
    }
  }
}

void write_gamma_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  auto out = open_csv(path);
  out << "gamma,mean,ci_lo,ci_hi\n";
  for (const auto& row : rows) out << row.gamma << ',' << row.mean << ',' << row.ci.lo << ',' << row.ci.hi << '\n';
}

void write_svg_chart(const std::filesystem::path& path, const std::string& title, std::span<const Series> series,
                     bool log_scale) {
  constexpr double width = 800, height = 480, left = 70, right = 160, top = 40, bottom = 50;
  double lo = INFINITY, hi = -INFINITY;
  std::size_t length = 1;
  auto map_y = [&](double v) { return log_scale ? std::log10(std::max(v, 1e-9)) : v; };
  for (const auto& s : series) {
    length = std::max(length, s.values.size());
    for (double v : s.values) {
      lo = std::min(lo, map_y(v));
      hi = std::max(hi, map_y(v));
    }
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    double v = lo + (hi - lo) * tick / 4.0;
    double y = top + plot_h * (1.0 - tick / 4.0);
    double label = log_scale ? std::pow(10.0, v) : v;
    out << "<text x=\"" << left - 6 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">step</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = palette[k % 6];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t t = 0; t < s.values.size(); ++t) {
      double x = left + plot_w * (length > 1 ? static_cast<double>(t) / (length - 1) : 0.5);
      double y = top + plot_h * (1.0 - (map_y(s.values[t]) - lo) / (hi - lo));
      out << x << ',' << y << ' ';
    }
    out << "\"/>\n";
    double ly = top + 16 + 18 * k;
    out << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 30 << "\" y2=\""
        << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << width - right + 36 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace cutstock
