#include "cutstock/run_config.hpp"

#include <fstream>
#include <map>

#include "cutstock/errors.hpp"
#include "cutstock/parallel.hpp"

namespace cutstock {

namespace {

using nlohmann::json;

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> table = {
      {"L1", "train.policy_iterations"}, {"L2", "train.transitions"}, {"gamma", "train.gamma"},
      {"N1", "cem.iterations"},          {"N2", "cem.candidates"},    {"rho", "cem.elite_fraction"},
      {"seed", "train.seed"},
  };
  return table;
}

// Leaves whose contents are free-form arrays rather than nested keys.
bool is_opaque(const std::string& path) { return path == "basis.terms" || path == "sweep.gammas"; }

void check_keys(const json& user, const json& defaults, const std::string& prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!defaults.contains(it.key())) throw ValidationError("unknown config key '" + path + "'");
    const json& def = defaults.at(it.key());
    if (def.is_object() && !is_opaque(path)) {
      if (!it.value().is_object()) throw ValidationError("config key '" + path + "' must be an object");
      check_keys(it.value(), def, path);
    }
  }
}

}  // namespace

json default_run_config() {
  return json{
      {"instance", kBuiltinPaper},
      {"output_root", "run"},
      {"threads", 0},
      {"train",
       {{"gamma", 0.8},
        {"policy_iterations", 30},
        {"transitions", 50000},
        {"seed", 1},
        {"theta0_stddev", 1.0},
        {"ridge", 0.0}}},
      {"cem", cem_to_json(CemConfig{})},
      {"basis", {{"kind", "fourier"}, {"terms", nullptr}, {"normalize", false}}},
      {"eval",
       {{"replications", 10},
        {"horizon", 200},
        {"seed", 1},
        {"bootstrap_resamples", 1000},
        {"confidence", 0.95},
        {"discount", 0.8}}},
      {"sweep", {{"gammas", {0.5, 0.6, 0.7, 0.8, 0.9, 0.95}}}},
      {"myopic", {{"node_cap", 2000000}}},
  };
}

void apply_override(json& doc, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("override must look like key=value: " + assignment);
  std::string key = assignment.substr(0, eq);
  std::string text = assignment.substr(eq + 1);
  if (auto alias = aliases().find(key); alias != aliases().end()) key = alias->second;

  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json::json_pointer ptr("/" + [&] {
    std::string p = key;
    for (char& ch : p) {
      if (ch == '.') ch = '/';
    }
    return p;
  }());
  const json defaults = default_run_config();
  if (!defaults.contains(ptr)) throw ValidationError("unknown config key '" + key + "'");
  doc[ptr] = std::move(value);
}

json merge_run_config(const json& user) {
  if (!user.is_object()) throw ParseError("run config must be a JSON object");
  json merged = default_run_config();
  check_keys(user, merged, "");
  merged.merge_patch(user);
  // merge_patch deletes keys set to null; restore the null default for terms.
  if (!merged["basis"].contains("terms")) merged["basis"]["terms"] = nullptr;
  return merged;
}

json load_run_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config not found: " + path.string());
  try {
    return merge_run_config(json::parse(in, nullptr, true, /*ignore_comments=*/true));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

ProblemInstance load_instance_ref(const std::string& ref, const std::filesystem::path& base_dir) {
  if (ref == kBuiltinPaper) return default_paper_instance();
  std::filesystem::path p(ref);
  if (p.is_relative()) p = base_dir / p;
  return load_instance(p);
}

ResolvedRun resolve_run_config(const json& merged, const std::filesystem::path& base_dir) {
  try {
    RunConfig cfg;
    cfg.echo = merged;
    cfg.instance_ref = merged.at("instance").get<std::string>();
    ProblemInstance inst = load_instance_ref(cfg.instance_ref, base_dir);
    cfg.output_root = merged.at("output_root").get<std::string>();
    int threads = merged.at("threads").get<int>();
    cfg.threads = threads > 0 ? threads : default_thread_count();

    const json& t = merged.at("train");
    cfg.train.gamma = t.at("gamma").get<double>();
    cfg.train.policy_iterations = t.at("policy_iterations").get<int>();
    cfg.train.transitions = t.at("transitions").get<int>();
    cfg.train.seed = t.at("seed").get<std::uint64_t>();
    cfg.train.theta0_stddev = t.at("theta0_stddev").get<double>();
    cfg.train.ridge = t.at("ridge").get<double>();
    cfg.train.cem = cem_from_json(merged.at("cem"));
    cfg.train.basis = basis_from_json(merged.at("basis"), inst.items(), inst.s_max());
    cfg.train.threads = cfg.threads;
    cfg.train.validate(inst.items());

    const json& e = merged.at("eval");
    cfg.eval.replications = e.at("replications").get<int>();
    cfg.eval.horizon = e.at("horizon").get<int>();
    cfg.eval.seed = e.at("seed").get<std::uint64_t>();
    cfg.eval.bootstrap_resamples = e.at("bootstrap_resamples").get<int>();
    cfg.eval.confidence = e.at("confidence").get<double>();
    cfg.eval.discount = e.at("discount").get<double>();
    cfg.eval.threads = cfg.threads;
    cfg.eval.validate();

    cfg.sweep_gammas = merged.at("sweep").at("gammas").get<std::vector<double>>();
    cfg.myopic = default_myopic_config(inst);
    cfg.myopic.node_cap = merged.at("myopic").at("node_cap").get<long>();
    return ResolvedRun{std::move(inst), std::move(cfg)};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid run config: ") + e.what());
  }
}

}  // namespace cutstock
