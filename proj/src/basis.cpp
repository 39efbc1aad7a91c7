#include "cutstock/basis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numbers>
#include <set>

#include "cutstock/errors.hpp"

namespace cutstock {

namespace {

std::atomic<long> g_clamp_events{0};

std::vector<int> pair_key(const State& s, const Decision& x) {
  std::vector<int> key = s.level;
  key.insert(key.end(), x.count.begin(), x.count.end());
  return key;
}

}  // namespace

std::string to_string(BasisKind kind) { return kind == BasisKind::polynomial ? "polynomial" : "fourier"; }

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "polynomial") return BasisKind::polynomial;
  if (name == "fourier") return BasisKind::fourier;
  throw ValidationError("unknown basis kind '" + name + "' (expected polynomial or fourier)");
}

void validate_basis(const BasisSpec& spec, int items) {
  if (spec.terms.empty()) throw ValidationError("basis needs at least one term");
  if (spec.s_max < 1) throw ValidationError("basis s_max must be positive");
  for (std::size_t k = 0; k < spec.terms.size(); ++k) {
    const auto& t = spec.terms[k];
    if (static_cast<int>(t.size()) != items) {
      throw ValidationError("basis term " + std::to_string(k) + " has length " + std::to_string(t.size()) +
                            ", expected " + std::to_string(items));
    }
    if (std::any_of(t.begin(), t.end(), [](int c) { return c < 0; })) {
      throw ValidationError("basis term " + std::to_string(k) + " has a negative entry");
    }
  }
  if (spec.kind == BasisKind::fourier) {
    std::set<std::vector<int>> seen;
    for (std::size_t k = 0; k < spec.terms.size(); ++k) {
      if (!seen.insert(spec.terms[k]).second) {
        throw ValidationError("duplicate Fourier frequency vector at term " + std::to_string(k));
      }
    }
  }
}

std::vector<std::vector<int>> default_terms(BasisKind kind, int items) {
  if (items < 1) throw ContractViolation("default_terms: need at least one item");
  std::vector<std::vector<int>> terms;
  terms.emplace_back(items, 0);
  if (kind == BasisKind::polynomial) {
    for (int power = 1; power <= 2; ++power) {
      for (int i = 0; i < items; ++i) {
        std::vector<int> t(items, 0);
        t[i] = power;
        terms.push_back(std::move(t));
      }
    }
    return terms;
  }
  for (int i = 0; i < items; ++i) {
    for (int c = 1; c <= 2; ++c) {
      std::vector<int> t(items, 0);
      t[i] = c;
      terms.push_back(std::move(t));
    }
  }
  for (int i = 0; i < items; ++i) {
    for (int j = i + 1; j < items; ++j) {
      for (int ci = 1; ci <= 2; ++ci) {
        for (int cj = 1; cj <= 2; ++cj) {
          std::vector<int> t(items, 0);
          t[i] = ci;
          t[j] = cj;
          terms.push_back(std::move(t));
        }
      }
    }
  }
  return terms;
}

BasisSpec default_basis(BasisKind kind, const ProblemInstance& inst) {
  return BasisSpec{kind, default_terms(kind, inst.items()), inst.s_max(), false};
}

double q_value(const FeatureVector& phi, const PolicyParams& params) {
  if (phi.size() != params.theta.size()) {
    throw ContractViolation("q_value: feature length " + std::to_string(phi.size()) + " but theta length " +
                            std::to_string(params.theta.size()));
  }
  return phi.dot(params.theta);
}

FeatureVector FeatureMap::operator()(const ProblemInstance& inst, const State& s, const Decision& x) const {
  FeatureVector phi(size());
  evaluate(inst, s, x, phi);
  return phi;
}

double FeatureMap::q_value(const ProblemInstance& inst, const State& s, const Decision& x,
                           const PolicyParams& params) const {
  return cutstock::q_value((*this)(inst, s, x), params);
}

BasisFeatures::BasisFeatures(BasisSpec spec, int items) : spec_(std::move(spec)), items_(items) {
  validate_basis(spec_, items_);
  int max_order = 0;
  for (const auto& t : spec_.terms) {
    std::vector<Factor> factors;
    int order = 0;
    for (int i = 0; i < items_; ++i) {
      if (t[i] != 0) factors.push_back({i, t[i]});
      order += t[i];
    }
    max_order = std::max(max_order, order);
    sparse_.push_back(std::move(factors));
  }
  if (spec_.kind == BasisKind::fourier) {
    const long entries = static_cast<long>(max_order) * spec_.s_max + 1;
    cos_table_.resize(entries);
    for (long v = 0; v < entries; ++v) {
      cos_table_[v] = std::cos(std::numbers::pi * static_cast<double>(v) / spec_.s_max);
    }
  }
}

long BasisFeatures::clamp_events() { return g_clamp_events.load(); }

int BasisFeatures::clamp(int value) const {
  if (value >= 0 && value <= spec_.s_max) return value;
  if (g_clamp_events.fetch_add(1) == 0) {
    std::cerr << "warning: post-decision state outside [0, s_max] passed to the Fourier basis; clamping\n";
  }
  return std::clamp(value, 0, spec_.s_max);
}

double BasisFeatures::feature(int k, std::span<const int> post) const {
  const auto& factors = sparse_[k];
  if (spec_.kind == BasisKind::fourier) {
    long arg = 0;
    for (const Factor& f : factors) arg += static_cast<long>(f.power) * clamp(post[f.item]);
    return cos_table_[arg];
  }
  double value = 1.0;
  for (const Factor& f : factors) {
    double base = spec_.normalize ? static_cast<double>(post[f.item]) / spec_.s_max : post[f.item];
    for (int p = 0; p < f.power; ++p) value *= base;
  }
  return value;
}

void BasisFeatures::evaluate_post(std::span<const int> post, Eigen::Ref<Eigen::VectorXd> out) const {
  if (static_cast<int>(post.size()) != items_) throw ContractViolation("post-decision state has wrong length");
  if (out.size() != size()) throw ContractViolation("feature output has wrong length");
  for (int k = 0; k < size(); ++k) out[k] = feature(k, post);
}

double BasisFeatures::q_post(std::span<const int> post, const Eigen::VectorXd& theta) const {
  if (theta.size() != size()) throw ContractViolation("theta length does not match basis size");
  double q = 0.0;
  for (int k = 0; k < size(); ++k) q += feature(k, post) * theta[k];
  return q;
}

void BasisFeatures::evaluate(const ProblemInstance& inst, const State& s, const Decision& x,
                             Eigen::Ref<Eigen::VectorXd> out) const {
  std::vector<int> post = post_decision(inst, s, x);
  evaluate_post(post, out);
}

double BasisFeatures::q_value(const ProblemInstance& inst, const State& s, const Decision& x,
                              const PolicyParams& params) const {
  std::vector<int> post = post_decision(inst, s, x);
  return q_post(post, params.theta);
}

FeatureVector features(const ProblemInstance& inst, const BasisSpec& spec, const State& s, const Decision& x) {
  return BasisFeatures(spec, inst.items())(inst, s, x);
}

TabularFeatures::TabularFeatures(const ProblemInstance& inst) {
  for (const State& s : enumerate_states(inst)) {
    for (Decision& x : enumerate_feasible(inst, s)) {
      lookup_.emplace(pair_key(s, x), static_cast<int>(pairs_.size()));
      pairs_.emplace_back(s, std::move(x));
    }
  }
}

int TabularFeatures::index(const State& s, const Decision& x) const {
  auto it = lookup_.find(pair_key(s, x));
  if (it == lookup_.end()) throw ContractViolation("state/decision pair is not in the tabular index");
  return it->second;
}

void TabularFeatures::evaluate(const ProblemInstance&, const State& s, const Decision& x,
                               Eigen::Ref<Eigen::VectorXd> out) const {
  if (out.size() != size()) throw ContractViolation("feature output has wrong length");
  out.setZero();
  out[index(s, x)] = 1.0;
}

double TabularFeatures::q_value(const ProblemInstance&, const State& s, const Decision& x,
                                const PolicyParams& params) const {
  if (params.theta.size() != size()) throw ContractViolation("theta length does not match table size");
  return params.theta[index(s, x)];
}

}  // namespace cutstock
