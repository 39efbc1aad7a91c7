#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cutstock/dynamics.hpp"
#include "cutstock/instance.hpp"

namespace cutstock {

enum class BasisKind { polynomial, fourier };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

/// Declarative basis over the post-decision state s^x = s + A x.
///
/// Polynomial: phi_k = prod_i (s^x_i)^{c_ki} on the raw state (or on
/// s^x / s_max when `normalize` is set).
/// Fourier: phi_k = cos(pi * c_k . s^x / s_max), cosine terms only.
struct BasisSpec {
  BasisKind kind = BasisKind::fourier;
  std::vector<std::vector<int>> terms;
  int s_max = 1;
  bool normalize = false;

  int size() const { return static_cast<int>(terms.size()); }
  bool operator==(const BasisSpec&) const = default;
};

/// Throws ValidationError unless K >= 1, each term has length `items` with
/// non-negative entries and (Fourier) no term is repeated.
void validate_basis(const BasisSpec& spec, int items);

/// Polynomial: bias, linear and pure quadratic monomials (K = 2m + 1).
/// Fourier: zero vector plus every frequency vector with one or two nonzero
/// entries drawn from {1, 2} (K = 1 + 2m + 2m(m - 1)).
std::vector<std::vector<int>> default_terms(BasisKind kind, int items);
BasisSpec default_basis(BasisKind kind, const ProblemInstance& inst);

using FeatureVector = Eigen::VectorXd;

struct PolicyParams {
  Eigen::VectorXd theta;

  int size() const { return static_cast<int>(theta.size()); }
};

/// sum_k phi_k theta_k.
double q_value(const FeatureVector& phi, const PolicyParams& params);

/// phi(s, x) for a fixed instance.
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;

  virtual int size() const = 0;
  virtual void evaluate(const ProblemInstance& inst, const State& s, const Decision& x,
                        Eigen::Ref<Eigen::VectorXd> out) const = 0;

  FeatureVector operator()(const ProblemInstance& inst, const State& s, const Decision& x) const;
  virtual double q_value(const ProblemInstance& inst, const State& s, const Decision& x,
                         const PolicyParams& params) const;
};

/// Compiled form of a BasisSpec: sparse terms and, for Fourier, a cosine
/// table indexed by the integer c_k . s^x.
class BasisFeatures final : public FeatureMap {
 public:
  BasisFeatures(BasisSpec spec, int items);

  const BasisSpec& spec() const { return spec_; }
  int size() const override { return spec_.size(); }

  void evaluate(const ProblemInstance& inst, const State& s, const Decision& x,
                Eigen::Ref<Eigen::VectorXd> out) const override;
  double q_value(const ProblemInstance& inst, const State& s, const Decision& x,
                 const PolicyParams& params) const override;

  void evaluate_post(std::span<const int> post, Eigen::Ref<Eigen::VectorXd> out) const;
  double q_post(std::span<const int> post, const Eigen::VectorXd& theta) const;
  double feature(int k, std::span<const int> post) const;

  /// Number of post-decision components clipped into [0, s_max] so far.
  static long clamp_events();

 private:
  struct Factor {
    int item;
    int power;
  };

  int clamp(int value) const;

  BasisSpec spec_;
  int items_;
  std::vector<std::vector<Factor>> sparse_;
  std::vector<double> cos_table_;
};

/// phi(s, x) from a BasisSpec; convenience wrapper around BasisFeatures.
FeatureVector features(const ProblemInstance& inst, const BasisSpec& spec, const State& s, const Decision& x);

/// One-hot indicator over every (state, feasible decision) pair of an
/// enumerable instance. Exact tabular representation of any q-function.
class TabularFeatures final : public FeatureMap {
 public:
  explicit TabularFeatures(const ProblemInstance& inst);

  int size() const override { return static_cast<int>(pairs_.size()); }
  void evaluate(const ProblemInstance& inst, const State& s, const Decision& x,
                Eigen::Ref<Eigen::VectorXd> out) const override;
  double q_value(const ProblemInstance& inst, const State& s, const Decision& x,
                 const PolicyParams& params) const override;

  int index(const State& s, const Decision& x) const;
  const std::vector<std::pair<State, Decision>>& pairs() const { return pairs_; }

 private:
  std::vector<std::pair<State, Decision>> pairs_;
  std::map<std::vector<int>, int> lookup_;
};

}  // namespace cutstock
