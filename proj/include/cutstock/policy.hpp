#pragma once

#include <string>

#include "cutstock/dynamics.hpp"
#include "cutstock/instance.hpp"
#include "cutstock/rng.hpp"

namespace cutstock {

/// Stationary decision rule. decide() must return a decision feasible for s.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Decision decide(const ProblemInstance& inst, const State& s, RngStream& rng) const = 0;
  virtual std::string name() const = 0;
};

}  // namespace cutstock
