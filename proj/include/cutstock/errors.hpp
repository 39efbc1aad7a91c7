#pragma once

#include <stdexcept>
#include <string>

namespace cutstock {

/// Malformed input file (syntax or wrong value types).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input parsed but violates a model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a precondition (typically mismatched dimensions).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rejection sampler ran out of attempts.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LSTD solve requested on an accumulator that absorbed nothing.
class EmptySampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cutstock
