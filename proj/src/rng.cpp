#include "cutstock/rng.hpp"

#include <cmath>
#include <numbers>

#include "cutstock/errors.hpp"

namespace cutstock {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kDeriveSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : key_(splitmix64_mix(seed ^ kDeriveSalt)) {}

RngStream RngStream::derive(std::uint64_t tag) const {
  std::uint64_t child = splitmix64_mix(key_ + splitmix64_mix(tag + kDeriveSalt));
  return RngStream(child, 0, 0);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return splitmix64_mix(key_ + counter_ * kGolden);
}

double RngStream::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ContractViolation("uniform_int: empty range");
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit span
  const std::uint64_t threshold = (0 - range) % range;
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return lo + static_cast<std::int64_t>(r % range);
  }
}

double RngStream::normal() {
  double u1 = 1.0 - uniform01();  // (0, 1]
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Categorical::Categorical(std::span<const double> probs) : cumulative_(probs.size()) {
  if (probs.empty()) throw ContractViolation("categorical distribution needs at least one outcome");
  double acc = 0.0;
  bool any = false;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] < 0.0) throw ContractViolation("negative probability");
    acc += probs[j];
    cumulative_[j] = acc;
    if (probs[j] > 0.0) {
      last_positive_ = static_cast<int>(j);
      any = true;
    }
  }
  if (!any) throw ContractViolation("probabilities are all zero");
}

int Categorical::sample(RngStream& rng) const {
  // Scale by the realised total so rounding in the running sum cannot leave a gap.
  double u = rng.uniform01() * cumulative_.back();
  for (int j = 0; j < last_positive_; ++j) {
    if (u < cumulative_[j]) return j;
  }
  return last_positive_;
}

}  // namespace cutstock
