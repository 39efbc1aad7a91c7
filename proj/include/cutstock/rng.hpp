#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cutstock {

/// Counter-based generator: the k-th output of a stream is
/// splitmix64_mix(key + k * 0x9E3779B97F4A7C15). Output depends only on
/// (key, k), so sequences are bit-identical across platforms and child
/// streams can be derived without touching the parent's counter.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Independent child stream keyed by (this stream's key, tag).
  RngStream derive(std::uint64_t tag) const;
  RngStream derive(std::uint64_t tag_a, std::uint64_t tag_b) const { return derive(tag_a).derive(tag_b); }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer on [lo, hi], exact (rejection on the biased tail).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal via Box-Muller; consumes two draws per call.
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  RngStream(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

/// Cumulative table for repeated categorical draws from a fixed probability vector.
class Categorical {
 public:
  explicit Categorical(std::span<const double> probs);

  int sample(RngStream& rng) const;
  int size() const { return static_cast<int>(cumulative_.size()); }

 private:
  std::vector<double> cumulative_;
  int last_positive_ = 0;
};

}  // namespace cutstock
