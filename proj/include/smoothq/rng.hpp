#pragma once

#include <cstddef>
#include <cstdint>

namespace smoothq {

/// splitmix64 stream. Every random draw in the library goes through this type,
/// so a seed fully determines a run on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in [0, n). Unbiased (rejection on the top of the range).
  std::size_t uniform_index(std::size_t n);

  /// True with probability p.
  bool bernoulli(double p);

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace smoothq
