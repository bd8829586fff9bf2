#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace hausdorff {

/// Counter-based generator: the i-th output is the SplitMix64 finalizer applied
/// to key + (i + 1) * 0x9E3779B97F4A7C15, with the key derived from
/// (seed, stream). Every Monte-Carlo sample owns its own stream, so results do
/// not depend on how samples are split across threads.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  bool coin() { return ((*this)() >> 63) != 0; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

/// Independent sub-seed for a named purpose (e.g. the two sides of a check).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

}  // namespace hausdorff
