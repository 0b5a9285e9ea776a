#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace stance {

/// Seeded sampling whose output depends only on the seed, never on the
/// standard library's distribution implementations.
class SeededSampler {
 public:
  explicit SeededSampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Fisher-Yates shuffle of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

  /// First k indices of a seeded permutation of 0..n-1 (k <= n).
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace stance
