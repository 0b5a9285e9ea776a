#include "stance/random.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>

namespace stance {

std::uint64_t SeededSampler::below(std::uint64_t bound) {
  // Rejection sampling keeps the draw unbiased and implementation-independent.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t v = engine_();
    if (v < limit) return v % bound;
  }
}

std::vector<std::size_t> SeededSampler::permutation(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::vector<std::size_t> SeededSampler::sample(std::size_t n, std::size_t k) {
  auto idx = permutation(n);
  idx.resize(std::min(k, n));
  return idx;
}

}  // namespace stance
