#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace fewshot {

std::uint64_t splitmix64(std::uint64_t x);

// Seed of an independent substream, e.g. derive_seed(seed, "shapley", t).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

// Seeded generator with platform-independent derived draws. std::mt19937_64
// output is fixed by the standard, the distributions in <random> are not, so
// bounded draws are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be positive.
  std::size_t uniform_index(std::size_t bound);

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n);

  // k distinct indices of [0, n), in draw order. k is clamped to n.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace fewshot
