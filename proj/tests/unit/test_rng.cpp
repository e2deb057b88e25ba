#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "fewshot/parallel.hpp"
#include "fewshot/rng.hpp"

namespace fewshot {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(Rng(7).next(), c.next());
}

TEST(Rng, UniformIndexStaysInRange) {
  Rng rng(1);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) ++hits[rng.uniform_index(5)];
  for (const int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, PermutationIsAPermutation) {
  Rng rng(3);
  auto p = rng.permutation(10);
  std::sort(p.begin(), p.end());
  std::vector<std::size_t> expected(10);
  std::iota(expected.begin(), expected.end(), std::size_t{0});
  EXPECT_EQ(p, expected);
}

TEST(Rng, SampleIndicesDistinctAndClamped) {
  Rng rng(4);
  const auto s = rng.sample_indices(10, 4);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 4u);
  EXPECT_EQ(rng.sample_indices(3, 70).size(), 3u);
  EXPECT_TRUE(rng.sample_indices(3, 0).empty());
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, "batch", 0), derive_seed(1, "batch", 1));
  EXPECT_NE(derive_seed(1, "batch", 0), derive_seed(1, "replay", 0));
  EXPECT_NE(derive_seed(1, "batch", 0), derive_seed(2, "batch", 0));
  EXPECT_EQ(derive_seed(1, "batch", 3), derive_seed(1, "batch", 3));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (const std::size_t workers : {1u, 3u, 8u}) {
    std::vector<int> seen(100, 0);
    parallel_for(seen.size(), workers, [&](std::size_t i) { ++seen[i]; });
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
  }
}

TEST(ParallelFor, RethrowsLowestFailure) {
  try {
    parallel_for(10, 1, [](std::size_t i) {
      if (i == 3 || i == 6) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 3");
  }
}

}  // namespace
}  // namespace fewshot
