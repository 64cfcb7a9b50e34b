#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "hgr/rng.hpp"

TEST(Rng, SameSeedSameStream) {
  hgr::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformIndexInRange) {
  hgr::Rng r(1);
  for (std::size_t n : {1u, 2u, 3u, 7u, 1000u}) {
    for (int i = 0; i < 200; ++i) EXPECT_LT(r.uniform_index(n), n);
  }
}

TEST(Rng, Uniform01HalfOpen) {
  hgr::Rng r(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, SampleWithoutReplacementDistinctSubset) {
  hgr::Rng r(3);
  std::vector<int> pool(50);
  std::iota(pool.begin(), pool.end(), 100);
  for (std::size_t k : {0u, 1u, 10u, 50u, 80u}) {
    const auto s = r.sample_without_replacement(pool, k);
    EXPECT_EQ(s.size(), std::min<std::size_t>(k, pool.size()));
    std::set<int> uniq(s.begin(), s.end());
    EXPECT_EQ(uniq.size(), s.size());
    for (int v : s) EXPECT_TRUE(v >= 100 && v < 150);
  }
}

TEST(Rng, ShuffleIsPermutation) {
  hgr::Rng r(5);
  std::vector<int> v(30);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  r.shuffle(w);
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

TEST(Rng, MixSeedSeparatesSalts) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(hgr::mix_seed(7, s));
  EXPECT_EQ(seen.size(), 100u);
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(hgr::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(hgr::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hgr::fnv1a("foobar"), 0x85944171f73967e8ULL);
}
