#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "eegpoison/rng.hpp"

using eegpoison::Rng;

TEST_CASE("same seed reproduces every stream") {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(123);
  Rng d(123);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.uniform01() == d.uniform01());
    CHECK(c.normal() == d.normal());
    CHECK(c.bounded(97) == d.bounded(97));
  }
}

TEST_CASE("different seeds diverge") {
  Rng a(1);
  Rng b(2);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("seed zero is usable") {
  Rng rng(0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 16; ++i) seen.insert(rng.next_u64());
  CHECK(seen.size() == 16);
}

TEST_CASE("uniform01 stays in the half-open unit interval") {
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("bounded covers [0, n) and hits every residue of a small n") {
  Rng rng(9);
  std::array<int, 5> hits{};
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t v = rng.bounded(5);
    REQUIRE(v < 5);
    hits[v] += 1;
  }
  for (const int h : hits) CHECK(h > 0);
  for (int i = 0; i < 1000; ++i) CHECK(rng.bounded(1) == 0);
}

TEST_CASE("normal moments are near standard over a pinned stream") {
  Rng rng(11);
  const int n = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("shuffle permutes in place deterministically") {
  std::vector<int> values(100);
  std::iota(values.begin(), values.end(), 0);
  Rng a(5);
  a.shuffle(values);

  std::vector<int> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> identity(100);
  std::iota(identity.begin(), identity.end(), 0);
  CHECK(sorted == identity);
  CHECK(values != identity);

  std::vector<int> again(100);
  std::iota(again.begin(), again.end(), 0);
  Rng b(5);
  b.shuffle(again);
  CHECK(again == values);
}

TEST_CASE("derive separates substreams by tag and is pure") {
  CHECK(Rng::derive(42, "split") == Rng::derive(42, "split"));
  CHECK(Rng::derive(42, "split") != Rng::derive(42, "poison"));
  CHECK(Rng::derive(42, "split") != Rng::derive(43, "split"));

  Rng a(Rng::derive(42, "split"));
  Rng b(Rng::derive(42, "poison"));
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}
