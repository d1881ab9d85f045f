#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "umauc/rng.hpp"

using namespace umauc;

TEST_CASE("same seed reproduces the identical u64 stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += (a.next_u64() == b.next_u64());
  CHECK(same < 4);
}

TEST_CASE("derive_seed separates streams and is stable") {
  CHECK(derive_seed(7, 0) == derive_seed(7, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 256; ++s) seen.insert(derive_seed(123, s));
  CHECK(seen.size() == 256);
  CHECK(derive_seed(1, 5) != derive_seed(2, 5));
}

TEST_CASE("uniform01 stays in [0,1) with the right mean and variance") {
  Rng rng(9);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("uniform(lo,hi) respects bounds") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-2.5, 4.0);
    CHECK(u >= -2.5);
    CHECK(u < 4.0);
  }
}

TEST_CASE("uniform_int covers both endpoints and is roughly flat") {
  Rng rng(11);
  std::vector<int> counts(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const std::int64_t v = rng.uniform_int(0, 9);
    REQUIRE(v >= 0);
    REQUIRE(v <= 9);
    ++counts[static_cast<std::size_t>(v)];
  }
  // 5-sigma band around n/10 draws per value.
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  for (int c : counts) CHECK(std::abs(c - n / 10) < 5.0 * sigma);
  CHECK(rng.uniform_int(4, 4) == 4);
  CHECK_THROWS_AS(rng.uniform_int(3, 2), std::invalid_argument);
}

TEST_CASE("uniform_int handles negative ranges") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t v = rng.uniform_int(-7, -3);
    CHECK(v >= -7);
    CHECK(v <= -3);
  }
}

TEST_CASE("normal matches N(0,1) moments") {
  Rng rng(17);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma matches mean=shape and var=shape") {
  Rng rng(23);
  for (const double shape : {0.5, 1.0, 2.5, 8.0}) {
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = rng.gamma(shape);
      CHECK(x > 0.0);
      sum += x;
      sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(mean == doctest::Approx(shape).epsilon(0.03));
    CHECK(var == doctest::Approx(shape).epsilon(0.08));
  }
  CHECK_THROWS_AS(rng.gamma(0.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.gamma(-1.0), std::invalid_argument);
}

TEST_CASE("beta matches Beta(a,b) moments") {
  struct Case {
    double a, b;
  };
  Rng rng(31);
  for (const Case c : {Case{1, 1}, Case{5, 1}, Case{5, 5}, Case{5, 2}}) {
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = rng.beta(c.a, c.b);
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
      sum += x;
      sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double want_mean = c.a / (c.a + c.b);
    const double want_var =
        c.a * c.b / ((c.a + c.b) * (c.a + c.b) * (c.a + c.b + 1.0));
    CHECK(mean == doctest::Approx(want_mean).epsilon(0.02));
    CHECK(var == doctest::Approx(want_var).epsilon(0.10));
  }
}

TEST_CASE("shuffle permutes and is seed-deterministic") {
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i;
  std::vector<int> w = v;

  Rng a(77);
  a.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == w);
  CHECK(v != w);  // 100! permutations; identity is astronomically unlikely

  std::vector<int> v2 = w;
  Rng b(77);
  b.shuffle(v2);
  CHECK(v == v2);

  std::vector<int> v3 = w;
  Rng c(78);
  c.shuffle(v3);
  CHECK(v != v3);
}
