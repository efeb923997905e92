#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "oqsim/rng.hpp"

using namespace oqsim;

TEST_CASE("same key reproduces the same sequence") {
  StreamRng a(42, 7);
  StreamRng b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams and seeds decorrelate") {
  StreamRng a(42, 0);
  StreamRng b(42, 1);
  StreamRng c(43, 0);
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t x = a.next_u64();
    if (x == b.next_u64()) ++equal_ab;
    if (x == c.next_u64()) ++equal_ac;
  }
  CHECK(equal_ab == 0);
  CHECK(equal_ac == 0);
}

TEST_CASE("uniform stays in [0, 1) with the right mean") {
  StreamRng rng(1, 0);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("normal moments and complex normalization") {
  StreamRng rng(2, 0);
  const int n = 20000;
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    mean += x;
    var += x * x;
  }
  CHECK(std::abs(mean / n) < 0.03);
  CHECK(std::abs(var / n - 1.0) < 0.05);

  double abs2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = rng.complex_normal();
    abs2 += std::norm(z);
  }
  CHECK(std::abs(abs2 / n - 1.0) < 0.05);  // E|z|^2 = 1
}

TEST_CASE("normal draws consume a fixed counter budget (no pair caching)") {
  // Each normal() uses exactly two raw draws, so mixed call patterns stay
  // aligned; a cached Box-Muller spare would break the second comparison.
  StreamRng a(9, 3);
  const double a1 = a.normal();
  const double a2 = a.normal();

  StreamRng b(9, 3);
  CHECK(b.normal() == a1);
  (void)b.next_u64();  // skip the rest of what the second normal would use
  (void)b.next_u64();
  CHECK(b.normal() != a2);  // streams advanced past the aligned point

  StreamRng c(9, 3);
  (void)c.next_u64();
  (void)c.next_u64();
  CHECK(c.normal() == a2);
}

TEST_CASE("factory hands out independent reproducible streams") {
  const RngFactory factory{7};
  StreamRng a = factory.stream(11);
  StreamRng b = factory.stream(11);
  CHECK(a.next_u64() == b.next_u64());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 100; ++s) firsts.insert(factory.stream(s).next_u64());
  CHECK(firsts.size() == 100);
}
