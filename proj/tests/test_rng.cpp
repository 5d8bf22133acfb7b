#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cellrate/rng.hpp"

using namespace cellrate;

TEST_CASE("streams are deterministic and keyed") {
  RngStream a(42), b(42), c(43);
  std::vector<std::uint64_t> xa, xb, xc;
  for (int i = 0; i < 64; ++i) {
    xa.push_back(a.next_u64());
    xb.push_back(b.next_u64());
    xc.push_back(c.next_u64());
  }
  CHECK(xa == xb);
  CHECK(xa != xc);
}

TEST_CASE("substreams fork deterministically") {
  RngStream root(7);
  RngStream s1 = root.substream(1);
  RngStream s2 = root.substream(2);
  RngStream s1b = RngStream(7).substream(1);
  CHECK(s1.next_u64() == s1b.next_u64());
  CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("uniform doubles land in range with the right mean") {
  RngStream rng(123);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.004));
}

TEST_CASE("open-interval uniforms avoid the endpoints") {
  RngStream rng(5);
  for (int i = 0; i < 100'000; ++i) {
    const double u = rng.next_open_double();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normals have unit variance and complex gaussians unit power") {
  RngStream rng(99);
  const int n = 1'000'000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    s += z;
    s2 += z * z;
  }
  CHECK(s / n == doctest::Approx(0.0).epsilon(1.0));
  CHECK(std::abs(s / n) < 0.005);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.005));

  double p = 0.0;
  for (int i = 0; i < n; ++i) p += std::norm(rng.next_cgauss());
  CHECK(p / n > 0.998);
  CHECK(p / n < 1.002);
}

TEST_CASE("next_below stays in range and covers it") {
  RngStream rng(2024);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70'000; ++i) ++counts[rng.next_below(7)];
  for (const int c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
}
