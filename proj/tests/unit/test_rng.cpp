#include <cmath>
#include <vector>

#include "doctest.h"
#include "stablescat/rng.hpp"
#include "stablescat/stats.hpp"

using namespace stablescat;

TEST_CASE("philox4x32-10 known answers") {
  auto r0 = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(r0[0] == 0x6627e8d5u);
  CHECK(r0[1] == 0xe169c58du);
  CHECK(r0[2] == 0xbc57ac4cu);
  CHECK(r0[3] == 0x9b00dbd8u);
  auto r1 = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(r1[0] == 0xd16cfe09u);
  CHECK(r1[1] == 0x94fdccebu);
  CHECK(r1[2] == 0x5001e420u);
  CHECK(r1[3] == 0x24126ea1u);
}

TEST_CASE("streams are reproducible and distinct") {
  Rng a(42, 7), b(42, 7), c(42, 8), e(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != e.next_u64());
  }
}

TEST_CASE("uniform and normal moments") {
  Rng r(1, 0);
  const int n = 200000;
  std::vector<double> u(n), z(n), z2(n);
  for (int i = 0; i < n; ++i) {
    u[i] = r.uniform();
    z[i] = r.normal();
    z2[i] = z[i] * z[i];
    REQUIRE(u[i] > 0.0);
    REQUIRE(u[i] < 1.0);
  }
  CHECK(std::abs(mean_stderr(u).mean - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(mean_stderr(z).mean) < 4 / std::sqrt(double(n)));
  CHECK(std::abs(mean_stderr(z2).mean - 1.0) < 4 * std::sqrt(2.0 / n));
}

TEST_CASE("gamma and poisson means") {
  Rng r(3, 0);
  const int n = 100000;
  for (double shape : {0.3, 1.0, 4.5}) {
    std::vector<double> g(n);
    for (auto& x : g) x = r.gamma(shape);
    CHECK(std::abs(mean_stderr(g).mean - shape) < 4 * std::sqrt(shape / n));
  }
  for (double mean : {0.7, 13.0, 55.5}) {
    std::vector<double> p(n);
    for (auto& x : p) x = double(r.poisson(mean));
    const auto ms = mean_stderr(p);
    CHECK(std::abs(ms.mean - mean) < 4 * std::sqrt(mean / n));
    CHECK(ms.stderr_ * ms.stderr_ * n == doctest::Approx(mean).epsilon(0.03));
  }
}

TEST_CASE("unit vectors are on the sphere with zero mean") {
  Rng r(5, 0);
  double sx = 0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.unit_vector(3);
    REQUIRE(norm(v) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v[3] == 0.0);
    sx += v[0];
  }
  CHECK(std::abs(sx / n) < 4 * std::sqrt(1.0 / 3 / n));
}
