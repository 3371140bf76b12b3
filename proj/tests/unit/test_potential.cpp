#include <cmath>

#include "doctest.h"
#include "stablescat/errors.hpp"
#include "stablescat/potential.hpp"
#include "stablescat/rng.hpp"

using namespace stablescat;

namespace {

// plain Monte Carlo over a box, used as the oracle for int V
double mc_integral(const PotentialSpec& v, const Point& c, double half, int n, std::uint64_t seed) {
  Rng r(seed, 0);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    Point x = c;
    for (int j = 0; j < v.d; ++j) x[j] += half * (2.0 * r.uniform() - 1.0);
    s += v(x);
  }
  return s / n * std::pow(2 * half, v.d);
}

}  // namespace

TEST_CASE("potential values and support") {
  const auto v = ball_potential(3, 2.0, 1.0, Point{1, 0, 0, 0});
  CHECK(v(Point{1, 0, 0, 0}) == 2.0);
  CHECK(v(Point{1.99, 0, 0, 0}) == 2.0);
  CHECK(v(Point{2.01, 0, 0, 0}) == 0.0);
  CHECK(v.support_center()[0] == doctest::Approx(1.0));
  CHECK(v.support_radius() == doctest::Approx(1.0));
  CHECK(v.sup() == 2.0);
  CHECK(zero_potential(3).is_zero());
  CHECK_THROWS_AS(parse_potential_kind("cone"), DomainError);
  CHECK(parse_potential_kind("bump") == PotentialKind::bump);
}

TEST_CASE("closed-form L1 norms against Monte Carlo") {
  for (int d : {2, 3}) {
    const auto b = ball_potential(d, 1.5, 0.8);
    CHECK(b.l1_norm() == doctest::Approx(mc_integral(b, {}, 0.8, 400000, 1)).epsilon(0.01));
    const auto u = bump_potential(d, 1.0, 1.0, Point{0.2, 0, 0, 0});
    CHECK(u.l1_norm() == doctest::Approx(mc_integral(u, Point{0.2, 0, 0, 0}, 1.0, 400000, 2)).epsilon(0.01));
    Cube w{Point{0.3, -0.2, 0.1, 0}, 0.7};
    const auto q = quadratic_potential(d).transformed(1.0, {}, w);
    CHECK(q.l1_norm() == doctest::Approx(mc_integral(q, w.center, 0.35, 400000, 3)).epsilon(0.01));
  }
}

TEST_CASE("windowed norms: inside, disjoint, partial") {
  const auto b = ball_potential(3, 1.0, 0.3);
  CHECK(b.transformed(1.0, {}, Cube{{}, 1.0}).l1_norm() == doctest::Approx(b.l1_norm()));
  CHECK(b.transformed(1.0, {}, Cube{Point{3, 0, 0, 0}, 1.0}).l1_norm() == 0.0);
  CHECK(std::isnan(b.transformed(1.0, {}, Cube{Point{0.5, 0, 0, 0}, 1.0}).l1_norm()));
  // cube inside the ball
  const auto big = bump_potential(3, 1.0, 5.0);
  Cube w{Point{0.5, 0.5, 0, 0}, 1.0};
  const auto bw = big.transformed(1.0, {}, w);
  CHECK(bw.l1_norm() == doctest::Approx(mc_integral(bw, w.center, 0.5, 400000, 4)).epsilon(0.005));
}

TEST_CASE("transform composes as V(r x + xi)") {
  const auto v = bump_potential(3, 1.0, 1.0, Point{0.5, 0, 0, 0});
  const Point xi{2, 1, 0, 0};
  const auto t = v.transformed(0.25, xi);
  Rng r(5, 0);
  for (int i = 0; i < 100; ++i) {
    const Point x{r.uniform() * 4 - 8, r.uniform() * 4 - 4, r.uniform() - 0.5, 0};
    CHECK(t(x) == doctest::Approx(v(0.25 * x + xi)));
  }
  // L1 scales by r^{-d}
  CHECK(t.l1_norm() == doctest::Approx(v.l1_norm() * 64.0));
  CHECK(v.scaled(3.0).l1_norm() == doctest::Approx(3.0 * v.l1_norm()));
}

TEST_CASE("sublevel measure of the quadratic potential vanishes on distant cubes") {
  const auto q = quadratic_potential(3);
  for (double c : {1.0, 4.0, 10.0}) {
    const double rho = std::sqrt(c);
    CHECK(sublevel_measure(q, c, Cube{Point{rho + 1.0, 0, 0, 0}, 1.0}) == 0.0);
    CHECK(sublevel_measure(q, c, Cube{{}, 0.5}) == doctest::Approx(0.125));
  }
  // partial overlap against the midpoint rule's own convergence
  const double a = sublevel_measure(q, 1.0, Cube{Point{1, 0, 0, 0}, 1.0}, 64);
  const double b = sublevel_measure(q, 1.0, Cube{Point{1, 0, 0, 0}, 1.0}, 128);
  CHECK(a == doctest::Approx(b).epsilon(0.01));
  const auto v = ball_potential(3, 2.0, 1.0);
  CHECK(sublevel_measure(v, 1.0, Cube{Point{5, 0, 0, 0}, 1.0}) == 1.0);
  CHECK(sublevel_measure(v, 1.0, Cube{{}, 0.5}) == 0.0);
}
