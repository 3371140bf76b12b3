#include <cmath>

#include "doctest.h"
#include "stablescat/errors.hpp"
#include "stablescat/measure_sampler.hpp"

using namespace stablescat;

namespace {

// uniform Monte Carlo of int q over a cube of half side `half`
double density_integral(const MeasureSampler& s, double half, int n) {
  Rng r(11, 0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    Point x{};
    for (int j = 0; j < s.dim(); ++j) x[j] = half * (2.0 * r.uniform() - 1.0);
    acc += s.density(x);
  }
  return acc / n * std::pow(2.0 * half, s.dim());
}

}  // namespace

TEST_CASE("sampler density integrates to one") {
  const auto m = make_model(3, 1.0);
  const auto jf = make_shell_functional(Profile{PhiKind::power, 2.0, 1}, 1.0, 0.5);
  const auto f = make_f_one_field(m, jf, 1.0);
  const auto v = ball_potential(3, 1.0, 1.0);
  const MeasureSampler both(v, 1.0, &f, 2.0);
  CHECK(density_integral(both, 1.6, 400000) == doctest::Approx(1.0).epsilon(0.01));
  const MeasureSampler bump(bump_potential(3, 2.0, 0.8, Point{0.3, 0, 0, 0}), 1.0, nullptr, 0.0);
  CHECK(density_integral(bump, 1.2, 400000) == doctest::Approx(1.0).epsilon(0.01));
  auto w = quadratic_potential(2, 1.0).transformed(1.0, Point{}, Cube{Point{3, 0, 0, 0}, 1.0});
  const MeasureSampler quad(w, 1.0, nullptr, 0.0);
  Rng r(2, 0);
  for (int i = 0; i < 200; ++i) CHECK(w.window.contains(quad.sample(r), 2));
}

TEST_CASE("sampled radii follow the density") {
  const auto m = make_model(3, 1.0);
  const auto jf = make_shell_functional(Profile{PhiKind::power, 2.0, 1}, 1.0, 0.5);
  const auto f = make_f_one_field(m, jf, 1.0);
  const MeasureSampler s(ball_potential(3, 1.0, 1.0), 1.0, &f, 1.0);
  // bin probabilities of |x| from the density (radial quadrature) vs sample frequencies
  const int bins = 6, n = 60000;
  std::vector<double> expect(bins, 0.0), seen(bins, 0.0);
  const int sub = 400;
  for (int b = 0; b < bins; ++b)
    for (int k = 0; k < sub; ++k) {
      const double r = 1.5 * (b + (k + 0.5) / sub) / bins;
      expect[b] += s.density(Point{r, 0, 0, 0}) * sphere_area(3) * r * r * 1.5 / bins / sub;
    }
  Rng rng(5, 0);
  for (int i = 0; i < n; ++i) {
    const double r = norm(s.sample(rng));
    seen[std::min(bins - 1, int(r / 1.5 * bins))] += 1.0 / n;
  }
  for (int b = 0; b < bins; ++b) CHECK(seen[b] == doctest::Approx(expect[b]).epsilon(0.03));
}

TEST_CASE("sampler rejects unbounded or empty measures") {
  CHECK_THROWS_AS(MeasureSampler(quadratic_potential(3), 1.0, nullptr, 0.0), DomainError);
  CHECK_THROWS_AS(MeasureSampler(zero_potential(3), 0.0, nullptr, 0.0), DegenerateMeasureError);
}
