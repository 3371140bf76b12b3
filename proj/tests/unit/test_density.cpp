#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "doctest.h"
#include "stablescat/density.hpp"
#include "stablescat/errors.hpp"

using namespace stablescat;

TEST_CASE("Hankel inversion reproduces the Cauchy density in d=3") {
  const auto m = make_model(3, 1.0);
  for (double t : {0.25, 1.0, 3.0})
    for (double r : {0.0, 0.1, 0.7, 1.5, 4.0}) {
      const double ref = cauchy_density_3d(t, r);
      const double s = r / t;
      const double v = std::pow(t, -3.0) * density_unit_hankel(m, s);
      CHECK(std::abs(v - ref) <= 1e-8 * ref + 1e-14);
      CHECK(density_radial(m, t, r) == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("series and Hankel branches agree where both apply") {
  for (auto [d, a] : {std::pair{2, 0.5}, std::pair{3, 1.0}, std::pair{3, 0.5}, std::pair{2, 1.5}}) {
    const auto m = make_model(d, a);
    for (double s : {2.5, 4.0, 7.0}) {
      const double ser = density_unit_series(m, s);
      if (!std::isfinite(ser)) continue;
      CHECK(ser == doctest::Approx(density_unit_hankel(m, s, 1e-12)).epsilon(1e-7));
    }
  }
}

TEST_CASE("leading tail term is the Levy density") {
  const auto m = make_model(2, 0.5);
  const double s = 200.0;
  CHECK(density_unit(m, s) == doctest::Approx(m.c_levy * std::pow(s, -2.5)).epsilon(0.02));
}

TEST_CASE("density integrates to one") {
  for (auto [d, a] : {std::pair{2, 0.5}, std::pair{3, 1.0}}) {
    const auto m = make_model(d, a);
    boost::math::quadrature::exp_sinh<double> es;
    auto f = [&](double s) { return sphere_area(d) * std::pow(s, d - 1) * density_unit(m, s); };
    double mass = es.integrate([&](double u) { return f(3.0 + u); }, 1e-10);
    for (int k = 0; k < 6; ++k) mass += boost::math::quadrature::gauss<double, 20>::integrate(f, 0.5 * k, 0.5 * k + 0.5);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("symmetry and on-diagonal bound") {
  const auto m = make_model(3, 1.0);
  const Point x{0.3, -0.2, 0.9, 0}, y{-1.1, 0.4, 0.05, 0};
  CHECK(density(m, 0.7, x, y) == density(m, 0.7, y, x));
  const double c = heat_kernel_bound_constant(m, 20.0, 80);
  MESSAGE("two-sided bound constant d=3 alpha=1: " << c);
  for (double t : {0.1, 1.0, 10.0}) CHECK(density(m, t, x, x) <= c * std::pow(t, -3.0));
}

TEST_CASE("Riesz kernel against the time integral of the density") {
  for (auto [d, a] : {std::pair{3, 1.0}, std::pair{2, 0.5}}) {
    const auto m = make_model(d, a);
    for (double r : {0.5, 1.0, 2.0}) {
      const Point x{}, y{r, 0, 0, 0};
      CHECK(riesz_kernel(m, x, y) == doctest::Approx(riesz_by_time_integral(m, r)).epsilon(1e-6));
    }
  }
  const auto m = make_model(3, 1.0);
  const Point o{}, e{1, 0, 0, 0}, e2{2, 0, 0, 0};
  CHECK(riesz_kernel(m, o, e) == doctest::Approx(1.0 / (2 * M_PI * M_PI)));
  CHECK(riesz_kernel(m, o, e2) == doctest::Approx(std::pow(2.0, -2.0) * riesz_kernel(m, o, e)));
  CHECK_THROWS_AS(riesz_kernel(m, e, e), SingularityError);
}
