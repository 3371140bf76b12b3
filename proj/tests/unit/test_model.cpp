#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "doctest.h"
#include "stablescat/errors.hpp"
#include "stablescat/model.hpp"

using namespace stablescat;

TEST_CASE("levy constant d=3 alpha=1 is 1/pi^2") {
  const auto m = make_model(3, 1.0);
  CHECK(m.c_levy == doctest::Approx(1.0 / (M_PI * M_PI)).epsilon(1e-13));
  CHECK(m.a_riesz == doctest::Approx(1.0 / (2.0 * M_PI * M_PI)).epsilon(1e-13));
}

TEST_CASE("levy constant d=2 alpha=0.5 against 50-digit gamma") {
  using mp = boost::multiprecision::cpp_bin_float_50;
  const mp a = mp(1) / 2, d = 2;
  const mp pi = boost::multiprecision::acos(mp(-1));
  const mp ref = a * boost::multiprecision::pow(mp(2), a - 1) * boost::multiprecision::pow(pi, -d / 2) *
                 boost::multiprecision::tgamma((d + a) / 2) / boost::multiprecision::tgamma(1 - a / 2);
  const auto m = make_model(2, 0.5);
  CHECK(std::abs(m.c_levy - ref.convert_to<double>()) < 1e-10);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(make_model(1, 1.0), DomainError);
  CHECK_THROWS_AS(make_model(3, 2.0), DomainError);
  CHECK_THROWS_AS(make_model(3, 0.0), DomainError);
  CHECK_THROWS_AS(make_model(5, 1.0), DomainError);
  CHECK_NOTHROW(make_model(1, 0.5));
}

TEST_CASE("sphere and ball measures") {
  CHECK(sphere_area(2) == doctest::Approx(2 * M_PI));
  CHECK(sphere_area(3) == doctest::Approx(4 * M_PI));
  CHECK(ball_volume(3) == doctest::Approx(4 * M_PI / 3));
}

TEST_CASE("mean exit time of the Cauchy process from a ball") {
  const auto m = make_model(3, 1.0);
  CHECK(mean_exit_time_ball(m, 1.0) == doctest::Approx(0.5));
  CHECK(mean_exit_time_ball(m, 3.0) == doctest::Approx(1.5));
  CHECK(mean_exit_time_ball(m, 1.0, 2.0) == 0.0);
}

TEST_CASE("big jump rate integrates the Levy measure tail") {
  const auto m = make_model(3, 1.0);
  // c * 4pi * int_delta^inf r^{-2} dr = c * 4pi / delta
  CHECK(big_jump_rate(m, 0.1) == doctest::Approx(m.c_levy * 4 * M_PI / 0.1));
  // c * 4pi * int_0^delta r^2 r^{-2} dr / 3
  CHECK(small_jump_variance_rate(m, 0.1) == doctest::Approx(m.c_levy * 4 * M_PI * 0.1 / 3));
}
