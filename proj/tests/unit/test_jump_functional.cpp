#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "stablescat/jump_functional.hpp"
#include "stablescat/rng.hpp"

using namespace stablescat;

namespace {

JumpFunctional bench_f(double beta = 2.0) { return make_shell_functional(Profile{PhiKind::power, beta, 1}, 1.0, 0.5); }

Point random_point(Rng& r, double box) {
  return Point{box * (2 * r.uniform() - 1), box * (2 * r.uniform() - 1), box * (2 * r.uniform() - 1), 0};
}

// direct spherical-coordinate quadrature around x in d=3, evaluating F pointwise
double brute_force_f_p_one(const StableModel& m, const JumpFunctional& jf, double p, const Point& x) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const Point e1 = norm(x) > 0 ? (1.0 / norm(x)) * x : Point{1, 0, 0, 0};
  Point e2 = Point{-e1[1], e1[0], 0, 0};
  if (norm(e2) < 1e-12) e2 = Point{0, -e1[2], e1[1], 0};
  e2 = (1.0 / norm(e2)) * e2;
  auto inner = [&](double rho) {
    auto g = [&](double th) {
      const Point y = x + rho * (std::cos(th) * e1 + std::sin(th) * e2);
      return 2 * M_PI * std::sin(th) * -std::expm1(-p * jf(x, y));
    };
    return std::pow(rho, -1 - m.alpha) * GK::integrate(g, 0.0, M_PI, 8, 1e-8);
  };
  return m.c_levy * GK::integrate(inner, 0.0, jf.range(), 8, 1e-7);
}

}  // namespace

TEST_CASE("F is symmetric, vanishes on the diagonal, and is bounded") {
  const auto jf = bench_f();
  Rng r(1, 0);
  for (int i = 0; i < 20000; ++i) {
    const Point x = random_point(r, 1.8), y = x + 0.6 * random_point(r, 1.0);
    REQUIRE(jf(x, y) == jf(y, x));
    REQUIRE(jf(x, x) == 0.0);
    REQUIRE(jf(x, y) >= 0.0);
    REQUIRE(jf(x, y) <= jf.bound);
    if (norm(x) >= 1.5 && norm(y) >= 1.5) REQUIRE(jf(x, y) == 0.0);
  }
}

TEST_CASE("shell functional region weights") {
  const auto jf = bench_f();
  const Point x{0.2, 0, 0, 0};
  CHECK(jf(x, Point{0.5, 0, 0, 0}) == doctest::Approx(0.09));
  CHECK(jf(Point{0.9, 0, 0, 0}, Point{1.2, 0, 0, 0}) == doctest::Approx(0.5 * 0.09));
  CHECK(jf(Point{1.1, 0, 0, 0}, Point{1.4, 0, 0, 0}) == doctest::Approx(0.5 * 0.09));
  CHECK(jf(Point{1.3, 0, 0, 0}, Point{1.6, 0, 0, 0}) == 0.0);
  CHECK(jf(x, Point{0.71, 0, 0, 0}) == 0.0);
}

TEST_CASE("profiles are o(t^alpha) and increasing") {
  for (Profile ph : {Profile{PhiKind::power, 2.0, 1}, Profile{PhiKind::power_ratio, 1.5, 1},
                     Profile{PhiKind::log, 2.0, 1}, Profile{PhiKind::log_iter, 1.5, 3}}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double t = 0.5; t > 1e-6; t *= 0.5) {
      const double q = ph(t) / t;
      CHECK(q < prev);
      prev = q;
      CHECK(ph(t) < ph(2 * t));
    }
    CHECK(prev < 1e-2);
    CHECK(ph.inverse(ph(0.3)) == doctest::Approx(0.3).epsilon(1e-10));
  }
}

TEST_CASE("F1 at the origin against the 1-D oracle") {
  const auto m = make_model(3, 1.0);
  const auto jf = bench_f();
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double ref =
      4.0 / M_PI * GK::integrate([](double r) { return r > 0 ? -std::expm1(-r * r) / (r * r) : 1.0; }, 0.0, 0.5, 15,
                                 1e-14);
  CHECK(std::abs(f_p_one(m, jf, 1.0, Point{}) - ref) < 1e-10);
}

TEST_CASE("F-hat 1 at an interior point in closed form") {
  const auto m = make_model(3, 1.0);
  const auto jf = bench_f(2.0);
  const double ref = m.c_levy * 4 * M_PI * std::pow(0.5, 2.0 - 1.0) / (2.0 - 1.0);
  CHECK(hat_f_one(m, jf, Point{0.3, 0.1, 0, 0}) == doctest::Approx(ref).epsilon(1e-10));
  CHECK(hat_f_one(m, jf, Point{3, 0, 0, 0}) == 0.0);
}

TEST_CASE("closed-form angular integration against pointwise quadrature") {
  const auto m = make_model(3, 1.0);
  const auto jf = bench_f();
  for (Point x : {Point{0.8, 0, 0, 0}, Point{0, 1.05, 0.2, 0}, Point{1.3, 0.1, 0, 0}})
    for (double p : {1.0, 30.0}) CHECK(f_p_one(m, jf, p, x) == doctest::Approx(brute_force_f_p_one(m, jf, p, x)).epsilon(1e-5));
}

TEST_CASE("F1 <= F^(p)1 <= p F1, monotone in p, bounded by F-hat 1") {
  const auto m = make_model(3, 1.0);
  const auto jf = bench_f();
  Rng r(2, 0);
  for (int i = 0; i < 40; ++i) {
    const Point x = random_point(r, 0.9);
    const double f1 = f_p_one(m, jf, 1.0, x);
    CHECK(f1 <= hat_f_one(m, jf, x) * (1 + 1e-12));
    double prev = f1;
    for (double p : {2.0, 10.0, 100.0, 1000.0}) {
      const double fp = f_p_one(m, jf, p, x);
      CHECK(fp >= prev * (1 - 1e-12));
      CHECK(fp <= p * f1 * (1 + 1e-12));
      prev = fp;
    }
  }
}

TEST_CASE("F1 upper bound inside B(0,R)") {
  const auto m = make_model(3, 1.0);
  const auto jf = bench_f();
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double bound = m.c_levy * 4 * M_PI *
                       GK::integrate([](double r) { return r > 0 ? -std::expm1(-r * r) / (r * r) : 1.0; }, 0.0, 0.5);
  for (double u : {0.0, 0.5, 0.7, 0.95}) CHECK(f_p_one(m, jf, 1.0, Point{u, 0, 0, 0}) <= bound * (1 + 1e-10));
}

TEST_CASE("subadditivity of 1 - exp") {
  Rng r(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const double a = 5 * r.uniform(), b = 5 * r.uniform();
    CHECK(-std::expm1(-a - b) <= -std::expm1(-a) - std::expm1(-b) + 1e-15);
  }
}

TEST_CASE("psi condition for shell functional") {
  const auto m = make_model(3, 1.0);
  const auto jf = bench_f();
  std::vector<Point> xs;
  for (double u = 0.0; u < 1.5; u += 0.1) xs.push_back(Point{u, 0, 0, 0});
  xs.push_back(Point{2.0, 0, 0, 0});
  const auto rep = check_psi_condition(m, jf, {100.0, 1000.0, 10000.0}, xs);
  MESSAGE("empirical psi constant " << rep.min_ratio << " at p=" << rep.argmin_p << " |x|=" << norm(rep.argmin_x));
  CHECK_FALSE(rep.vacuous);
  CHECK(rep.min_ratio >= 0.5);
  const auto one = check_psi_condition(m, jf, {1.0}, xs);
  CHECK(one.min_ratio == doctest::Approx(1.0));
  CHECK(check_psi_condition(m, zero_functional(), {10.0}, xs).vacuous);
}

TEST_CASE("radial tables and L1 norms") {
  const auto m = make_model(3, 1.0);
  const auto jf = bench_f();
  const auto field = make_f_one_field(m, jf, 10.0);
  for (double u : {0.1, 0.55, 0.99, 1.01, 1.3, 1.49})
    CHECK(field(Point{u, 0, 0, 0}) == doctest::Approx(f_p_one(m, jf, 10.0, Point{u, 0, 0, 0})).epsilon(2e-3));
  CHECK(field(Point{1.6, 0, 0, 0}) == 0.0);
  CHECK(std::isfinite(field.l1_norm));
  CHECK(field.l1_norm > 0.0);
  // F_{r,xi} 1(x) = r^alpha F1(r x + xi), so the L1 norm scales by r^{alpha-d}
  const Point xi{0.5, -0.25, 0, 0};
  const auto jt = jf.transformed(0.5, xi);
  const auto ft = make_f_one_field(m, jt, 10.0);
  CHECK(ft.l1_norm == doctest::Approx(field.l1_norm * 4.0).epsilon(1e-9));
  CHECK(ft(Point{0.3, 0.2, 0, 0}) == doctest::Approx(0.5 * field(0.5 * Point{0.3, 0.2, 0, 0} + xi)).epsilon(1e-9));
  CHECK(jt(Point{0.2, 0.3, 0, 0}, Point{0.4, 0.1, 0, 0}) == jf(0.5 * Point{0.2, 0.3, 0, 0} + xi, 0.5 * Point{0.4, 0.1, 0, 0} + xi));
}

TEST_CASE("compensator is the small-range part of F^(q)1") {
  const auto m = make_model(3, 1.0);
  const auto jf = bench_f();
  const Point x{0.4, 0, 0, 0};
  const double full = f_p_one(m, jf, 3.0, x);
  CHECK(small_jump_compensator(m, jf, 3.0, x, 1.0) == doctest::Approx(full));
  const double g = small_jump_compensator(m, jf, 3.0, x, 0.05);
  // interior: C 4 pi int_0^delta (1 - e^{-3 r^2}) r^{-2} dr <= C 4 pi 3 delta
  CHECK(g <= m.c_levy * 4 * M_PI * 3 * 0.05);
  CHECK(g > 0.0);
  const auto tab = make_compensator_table(m, jf, 3.0, 0.05);
  CHECK(tab(x) == doctest::Approx(g).epsilon(1e-3));
}

TEST_CASE("user grid functional is symmetric and reduces to shell functional shape") {
  std::vector<double> r{0.0, 0.5, 1.0, 1.5};
  std::vector<double> T(16, 1.0);
  const auto jf = make_user_grid(Profile{PhiKind::power, 2.0, 1}, 1.0, 0.5, r, T);
  const auto m = make_model(3, 1.0);
  Rng g(5, 0);
  for (int i = 0; i < 2000; ++i) {
    const Point x = random_point(g, 1.6), y = x + 0.4 * random_point(g, 1.0);
    REQUIRE(jf(x, y) == jf(y, x));
  }
  const Point x{0.2, 0.1, 0, 0};
  CHECK(f_p_one(m, jf, 1.0, x) == doctest::Approx(f_p_one(m, bench_f(), 1.0, x)).epsilon(1e-8));
  const Point xa{1.2, 0, 0, 0};
  CHECK(f_p_one(m, jf, 2.0, xa) == doctest::Approx(brute_force_f_p_one(m, jf, 2.0, xa)).epsilon(1e-5));
}
