#include "stablescat/density.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "detail/quad.hpp"
#include "stablescat/errors.hpp"

namespace stablescat {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
// e^{-41.4} < 1.1e-18
constexpr double kDecayCut = 41.4;

double p1_at_zero(const StableModel& m) {
  return sphere_area(m.d) * boost::math::tgamma(m.d / m.alpha) / (m.alpha * std::pow(2.0 * kPi, m.d));
}

}  // namespace

double cauchy_density_3d(double t, double r) {
  const double q = t * t + r * r;
  return t / (kPi * kPi * q * q);
}

double density_unit_series(const StableModel& m, double s) {
  if (!(s > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  using boost::math::lgamma;
  const double a = m.alpha;
  const int d = m.d;
  const double ls = std::log(s);
  double sum = 0.0, prev_mag = std::numeric_limits<double>::infinity(), max_mag = 0.0;
  for (int k = 1; k <= 400; ++k) {
    const double sn = std::sin(0.5 * kPi * a * k);
    const double lmag = lgamma(0.5 * (a * k + d)) + lgamma(0.5 * a * k + 1.0) - lgamma(k + 1.0) +
                        a * k * std::log(2.0) - (a * k + d) * ls;
    const double mag = std::exp(lmag);
    sum += (k % 2 ? 1.0 : -1.0) * sn * mag;
    max_mag = std::max(max_mag, mag);
    if (max_mag == 0.0) return 0.0;
    // for alpha >= 1 the series is at best asymptotic
    if (a >= 1.0 && k > 3 && mag > prev_mag) break;
    if (k > 1 && mag < 1e-17 * std::abs(sum)) {
      if (max_mag > 1e6 * std::abs(sum)) break;
      return sum * std::pow(kPi, -(0.5 * d + 1.0));
    }
    prev_mag = mag;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double density_unit_hankel(const StableModel& m, double s, double tol) {
  if (s < 0.0) throw DomainError("density_unit_hankel: negative radius");
  if (s == 0.0) return p1_at_zero(m);
  const double a = m.alpha;
  const int d = m.d;
  const double nu = 0.5 * d - 1.0;
  const double rho_max = std::pow(kDecayCut, 1.0 / a);

  double pref = 0.0;
  std::function<double(double)> f;
  if (d == 1) {
    pref = 1.0 / kPi;
    f = [a, s](double r) { return std::exp(-std::pow(r, a)) * std::cos(s * r); };
  } else if (d == 3) {
    pref = 1.0 / (2.0 * kPi * kPi * s);
    f = [a, s](double r) { return std::exp(-std::pow(r, a)) * r * std::sin(s * r); };
  } else {
    pref = std::pow(2.0 * kPi, -0.5 * d) * std::pow(s, 1.0 - 0.5 * d);
    f = [a, s, nu, d](double r) {
      return std::exp(-std::pow(r, a)) * std::pow(r, 0.5 * d) * boost::math::cyl_bessel_j(nu, s * r);
    };
  }

  const double half_period = kPi / s;
  if (rho_max / half_period > 1e6) throw QuadratureError("density inversion: too many oscillations");
  const double panel_tol = 1e-3 * tol / pref;
  double total = 0.0, err_total = 0.0;
  double lo = 0.0;
  while (lo < rho_max) {
    const double width = std::min(half_period, std::max(0.5, 0.5 * lo));
    const double hi = std::min(lo + width, rho_max);
    const auto q = detail::adaptive_gk(f, lo, hi, panel_tol);
    total += q.value;
    err_total += q.error;
    lo = hi;
  }
  const double value = pref * total;
  if (pref * err_total > tol)
    throw QuadratureError("density inversion error " + std::to_string(pref * err_total) + " exceeds tolerance");
  return value;
}

double density_unit(const StableModel& m, double s, double tol) {
  if (s < 0.0) throw DomainError("density_unit: negative radius");
  if (s == 0.0) return p1_at_zero(m);
  const double v = density_unit_series(m, s);
  if (std::isfinite(v)) return v;
  return density_unit_hankel(m, s, tol);
}

double density_radial(const StableModel& m, double t, double r, double tol) {
  if (!(t > 0.0)) throw DomainError("density: t must be positive");
  const double scale = std::pow(t, -1.0 / m.alpha);
  const double jac = std::pow(scale, m.d);
  return jac * density_unit(m, r * scale, tol / jac);
}

double density(const StableModel& m, double t, const Point& x, const Point& y, double tol) {
  return density_radial(m, t, distance(x, y), tol);
}

double riesz_kernel(const StableModel& m, const Point& x, const Point& y) {
  const double r = distance(x, y);
  if (r == 0.0) throw SingularityError("riesz_kernel: x == y");
  return m.a_riesz * std::pow(r, m.alpha - m.d);
}

double riesz_by_time_integral(const StableModel& m, double r) {
  if (!(r > 0.0)) throw SingularityError("riesz_by_time_integral: r must be positive");
  // t = r^alpha s^{-alpha}: the split t = r^alpha becomes s = 1
  const double a = m.alpha;
  auto g = [&](double s) { return a * std::pow(s, m.d - a - 1.0) * density_unit(m, s, 1e-10); };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double head = ts.integrate(g, 0.0, 1.0, 1e-11);
  const double tail = es.integrate([&](double u) { return g(1.0 + u); }, 1e-11);
  return std::pow(r, a - m.d) * (head + tail);
}

double heat_kernel_bound_constant(const StableModel& m, double s_max, int n) {
  double c = 1.0;
  for (int i = 0; i <= n; ++i) {
    const double s = s_max * double(i) / n;
    const double p = density_unit(m, s);
    const double g = s <= 1.0 ? 1.0 : std::pow(s, -m.d - m.alpha);
    c = std::max({c, p / g, g / p});
  }
  return c;
}

}  // namespace stablescat
