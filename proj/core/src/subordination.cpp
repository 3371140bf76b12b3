#include "stablescat/subordination.hpp"

#include <boost/math/constants/constants.hpp>
#include <cmath>

#include "stablescat/errors.hpp"

namespace stablescat {

namespace {
constexpr double kPi = boost::math::constants::pi<double>();
}

double sample_positive_stable(Rng& rng, double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("positive stable index must lie in (0,1)");
  const double u = rng.uniform();
  const double e = rng.exponential();
  const double A = std::pow(std::sin(a * kPi * u), a / (1.0 - a)) * std::sin((1.0 - a) * kPi * u) /
                   std::pow(std::sin(kPi * u), 1.0 / (1.0 - a));
  return std::pow(A / e, (1.0 - a) / a);
}

Point sample_stable_exact(const StableModel& m, Rng& rng, double t) {
  const double a = 0.5 * m.alpha;
  const double s = std::pow(t, 1.0 / a) * sample_positive_stable(rng, a);
  return rng.gaussian_vector(m.d, std::sqrt(2.0 * s));
}

double exit_time_exact_grid(const StableModel& m, Rng& rng, double radius, const Point& start, double h,
                            double t_max) {
  Point x = start;
  double t = 0.0;
  while (norm(x) < radius) {
    if (t >= t_max) return t_max;
    x = x + sample_stable_exact(m, rng, h);
    t += h;
  }
  return t;
}

}  // namespace stablescat
