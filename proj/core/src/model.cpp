#include "stablescat/model.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <string>

#include "stablescat/errors.hpp"

namespace stablescat {

namespace {
constexpr double kPi = boost::math::constants::pi<double>();
}

double levy_constant(int d, double alpha) {
  using boost::math::tgamma;
  return alpha * std::pow(2.0, alpha - 1.0) * std::pow(kPi, -0.5 * d) * tgamma(0.5 * (d + alpha)) /
         tgamma(1.0 - 0.5 * alpha);
}

double riesz_constant(int d, double alpha) {
  using boost::math::tgamma;
  return tgamma(0.5 * (d - alpha)) / (std::pow(2.0, alpha) * std::pow(kPi, 0.5 * d) * tgamma(0.5 * alpha));
}

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / boost::math::tgamma(0.5 * d); }

double ball_volume(int d) { return sphere_area(d) / d; }

StableModel make_model(int d, double alpha) {
  if (d < 1 || d > kMaxDim)
    throw DomainError("dimension must lie in [1, " + std::to_string(kMaxDim) + "], got " + std::to_string(d));
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2), got " + std::to_string(alpha));
  if (!(d > alpha)) throw DomainError("transience requires d > alpha");
  StableModel m;
  m.d = d;
  m.alpha = alpha;
  m.c_levy = levy_constant(d, alpha);
  m.a_riesz = riesz_constant(d, alpha);
  return m;
}

double big_jump_rate(const StableModel& m, double delta) {
  return m.c_levy * sphere_area(m.d) * std::pow(delta, -m.alpha) / m.alpha;
}

double small_jump_variance_rate(const StableModel& m, double delta) {
  return m.c_levy * sphere_area(m.d) * std::pow(delta, 2.0 - m.alpha) / (m.d * (2.0 - m.alpha));
}

double mean_exit_time_ball(const StableModel& m, double radius, double start_radius) {
  using boost::math::tgamma;
  const double a = m.alpha;
  const double c = tgamma(0.5 * m.d) / (std::pow(2.0, a) * tgamma(1.0 + 0.5 * a) * tgamma(0.5 * (m.d + a)));
  const double s = radius * radius - start_radius * start_radius;
  return s > 0.0 ? c * std::pow(s, 0.5 * a) : 0.0;
}

double ball_capacity(const StableModel& m, double radius) {
  using boost::math::tgamma;
  const double a = m.alpha;
  return std::pow(radius, m.d - a) * tgamma(0.5 * m.d) /
         (m.a_riesz * tgamma(0.5 * a) * tgamma(1.0 + 0.5 * (m.d - a)));
}

bool Cube::contains(const Point& x, int d) const {
  for (int i = 0; i < d; ++i)
    if (std::abs(x[i] - center[i]) > 0.5 * side) return false;
  return true;
}

double Cube::volume(int d) const { return std::pow(side, d); }

double Cube::circumradius(int d) const { return 0.5 * side * std::sqrt(double(d)); }

}  // namespace stablescat
