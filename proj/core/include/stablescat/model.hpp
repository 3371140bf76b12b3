#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace stablescat {

/// Largest supported ambient dimension.
inline constexpr int kMaxDim = 4;

/// A point of R^d stored with fixed capacity; components >= d are zero, so
/// norms and inner products over the full array are the d-dimensional ones.
using Point = std::array<double, kMaxDim>;

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) s += a[i] * b[i];
  return s;
}
inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }
inline Point operator+(const Point& a, const Point& b) {
  Point c{};
  for (int i = 0; i < kMaxDim; ++i) c[i] = a[i] + b[i];
  return c;
}
inline Point operator-(const Point& a, const Point& b) {
  Point c{};
  for (int i = 0; i < kMaxDim; ++i) c[i] = a[i] - b[i];
  return c;
}
inline Point operator*(double s, const Point& a) {
  Point c{};
  for (int i = 0; i < kMaxDim; ++i) c[i] = s * a[i];
  return c;
}
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

/// Axis-aligned cube {x : |x_j - center_j| <= side/2} in original coordinates.
struct Cube {
  Point center{};
  double side = 1.0;

  bool contains(const Point& x, int d) const;
  double volume(int d) const;
  /// Distance from the center to a corner.
  double circumradius(int d) const;
};

/// Isotropic alpha-stable process on R^d with characteristic exponent |xi|^alpha.
struct StableModel {
  int d = 3;
  double alpha = 1.0;
  /// Jump-kernel constant: N(x,dy) = c_levy |x-y|^{-d-alpha} dy.
  double c_levy = 0.0;
  /// Riesz-kernel constant: int_0^inf p_t(x,y) dt = a_riesz |x-y|^{alpha-d}.
  double a_riesz = 0.0;
};

/// Builds a model; throws DomainError unless 1 <= d <= kMaxDim, 0 < alpha < 2, d > alpha.
StableModel make_model(int d, double alpha);

/// Levy-kernel constant alpha 2^{alpha-1} pi^{-d/2} Gamma((d+alpha)/2) / Gamma(1-alpha/2).
double levy_constant(int d, double alpha);

/// Gamma((d-alpha)/2) / (2^alpha pi^{d/2} Gamma(alpha/2)).
double riesz_constant(int d, double alpha);

/// Surface area of the unit sphere S^{d-1}.
double sphere_area(int d);

/// Lebesgue measure of the unit ball in R^d.
double ball_volume(int d);

/// Rate of jumps larger than delta: c_levy * |S^{d-1}| * delta^{-alpha} / alpha.
double big_jump_rate(const StableModel& m, double delta);

/// Per-coordinate variance rate of the jumps of size <= delta:
/// c_levy * |S^{d-1}| * delta^{2-alpha} / (d (2-alpha)).
double small_jump_variance_rate(const StableModel& m, double delta);

/// E_0[first exit time of B(0, radius)] in closed form.
double mean_exit_time_ball(const StableModel& m, double radius, double start_radius = 0.0);

/// Capacity of B(0, radius) for the kernel a_riesz |x-y|^{alpha-d}:
/// radius^{d-alpha} Gamma(d/2) / (a_riesz Gamma(alpha/2) Gamma(1 + (d-alpha)/2)).
double ball_capacity(const StableModel& m, double radius);

}  // namespace stablescat
