#pragma once

#include <string>

#include "stablescat/model.hpp"

namespace stablescat {

enum class PotentialKind { zero, ball, bump, quadratic };

PotentialKind parse_potential_kind(const std::string& s);
std::string potential_kind_name(PotentialKind k);

/// Nonnegative potential V(x) = weight * V0(scale x + shift), optionally multiplied by
/// the indicator of a cube window given in original coordinates.
///   ball:      V0(u) = height 1_{|u| < radius}
///   bump:      V0(u) = height (1 - |u|^2 / radius^2)_+
///   quadratic: V0(u) = height |u|^2
struct PotentialSpec {
  PotentialKind kind = PotentialKind::zero;
  int d = 3;
  double height = 1.0;
  double radius = 1.0;
  double weight = 1.0;
  double scale = 1.0;
  Point shift{};
  bool windowed = false;
  Cube window;

  double operator()(const Point& x) const;
  bool is_zero() const { return kind == PotentialKind::zero || weight == 0.0 || height == 0.0; }

  /// Bounding ball of the support in original coordinates (radius may be infinite).
  Point support_center() const;
  double support_radius() const;
  /// sup V over its support; infinite only for an unwindowed quadratic.
  double sup() const;
  /// int V dx when it has a closed form (window absent, containing or disjoint from the
  /// support, or a quadratic on a window); NaN otherwise.
  double l1_norm() const;
  bool has_exact_l1() const;

  /// V_{r,xi}(x) = V(r x + xi), restricted to the cube window when given.
  PotentialSpec transformed(double r, const Point& xi) const;
  PotentialSpec transformed(double r, const Point& xi, const Cube& w) const;
  PotentialSpec scaled(double c) const;
};

PotentialSpec zero_potential(int d);
PotentialSpec ball_potential(int d, double height, double radius, const Point& center = {});
PotentialSpec bump_potential(int d, double height, double radius, const Point& center = {});
PotentialSpec quadratic_potential(int d, double height = 1.0);

/// Lebesgue measure of {V <= c} inside the cube, by tensor midpoint rule with n cells per axis.
double sublevel_measure(const PotentialSpec& v, double c, const Cube& cube, int n = 64);

}  // namespace stablescat
