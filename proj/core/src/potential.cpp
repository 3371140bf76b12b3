#include "stablescat/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stablescat/errors.hpp"

namespace stablescat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Distance from point p to the cube (0 inside) and farthest distance from p to the cube.
double cube_min_distance(const Cube& c, const Point& p, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double e = std::max(0.0, std::abs(p[i] - c.center[i]) - 0.5 * c.side);
    s += e * e;
  }
  return std::sqrt(s);
}

double cube_max_distance(const Cube& c, const Point& p, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double e = std::abs(p[i] - c.center[i]) + 0.5 * c.side;
    s += e * e;
  }
  return std::sqrt(s);
}

// int over a cube of |a x + b|^2 dx, exact (a scalar, b vector)
double quadratic_cube_integral(const Cube& c, double a, const Point& b, int d) {
  const double h = 0.5 * c.side;
  const double vol = c.volume(d);
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double m = a * c.center[i] + b[i];
    s += m * m + a * a * h * h / 3.0;
  }
  return vol * s;
}

}  // namespace

PotentialKind parse_potential_kind(const std::string& s) {
  if (s == "zero") return PotentialKind::zero;
  if (s == "ball") return PotentialKind::ball;
  if (s == "bump") return PotentialKind::bump;
  if (s == "quadratic") return PotentialKind::quadratic;
  throw DomainError("unknown potential kind '" + s + "'");
}

std::string potential_kind_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::ball: return "ball";
    case PotentialKind::bump: return "bump";
    case PotentialKind::quadratic: return "quadratic";
  }
  return "?";
}

double PotentialSpec::operator()(const Point& x) const {
  if (is_zero()) return 0.0;
  if (windowed && !window.contains(x, d)) return 0.0;
  const double u2 = norm2(scale * x + shift);
  switch (kind) {
    case PotentialKind::ball: return u2 < radius * radius ? weight * height : 0.0;
    case PotentialKind::bump: return u2 < radius * radius ? weight * height * (1.0 - u2 / (radius * radius)) : 0.0;
    case PotentialKind::quadratic: return weight * height * u2;
    case PotentialKind::zero: break;
  }
  return 0.0;
}

Point PotentialSpec::support_center() const {
  if (windowed && (kind == PotentialKind::quadratic || window.circumradius(d) < radius / scale)) return window.center;
  return (-1.0 / scale) * shift;
}

double PotentialSpec::support_radius() const {
  if (is_zero()) return 0.0;
  const double own = kind == PotentialKind::quadratic ? kInf : radius / scale;
  if (!windowed) return own;
  return std::min(own, window.circumradius(d));
}

double PotentialSpec::sup() const {
  if (is_zero()) return 0.0;
  if (kind != PotentialKind::quadratic) return weight * height;
  if (!windowed) return kInf;
  // |scale x + shift| is maximized at a cube corner
  Point c = (-1.0 / scale) * shift;
  const double r = cube_max_distance(window, c, d) * scale;
  return weight * height * r * r;
}

bool PotentialSpec::has_exact_l1() const { return std::isfinite(l1_norm()) || is_zero(); }

double PotentialSpec::l1_norm() const {
  if (is_zero()) return 0.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const Point c0 = (-1.0 / scale) * shift;
  if (kind == PotentialKind::quadratic) {
    if (!windowed) return kInf;
    return weight * height * quadratic_cube_integral(window, scale, shift, d);
  }
  const double rs = radius / scale;
  if (windowed) {
    if (cube_min_distance(window, c0, d) >= rs) return 0.0;
    if (cube_max_distance(window, c0, d) <= rs) {
      const double cv = window.volume(d);
      if (kind == PotentialKind::ball) return weight * height * cv;
      return weight * height * (cv - quadratic_cube_integral(window, scale, shift, d) / (radius * radius));
    }
    for (int i = 0; i < d; ++i)
      if (std::abs(c0[i] - window.center[i]) + rs > 0.5 * window.side) return nan;
  }
  const double vol = ball_volume(d) * std::pow(rs, d);
  if (kind == PotentialKind::ball) return weight * height * vol;
  // bump: int (1 - |u|^2/a^2) over the ball = vol * (1 - d/(d+2))
  return weight * height * vol * 2.0 / (d + 2.0);
}

PotentialSpec PotentialSpec::transformed(double r, const Point& xi) const {
  if (!(r > 0.0)) throw DomainError("potential transform needs r > 0");
  PotentialSpec v = *this;
  v.shift = scale * xi + shift;
  v.scale = scale * r;
  if (windowed) {
    v.window.center = (1.0 / r) * (window.center - xi);
    v.window.side = window.side / r;
  }
  return v;
}

PotentialSpec PotentialSpec::transformed(double r, const Point& xi, const Cube& w) const {
  if (windowed) throw DomainError("potential already carries a window");
  PotentialSpec v = transformed(r, xi);
  v.windowed = true;
  v.window = w;
  return v;
}

PotentialSpec PotentialSpec::scaled(double c) const {
  if (c < 0.0) throw DomainError("potential scale factor must be nonnegative");
  PotentialSpec v = *this;
  v.weight *= c;
  return v;
}

PotentialSpec zero_potential(int d) {
  PotentialSpec v;
  v.d = d;
  v.kind = PotentialKind::zero;
  return v;
}

PotentialSpec ball_potential(int d, double height, double radius, const Point& center) {
  if (!(height >= 0.0 && radius > 0.0)) throw DomainError("ball potential needs height >= 0 and radius > 0");
  PotentialSpec v;
  v.d = d;
  v.kind = PotentialKind::ball;
  v.height = height;
  v.radius = radius;
  v.shift = -1.0 * center;
  return v;
}

PotentialSpec bump_potential(int d, double height, double radius, const Point& center) {
  PotentialSpec v = ball_potential(d, height, radius, center);
  v.kind = PotentialKind::bump;
  return v;
}

PotentialSpec quadratic_potential(int d, double height) {
  if (!(height >= 0.0)) throw DomainError("quadratic potential needs height >= 0");
  PotentialSpec v;
  v.d = d;
  v.kind = PotentialKind::quadratic;
  v.height = height;
  return v;
}

double sublevel_measure(const PotentialSpec& v, double c, const Cube& cube, int n) {
  const int d = v.d;
  const double vol = cube.volume(d);
  if (v.is_zero()) return c >= 0.0 ? vol : 0.0;
  if (!v.windowed && (v.kind == PotentialKind::quadratic || v.kind == PotentialKind::ball)) {
    const Point c0 = (-1.0 / v.scale) * v.shift;
    const double top = v.weight * v.height;
    if (v.kind == PotentialKind::quadratic) {
      // {V <= c} = closed ball of radius sqrt(c / top) / scale
      const double rho = c < 0.0 ? -1.0 : std::sqrt(c / top) / v.scale;
      if (rho < 0.0 || cube_min_distance(cube, c0, d) > rho) return 0.0;
      if (cube_max_distance(cube, c0, d) <= rho) return vol;
    } else {
      if (c >= top) return vol;
      if (c < 0.0) return 0.0;
      // {V <= c} is the complement of the open support ball
      const double rho = v.radius / v.scale;
      if (cube_min_distance(cube, c0, d) >= rho) return vol;
      if (cube_max_distance(cube, c0, d) <= rho) return 0.0;
    }
  }
  const double h = cube.side / n;
  long total = 1;
  for (int i = 0; i < d; ++i) total *= n;
  long hits = 0;
  for (long k = 0; k < total; ++k) {
    Point x{};
    long q = k;
    for (int i = 0; i < d; ++i) {
      x[i] = cube.center[i] - 0.5 * cube.side + h * (double(q % n) + 0.5);
      q /= n;
    }
    if (v(x) <= c) ++hits;
  }
  return vol * double(hits) / double(total);
}

}  // namespace stablescat
