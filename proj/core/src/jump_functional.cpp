#include "stablescat/jump_functional.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "detail/quad.hpp"
#include "stablescat/errors.hpp"

namespace stablescat {

namespace {
constexpr double kPi = boost::math::constants::pi<double>();
}

double Profile::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  switch (kind) {
    case PhiKind::power:
      return std::pow(t, beta);
    case PhiKind::power_ratio:
      return std::pow(t / (1.0 + t), beta);
    case PhiKind::log:
      return std::log1p(std::pow(t, beta));
    case PhiKind::log_iter: {
      double v = t;
      for (int i = 0; i < std::max(1, iter); ++i) v = std::log1p(std::pow(v, beta));
      return v;
    }
  }
  return 0.0;
}

double Profile::inverse(double v) const {
  if (v <= 0.0) return 0.0;
  double hi = 1.0;
  while ((*this)(hi) < v) {
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((*this)(mid) < v ? lo : hi) = mid;
  }
  return hi;
}

std::string Profile::name() const {
  switch (kind) {
    case PhiKind::power:
      return "power";
    case PhiKind::power_ratio:
      return "power_ratio";
    case PhiKind::log:
      return "log";
    case PhiKind::log_iter:
      return "log_iter_n";
  }
  return "?";
}

PhiKind parse_phi_kind(const std::string& s) {
  if (s == "power") return PhiKind::power;
  if (s == "power_ratio") return PhiKind::power_ratio;
  if (s == "log") return PhiKind::log;
  if (s == "log_iter_n" || s == "log_iter") return PhiKind::log_iter;
  throw std::invalid_argument("unknown phi profile '" + s + "'");
}

double JumpFunctional::region_weight(double u, double v) const {
  const double Ro = R + Rp;
  if (kind == FKind::shell) {
    const bool xin = u < R, yin = v < R;
    const bool xa = !xin && u < Ro, ya = !yin && v < Ro;
    return 0.5 * (double(xin) + double(yin) + double(xa && ya));
  }
  if (u >= Ro || v >= Ro || grid_r.size() < 2) return 0.0;
  const std::size_t n = grid_r.size();
  auto locate = [&](double w, std::size_t& i, double& f) {
    const auto it = std::upper_bound(grid_r.begin(), grid_r.end(), w);
    i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - grid_r.begin() - 1, 0), n - 2);
    f = std::clamp((w - grid_r[i]) / (grid_r[i + 1] - grid_r[i]), 0.0, 1.0);
  };
  auto T = [&](double a, double b) {
    std::size_t i, j;
    double fa, fb;
    locate(a, i, fa);
    locate(b, j, fb);
    const double t00 = grid_T[i * n + j], t01 = grid_T[i * n + j + 1];
    const double t10 = grid_T[(i + 1) * n + j], t11 = grid_T[(i + 1) * n + j + 1];
    return (1 - fa) * ((1 - fb) * t00 + fb * t01) + fa * ((1 - fb) * t10 + fb * t11);
  };
  return 0.5 * (T(u, v) + T(v, u));
}

double JumpFunctional::value_radial(double u, double v, double rho) const {
  if (weight == 0.0) return 0.0;
  const double s = scale * rho;
  if (!(s < Rp) || s <= 0.0) return 0.0;
  return weight * region_weight(u, v) * phi(s);
}

double JumpFunctional::operator()(const Point& x, const Point& y) const {
  const Point xp = scale * x + shift, yp = scale * y + shift;
  return value_radial(norm(xp), norm(yp), distance(x, y));
}

Point JumpFunctional::support_center() const { return (-1.0 / scale) * shift; }

double JumpFunctional::psi(double alpha, double p) const { return std::pow(p, alpha / phi.beta); }

JumpFunctional JumpFunctional::transformed(double r, const Point& xi) const {
  // F'(x,y) = F(r x + xi, r y + xi): compose with the existing affine map
  JumpFunctional out = *this;
  out.scale = scale * r;
  out.shift = scale * xi + shift;
  return out;
}

JumpFunctional JumpFunctional::scaled(double c) const {
  JumpFunctional out = *this;
  out.weight *= c;
  out.bound *= c;
  return out;
}

JumpFunctional make_shell_functional(Profile phi, double R, double Rp) {
  if (!(R > 0.0 && Rp > 0.0)) throw DomainError("shell functional requires R > 0 and R' > 0");
  JumpFunctional jf;
  jf.kind = FKind::shell;
  jf.phi = phi;
  jf.R = R;
  jf.Rp = Rp;
  jf.bound = phi(2.0 * (R + Rp));
  return jf;
}

JumpFunctional make_user_grid(Profile phi, double R, double Rp, std::vector<double> grid_r,
                              std::vector<double> grid_T) {
  if (grid_r.size() < 2 || grid_T.size() != grid_r.size() * grid_r.size())
    throw DomainError("user grid needs n >= 2 nodes and an n x n table");
  if (grid_r.front() != 0.0 || !std::is_sorted(grid_r.begin(), grid_r.end()))
    throw DomainError("user grid nodes must start at 0 and increase");
  for (double t : grid_T)
    if (!(t >= 0.0)) throw DomainError("user grid values must be nonnegative");
  JumpFunctional jf = make_shell_functional(phi, R, Rp);
  jf.kind = FKind::user_grid;
  jf.grid_r = std::move(grid_r);
  jf.grid_T = std::move(grid_T);
  const double tmax = *std::max_element(jf.grid_T.begin(), jf.grid_T.end());
  jf.bound = tmax * phi(2.0 * (R + Rp));
  return jf;
}

JumpFunctional zero_functional() {
  JumpFunctional jf = make_shell_functional(Profile{}, 1.0, 0.5);
  jf.weight = 0.0;
  jf.bound = 0.0;
  return jf;
}

double eval_F(const JumpFunctional& jf, const Point& x, const Point& y) { return jf(x, y); }

double angular_measure(int d, double lo, double hi) {
  lo = std::clamp(lo, -1.0, 1.0);
  hi = std::clamp(hi, -1.0, 1.0);
  if (!(hi > lo)) return 0.0;
  switch (d) {
    case 1:
      return double(lo <= -1.0) + double(hi >= 1.0);
    case 2:
      return 2.0 * (std::acos(lo) - std::acos(hi));
    case 3:
      return 2.0 * kPi * (hi - lo);
    case 4: {
      auto F = [](double mu) { return 0.5 * (mu * std::sqrt(1.0 - mu * mu) + std::asin(mu)); };
      return 4.0 * kPi * (F(hi) - F(lo));
    }
    default:
      throw DomainError("angular_measure: unsupported dimension");
  }
}

namespace {

/// int over directions of g(F(x, x + rho w)) at fixed rho, for |x'| = u.
double angular_part(const JumpFunctional& jf, int d, double u, double rho, double p) {
  const double sigma = jf.scale * rho;
  const double phiv = jf.phi(sigma);
  auto g = [&](double w) {
    const double f = jf.weight * w * phiv;
    return p > 0.0 ? -std::expm1(-p * f) : f;
  };
  if (u <= 0.0 || sigma <= 0.0) return g(jf.region_weight(u, sigma)) * sphere_area(d);

  auto v_of = [&](double mu) { return std::sqrt(std::max(0.0, u * u + sigma * sigma + 2.0 * u * sigma * mu)); };
  std::vector<double> radii;
  if (jf.kind == FKind::shell) {
    radii = {jf.R, jf.R + jf.Rp};
  } else {
    radii = jf.grid_r;
    radii.push_back(jf.R + jf.Rp);
  }
  std::vector<double> mus{-1.0, 1.0};
  for (double b : radii) {
    const double mu = (b * b - u * u - sigma * sigma) / (2.0 * u * sigma);
    if (mu > -1.0 && mu < 1.0) mus.push_back(mu);
  }
  std::sort(mus.begin(), mus.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < mus.size(); ++k) {
    const double lo = mus[k], hi = mus[k + 1];
    if (!(hi > lo)) continue;
    if (jf.kind == FKind::shell || d == 1) {
      total += g(jf.region_weight(u, v_of(0.5 * (lo + hi)))) * angular_measure(d, lo, hi);
    } else {
      // smooth weight inside the piece: Gauss in theta with density omega_{d-2} sin^{d-2}
      const double th_lo = std::acos(hi), th_hi = std::acos(lo);
      const double wd = sphere_area(d - 1);
      total += detail::gauss<16>(
          [&](double th) { return wd * std::pow(std::sin(th), d - 2) * g(jf.region_weight(u, v_of(std::cos(th)))); },
          th_lo, th_hi);
    }
  }
  return total;
}

double radial_integral(const StableModel& m, const JumpFunctional& jf, double u, double p, double rho_max,
                       double tol) {
  if (jf.weight == 0.0 || u >= jf.R + jf.Rp) return 0.0;
  const double s = jf.scale;
  const double top = std::min(rho_max, jf.Rp / s);
  if (!(top > 0.0)) return 0.0;
  const int d = m.d;
  const double a = m.alpha;
  auto h = [&](double rho) {
    if (!(rho > 0.0)) return 0.0;
    const double ang = angular_part(jf, d, u, rho, p);
    return ang > 0.0 ? std::exp(std::log(ang) - (1.0 + a) * std::log(rho)) : 0.0;
  };

  std::vector<double> cuts{0.0, top};
  std::vector<double> radii{jf.R, jf.R + jf.Rp};
  if (jf.kind == FKind::user_grid) radii.insert(radii.end(), jf.grid_r.begin(), jf.grid_r.end());
  for (double b : radii)
    for (double sig : {std::abs(b - u), b + u}) {
      const double rho = sig / s;
      if (rho > 0.0 && rho < top) cuts.push_back(rho);
    }
  if (p > 0.0) {
    const double r0 = jf.phi.inverse(1.0 / (p * jf.weight)) / s;
    if (r0 > 0.0 && r0 < top) cuts.push_back(r0);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double c = m.c_levy;
  double total = 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    const double piece_tol = tol / (c * double(cuts.size()));
    if (k == 0) {
      // rho^{beta-1-alpha}-type endpoint behavior at 0
      double err = 0.0;
      const double v = ts.integrate(h, lo, hi, 1e-12, &err);
      if (!std::isfinite(v)) throw QuadratureError("radial quadrature produced a non-finite value");
      total += v;
    } else {
      const auto q = detail::adaptive_gk(h, lo, hi, piece_tol);
      if (q.error > std::max(10.0 * piece_tol, 1e-10 * std::abs(q.value)))
        throw ConvergenceError("radial quadrature exceeded its refinement budget");
      total += q.value;
    }
  }
  return c * total;
}

}  // namespace

double radial_functional(const StableModel& m, const JumpFunctional& jf, const Point& x, double p, double rho_max,
                         double tol) {
  return radial_integral(m, jf, jf.transformed_radius(x), p, rho_max, tol);
}

double f_p_one(const StableModel& m, const JumpFunctional& jf, double p, const Point& x, double tol) {
  if (p < 1.0) throw DomainError("f_p_one requires p >= 1");
  return radial_functional(m, jf, x, p, std::numeric_limits<double>::infinity(), tol);
}

double hat_f_one(const StableModel& m, const JumpFunctional& jf, const Point& x, double tol) {
  return radial_functional(m, jf, x, 0.0, std::numeric_limits<double>::infinity(), tol);
}

double small_jump_compensator(const StableModel& m, const JumpFunctional& jf, double p, const Point& x, double delta,
                              double tol) {
  if (!(p > 0.0)) return 0.0;
  return radial_functional(m, jf, x, p, delta, tol);
}

double RadialTable::at(double u) const {
  for (const auto& seg : segs_) {
    if (u < seg.hi) {
      if (u < seg.lo) return seg.values.front();
      const double n = double(seg.values.size() - 1);
      const double pos = (u - seg.lo) / (seg.hi - seg.lo) * n;
      const std::size_t i = std::min<std::size_t>(std::size_t(pos), seg.values.size() - 2);
      const double f = pos - double(i);
      return (1.0 - f) * seg.values[i] + f * seg.values[i + 1];
    }
  }
  return 0.0;
}

double RadialTable::ball_integral(int d) const {
  double total = 0.0;
  for (const auto& seg : segs_) {
    const std::size_t n = seg.values.size() - 1;
    const double h = (seg.hi - seg.lo) / double(n);
    for (std::size_t i = 0; i < n; ++i) {
      // exact integral of the linear interpolant times u^{d-1} via 3-point Gauss
      const double a = seg.lo + h * double(i);
      total += detail::gauss<3>(
          [&](double u) {
            const double f = (u - a) / h;
            return ((1.0 - f) * seg.values[i] + f * seg.values[i + 1]) * std::pow(u, d - 1);
          },
          a, a + h);
    }
  }
  return sphere_area(d) * total;
}

double RadialTable::max_value() const {
  double v = 0.0;
  for (const auto& seg : segs_)
    for (double x : seg.values) v = std::max(v, x);
  return v;
}

FOneField make_f_one_field(const StableModel& m, const JumpFunctional& jf, double p, bool hat, int nodes) {
  FOneField f;
  f.p = p;
  f.hat = hat;
  f.jf = jf;
  if (jf.weight == 0.0) return f;
  const double pp = hat ? 0.0 : p;
  f.table = RadialTable(jf.R, jf.Rp, nodes, [&](double u) {
    return radial_integral(m, jf, u, pp, std::numeric_limits<double>::infinity(), 1e-10);
  });
  f.l1_norm = f.table.ball_integral(m.d) / std::pow(jf.scale, m.d);
  return f;
}

CompensatorTable make_compensator_table(const StableModel& m, const JumpFunctional& jf, double q, double delta,
                                        int nodes) {
  CompensatorTable c;
  c.delta = delta;
  c.q = q;
  c.jf = jf;
  if (jf.weight == 0.0 || !(q > 0.0)) return c;
  c.table = RadialTable(jf.R, jf.Rp, nodes, [&](double u) { return radial_integral(m, jf, u, q, delta, 1e-12); });
  return c;
}

PsiReport check_psi_condition(const StableModel& m, const JumpFunctional& jf, const std::vector<double>& p_grid,
                              const std::vector<Point>& x_grid) {
  PsiReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& x : x_grid) {
    const double f1 = f_p_one(m, jf, 1.0, x);
    if (!(f1 > 0.0)) continue;
    for (double p : p_grid) {
      const double ratio = f_p_one(m, jf, p, x) / (jf.psi(m.alpha, p) * f1);
      ++rep.evaluated;
      rep.vacuous = false;
      if (ratio < rep.min_ratio) {
        rep.min_ratio = ratio;
        rep.argmin_p = p;
        rep.argmin_x = x;
      }
    }
  }
  if (rep.vacuous) rep.min_ratio = 0.0;
  return rep;
}

}  // namespace stablescat
