#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "stablescat/model.hpp"

namespace stablescat {

enum class PhiKind { power, power_ratio, log, log_iter };

/// Increasing profile phi with phi(0) = 0.
struct Profile {
  PhiKind kind = PhiKind::power;
  double beta = 2.0;
  int iter = 1;

  double operator()(double t) const;
  /// Smallest t with phi(t) >= v (bisection; phi is increasing).
  double inverse(double v) const;
  std::string name() const;
};

PhiKind parse_phi_kind(const std::string& s);

enum class FKind { shell, user_grid };

/// Symmetric jump function. For shell:
///   F(x,y) = 1/2 phi(|x-y|) [1_{|x-y|<R'} (1_{B_R}(x) + 1_{B_R}(y) + 1_{A}(x) 1_{A}(y))],
/// A = B(0,R+R') \ B(0,R). For user_grid: F = 1/2 [T(|x|,|y|) + T(|y|,|x|)] phi(|x-y|) 1_{|x-y|<R'},
/// T bilinear on a square grid over [0,R+R']^2 and zero beyond.
/// Both are evaluated at transformed arguments x' = scale x + shift and multiplied by weight,
/// which realizes F_{r,xi}(x,y) = F(r x + xi, r y + xi) and c F.
struct JumpFunctional {
  FKind kind = FKind::shell;
  Profile phi;
  double R = 1.0;
  double Rp = 0.5;
  double bound = 0.0;
  double weight = 1.0;
  double scale = 1.0;
  Point shift{};
  std::vector<double> grid_r;  // user_grid nodes, increasing, grid_r.front() == 0
  std::vector<double> grid_T;  // row-major T(grid_r[i], grid_r[j])

  double operator()(const Point& x, const Point& y) const;

  /// F at distance rho given |x'| = u, |y'| = v (transformed radii).
  double value_radial(double u, double v, double rho) const;

  /// Region weight in {0, 1/2, 1} (shell) or the symmetrized T (user_grid).
  double region_weight(double u, double v) const;

  bool is_zero() const { return weight == 0.0; }
  double outer_radius() const { return R + Rp; }
  /// Support ball of F1 in original coordinates.
  Point support_center() const;
  double support_radius() const { return outer_radius() / scale; }
  /// Largest |x - y| with F(x,y) > 0, in original coordinates.
  double range() const { return Rp / scale; }
  double transformed_radius(const Point& x) const { return norm(scale * x + shift); }

  /// psi(p) = p^{alpha/beta}.
  double psi(double alpha, double p) const;

  JumpFunctional transformed(double r, const Point& xi) const;
  JumpFunctional scaled(double c) const;
};

JumpFunctional make_shell_functional(Profile phi, double R, double Rp);
JumpFunctional make_user_grid(Profile phi, double R, double Rp, std::vector<double> grid_r, std::vector<double> grid_T);
JumpFunctional zero_functional();

double eval_F(const JumpFunctional& jf, const Point& x, const Point& y);

/// Angular measure of {mu in (lo, hi)} on S^{d-1}, mu the cosine to a fixed axis.
double angular_measure(int d, double lo, double hi);

/// C int_{|z| < rho_max} g(F(x, x+z)) |z|^{-d-alpha} dz for g(u) = 1 - exp(-p u) (p > 0) or
/// g(u) = u (p == 0), with absolute tolerance tol.
double radial_functional(const StableModel& m, const JumpFunctional& jf, const Point& x, double p, double rho_max,
                         double tol);

/// F^{(p)}1(x) = C int (1 - exp(-p F(x,y))) |x-y|^{-d-alpha} dy.
double f_p_one(const StableModel& m, const JumpFunctional& jf, double p, const Point& x, double tol = 1e-10);

/// F-hat 1(x) = C int F(x,y) |x-y|^{-d-alpha} dy.
double hat_f_one(const StableModel& m, const JumpFunctional& jf, const Point& x, double tol = 1e-10);

/// Compensator density G_delta(x) at level p: the part of F^{(p)}1 from |y - x| <= delta.
double small_jump_compensator(const StableModel& m, const JumpFunctional& jf, double p, const Point& x, double delta,
                              double tol = 1e-10);

/// Radial table of a function of |x'| on [0, R+R'] with segments cut at |R-R'|, R, R+R'.
/// Discontinuities at the breakpoints are represented by one-sided limits.
class RadialTable {
 public:
  RadialTable() = default;
  template <class Fn>
  RadialTable(double R, double Rp, int nodes_per_segment, Fn&& fn);

  /// Value at transformed radius u; zero for u >= R + R'.
  double at(double u) const;
  /// int over the ball in transformed coordinates: omega_{d-1} int_0^{R+R'} f(u) u^{d-1} du.
  double ball_integral(int d) const;
  double max_value() const;
  bool empty() const { return segs_.empty(); }

 private:
  struct Segment {
    double lo, hi;
    std::vector<double> values;
  };
  std::vector<Segment> segs_;
};

/// Cached x -> F^{(p)}1(x) (or F-hat 1 when hat is set).
struct FOneField {
  double p = 1.0;
  bool hat = false;
  JumpFunctional jf;
  RadialTable table;
  double l1_norm = 0.0;

  double operator()(const Point& x) const { return table.at(jf.transformed_radius(x)); }
};

FOneField make_f_one_field(const StableModel& m, const JumpFunctional& jf, double p, bool hat = false,
                           int nodes_per_segment = 200);

/// Cached (x, q) -> G_delta(x) at level q for a fixed delta.
struct CompensatorTable {
  double delta = 0.0;
  double q = 1.0;
  JumpFunctional jf;
  RadialTable table;

  double operator()(const Point& x) const { return table.at(jf.transformed_radius(x)); }
};

CompensatorTable make_compensator_table(const StableModel& m, const JumpFunctional& jf, double q, double delta,
                                        int nodes_per_segment = 120);

struct PsiReport {
  bool vacuous = true;
  double min_ratio = 0.0;
  double argmin_p = 0.0;
  Point argmin_x{};
  int evaluated = 0;
};

/// min over the grid of F^{(p)}1(x) / (psi(p) F1(x)), skipping F1(x) == 0.
PsiReport check_psi_condition(const StableModel& m, const JumpFunctional& jf, const std::vector<double>& p_grid,
                              const std::vector<Point>& x_grid);

// -- implementation of the RadialTable template constructor --

template <class Fn>
RadialTable::RadialTable(double R, double Rp, int n, Fn&& fn) {
  std::vector<double> cuts{0.0};
  if (std::abs(R - Rp) > 0.0 && std::abs(R - Rp) < R) cuts.push_back(std::abs(R - Rp));
  cuts.push_back(R);
  cuts.push_back(R + Rp);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    Segment seg{cuts[s], cuts[s + 1], {}};
    seg.values.resize(std::size_t(n) + 1);
    const double w = seg.hi - seg.lo;
    for (int i = 0; i <= n; ++i) {
      double u = seg.lo + w * double(i) / n;
      // one-sided limits at the segment ends
      if (i == 0 && s > 0) u = seg.lo + 1e-12 * w;
      if (i == n) u = seg.hi - 1e-12 * w;
      seg.values[std::size_t(i)] = fn(u);
    }
    segs_.push_back(std::move(seg));
  }
}

}  // namespace stablescat
