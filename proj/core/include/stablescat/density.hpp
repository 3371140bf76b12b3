#pragma once

#include "stablescat/model.hpp"

namespace stablescat {

/// Transition density p_t(x,y) by radial Fourier inversion of exp(-t|xi|^alpha).
/// Throws QuadratureError if the inversion misses the absolute tolerance.
double density(const StableModel& m, double t, const Point& x, const Point& y, double tol = 1e-8);

/// p_t as a function of r = |x - y|.
double density_radial(const StableModel& m, double t, double r, double tol = 1e-8);

/// Unit-time profile p_1(s).
double density_unit(const StableModel& m, double s, double tol = 1e-8);

/// p_1(s) by the Hankel integral only (no series shortcut).
double density_unit_hankel(const StableModel& m, double s, double tol = 1e-8);

/// p_1(s) by the large-s series; returns NaN when the series does not settle.
double density_unit_series(const StableModel& m, double s);

/// Isotropic Cauchy density in R^3: t / (pi^2 (t^2 + r^2)^2).
double cauchy_density_3d(double t, double r);

/// a_riesz |x-y|^{alpha-d}; throws SingularityError when x == y.
double riesz_kernel(const StableModel& m, const Point& x, const Point& y);

/// int_0^inf p_t(r) dt by adaptive quadrature split at t = r^alpha.
double riesz_by_time_integral(const StableModel& m, double r);

/// Smallest c with c^{-1} g <= p_1 <= c g on the grid s in [0, s_max],
/// g(s) = min(1, s^{-d-alpha}); by scaling this covers every (t, r).
double heat_kernel_bound_constant(const StableModel& m, double s_max = 50.0, int n = 200);

}  // namespace stablescat
