#pragma once

#include <cstdint>

#include "stablescat/model.hpp"
#include "stablescat/rng.hpp"

namespace stablescat {

/// Positive a-stable variable with E exp(-lambda S) = exp(-lambda^a), 0 < a < 1 (Kanter).
double sample_positive_stable(Rng& rng, double a);

/// Exact X_t = B_{S_t}: S an (alpha/2)-stable subordinator, B with per-coordinate variance 2s.
Point sample_stable_exact(const StableModel& m, Rng& rng, double t);

/// First exit time from B(0, radius) monitored on a grid of width h using exact
/// increments; capped at t_max.
double exit_time_exact_grid(const StableModel& m, Rng& rng, double radius, const Point& start, double h,
                            double t_max);

}  // namespace stablescat
