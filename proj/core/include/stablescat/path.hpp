#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "stablescat/model.hpp"

namespace stablescat {

struct JumpEvent {
  double time = 0.0;
  Point pre{};   // X_{t-}
  Point post{};  // X_t
};

/// Skeleton of one simulated path. positions[i] is X at times[i]; when a big jump
/// happens at times[i], positions[i] is the post-jump value and jump_at[i] indexes
/// into jumps (otherwise -1). deltas[i] is the truncation used on (times[i], times[i+1]].
struct PathLedger {
  int d = 3;
  std::vector<double> times;
  std::vector<Point> positions;
  std::vector<std::int32_t> jump_at;
  std::vector<double> deltas;
  std::vector<JumpEvent> jumps;
  double horizon = 0.0;
  double exit_radius = 0.0;
  double truncation_delta = 0.0;
  bool exited = false;
  bool stopped = false;  // reached the stop set

  double end_time() const { return times.empty() ? 0.0 : times.back(); }
  /// Left limit X_{times[i]-}.
  const Point& left_limit(std::size_t i) const { return jump_at[i] >= 0 ? jumps[std::size_t(jump_at[i])].pre : positions[i]; }
};

struct Ball {
  Point center{};
  double radius = 0.0;
};

/// Spatially adaptive truncation. Inside the active balls (or when none are given)
/// the small-jump threshold is delta_near; outside it grows to
/// clamp(far_fraction * dist, delta_near, delta_far_max) and time steps stretch so that
/// one Gaussian step stays below dist / 6.
struct Truncation {
  double delta_near = 0.01;
  double delta_far_max = 0.5;
  double far_fraction = 0.25;
  std::vector<Ball> active;

  double distance_to_active(const Point& x) const;
  double delta_at(const Point& x) const;
};

/// Surfaces where integrands along the path jump (spheres and cube boundaries). Inside
/// the active set the time step shrinks to (dist / (3 sigma))^2, floored at dt_min, so a
/// Gaussian step rarely crosses a surface it was not already close to.
struct Interfaces {
  std::vector<Ball> spheres;
  std::vector<Cube> cubes;
  double dt_min = 1e-7;

  bool empty() const { return spheres.empty() && cubes.empty(); }
  double distance(const Point& x, int d) const;
};

struct SimulationOptions {
  double horizon = 1.0;
  double exit_radius = 1e300;
  double dt_max = 1e-3;
  Interfaces interfaces;
  Point start{};
  Truncation truncation;
  /// Record every step; when false only jump times and points inside active balls are kept.
  bool full_skeleton = true;
  /// Ends the path at the first recorded position inside this set (checked at every step).
  std::function<bool(const Point&)> stop_set;
};

/// Jump-decomposed simulation: compound Poisson big jumps plus Gaussian small jumps
/// with matched second moment. Path index selects an independent RNG stream.
PathLedger simulate_path(const StableModel& m, std::uint64_t seed, std::uint64_t path_index,
                         const SimulationOptions& opt);

/// Uniform-truncation convenience overload.
PathLedger simulate_path(const StableModel& m, std::uint64_t seed, double horizon, double exit_radius, double delta,
                         double dt_max, const Point& start);

/// Binary record: header "SLDG", u32 version, u32 d, f64 horizon, exit_radius, delta, u64 count;
/// then count records [f64 time | d x f64 position | f64 flag] with flag 0 ordinary,
/// 1 pre-jump, 2 post-jump. Little-endian.
void write_ledger(std::ostream& os, const PathLedger& p);
PathLedger read_ledger(std::istream& is);

}  // namespace stablescat
