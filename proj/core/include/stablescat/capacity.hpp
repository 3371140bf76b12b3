#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stablescat/model.hpp"
#include "stablescat/path.hpp"

namespace stablescat {

enum class SetKind { ball, cube, union_of_balls };

/// Compact set K: a closed ball, an axis-aligned cube or a finite union of balls.
struct CompactSet {
  SetKind kind = SetKind::ball;
  int d = 3;
  std::vector<Ball> balls;  // one ball for kind == ball
  Cube cube;

  bool contains(const Point& x) const;
  Ball enclosing_ball() const;
  /// Axis-aligned bounding box [lo, hi].
  std::pair<Point, Point> bounds() const;
  /// Parameters r >= 0 with x + r theta in K, as sorted disjoint intervals.
  std::vector<std::pair<double, double>> ray(const Point& x, const Point& theta) const;
  /// Dilation y -> c y about the origin.
  CompactSet scaled(double c) const;
};

CompactSet ball_set(int d, double radius, const Point& center = {});
CompactSet cube_set(int d, double side, const Point& center = {});
CompactSet union_set(int d, std::vector<Ball> balls);

/// Parses "ball:R", "cube:S" or "balls:x,y[,z],r;x,y[,z],r;..." for dimension d.
CompactSet parse_compact_set(const std::string& spec, int d);

struct EquilibriumResult {
  double cap = 0.0;
  double residual = 0.0;  // max |potential - 1| on the check points
  int n_cells = 0;
  std::vector<Point> nodes;    // collocation points (centroids of the clipped cells)
  std::vector<double> masses;  // equilibrium mass carried by each cell
  std::vector<double> volumes;  // volume of each clipped cell
};

/// Equilibrium measure on cells of a cells_per_axis^d lattice over the bounding box, clipped
/// to K: sum_j m_j <a_riesz |x_i - y|^{alpha-d}>_{S_j} = 1 at the cell centroids x_i, with
/// exact polar integration of the kernel over touching cells. Throws ConvergenceError when
/// the residual exceeds tol.
EquilibriumResult capacity_equilibrium(const StableModel& m, const CompactSet& k, int cells_per_axis,
                                       double tol = 0.3);

struct ExtrapolatedCapacity {
  double cap = 0.0;       // limit h -> 0 of the fit
  double spread = 0.0;    // |fit - finest solve| as an error indicator
  std::vector<EquilibriumResult> levels;
};

/// Solves on each lattice in cells_per_axis and fits cap(h) = a + b h by least squares; the
/// collocation error is first order in h for balls and close to it for cubes.
ExtrapolatedCapacity capacity_extrapolated(const StableModel& m, const CompactSet& k,
                                           const std::vector<int>& cells_per_axis, double tol = 0.3);

enum class HittingStart { balayage, far_sphere };

struct HittingOptions {
  int n_paths = 10000;
  /// Exit radius for balayage starts; start radius for far-sphere starts.
  double far_radius = 0.0;  // <= 0: 20 times the enclosing radius
  HittingStart start = HittingStart::balayage;
  Point direction{};  // far-sphere start direction; zero means uniform
  double enclosing_factor = 1.25;  // balayage ball radius over the enclosing radius of K
  double delta = 0.02;
  double dt_max = 1e-3;
  std::uint64_t seed = 1;
  std::uint64_t stream_offset = 0;
};

struct HittingResult {
  double cap = 0.0;
  double stderr_ = 0.0;
  double bias_bound = 0.0;
  int n_paths = 0;
};

/// Capacity from hitting probabilities.
///   balayage:   Cap(K) = Cap(B) P(hit K) with the start drawn from the normalized
///               equilibrium measure of a ball B containing K (closed form).
///   far_sphere: P_x(hit K) / (a_riesz |x|^{alpha-d}) from |x| = far_radius; biased by
///               O((diam K / far_radius)^2).
HittingResult capacity_hitting_mc(const StableModel& m, const CompactSet& k, const HittingOptions& opt);

}  // namespace stablescat
