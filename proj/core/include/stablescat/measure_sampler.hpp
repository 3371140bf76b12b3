#pragma once

#include <vector>

#include "stablescat/jump_functional.hpp"
#include "stablescat/potential.hpp"
#include "stablescat/rng.hpp"

namespace stablescat {

/// Mixture proposal pi_V q_V + pi_F q_F with exactly known density.
///   q_V: V / |V|_1 by rejection from the support bound when |V|_1 is known in closed
///        form, otherwise uniform on the bounding region (window cube or support ball).
///   q_F: radial piecewise-constant fit of a cached F1 field with exact inversion of
///        u^{d-1} inside each cell and uniform directions.
class MeasureSampler {
 public:
  MeasureSampler() = default;
  /// mass_v and mass_f are the unnormalized mixture weights; zero drops a component.
  MeasureSampler(const PotentialSpec& v, double mass_v, const FOneField* f, double mass_f, int cells = 4000);

  Point sample(Rng& rng) const;
  double density(const Point& x) const;
  bool empty() const { return pi_v_ == 0.0 && pi_f_ == 0.0; }
  int dim() const { return d_; }

 private:
  int d_ = 3;
  double pi_v_ = 0.0, pi_f_ = 0.0;
  // V component
  PotentialSpec v_;
  bool v_uniform_ = false;
  bool v_cube_ = false;
  Point v_center_{};
  double v_radius_ = 0.0;  // ball radius or half side
  double v_norm_ = 0.0;
  double v_region_volume_ = 0.0;
  // F component, in transformed radius u = |scale x + shift|
  JumpFunctional jf_;
  std::vector<double> edges_;
  std::vector<double> cdf_;
  std::vector<double> cell_density_;  // density in x' coordinates on each cell
};

}  // namespace stablescat
