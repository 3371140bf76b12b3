#pragma once

#include <map>
#include <vector>

#include "stablescat/feynman_kac.hpp"
#include "stablescat/measure_sampler.hpp"

namespace stablescat {

enum class GammaVariant { expression, time_average };

struct ScatteringEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  int n_paths = 0;
  GammaVariant variant = GammaVariant::expression;
  double bias_bound = 0.0;
};

/// Factors on the three ingredients: mu V, F at level F, and F1 = F^{(1)}1 used as a potential.
struct Scales {
  double mu = 1.0;
  double F = 1.0;
  double f1 = 0.0;
};

/// Fields shared by every estimate of one (V, F) pair: compensators and F^{(q)}1 for the
/// tabulated levels, F1 as a potential, and int F-hat 1.
struct ScatteringProblem {
  FKContext ctx;
  std::map<double, FOneField> fields;  // F^{(q)}1 by level
  double v_l1 = 0.0;

  const StableModel& model() const { return ctx.model; }
  const FOneField& field(double q) const;
  /// int (mu V + f1 F1 + F^{(F)}1) dx.
  double total_mass(const Scales& s) const;
  /// Density of the defining measure of the scales at x.
  double measure_density(const Scales& s, const Point& x) const;
};

ScatteringProblem make_scattering_problem(const StableModel& m, const PotentialSpec& pot, const JumpFunctional& jf,
                                          double delta, std::vector<double> levels, bool with_f1_potential = false);

/// Gamma = int E_x[exp(-A_inf - sum F)] (mu V(x) + F^{(F)}1(x)) dx by importance sampling
/// from the defining measure; one path per sampled x.
ScatteringEstimate gamma_expression(const ScatteringProblem& pb, const Scales& s, const MCOptions& mc);

/// The same estimator for several scales on one shared ensemble of (x, path) pairs.
std::vector<ScatteringEstimate> gamma_expression_sweep(const ScatteringProblem& pb, const std::vector<Scales>& grid,
                                                       const MCOptions& mc);

struct TimeAveragePoint {
  double t = 0.0;
  double value = 0.0;  // (1/t) int (1 - E_x[weight up to t]) dx
  double stderr_ = 0.0;
};

struct TimeAverageResult {
  ScatteringEstimate estimate;  // extrapolated a of a + b/t
  std::vector<TimeAveragePoint> points;
  double b = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  double residual_lag1 = 0.0;
};

/// Gamma from (1/t) int (1 - E_x[...]) dx on a t grid, extrapolated by a + b/t.
/// The integral is E int (1 - w_t(x + X)) dx over paths X from the origin; shifts x are
/// drawn so that x + X visits the support ball, so no spatial truncation is needed.
/// Throws FitError when the sequence increases by more than 3 combined stderr.
TimeAverageResult gamma_time_average(const ScatteringProblem& pb, const Scales& s, const std::vector<double>& t_grid,
                                     const MCOptions& mc);

struct SweepRow {
  double x = 0.0;  // p or epsilon
  ScatteringEstimate estimate;
  double bound = 0.0;  // upper bound from the integrand <= 1
};

/// Gamma(p mu + p F) over p, with the pure potential version Gamma(p mu + p F1) as the
/// second estimate of each row when the problem carries F1 as a potential. A nonempty
/// t_grid selects the time-average route; the expression route degrades at large p, where
/// nearly all sampled weights vanish.
struct SemiclassicalTable {
  std::vector<SweepRow> rows;
  std::vector<SweepRow> pcaf_rows;
};

SemiclassicalTable semiclassical_sweep(const ScatteringProblem& pb, const std::vector<double>& p_grid,
                                       const MCOptions& mc, const std::vector<double>& t_grid = {});

/// epsilon^{-1} Gamma(eps V + eps F) over eps, with target int V + int F-hat 1.
struct SmallEpsilonTable {
  std::vector<SweepRow> rows;
  double target = 0.0;
};

SmallEpsilonTable small_epsilon_sweep(const ScatteringProblem& pb, const std::vector<double>& eps_grid,
                                      const MCOptions& mc);

/// Gamma(p mu + p F1) <= Gamma(p^k F + p mu + p F1) <= (1 + p^{k-1}) Gamma(p mu + p F1),
/// k = 1/(1+eps); needs levels containing p^k and F1 as a potential.
struct Sandwich {
  ScatteringEstimate lower, middle;
  double upper = 0.0;
  double upper_stderr = 0.0;
};

Sandwich sandwich_check(const ScatteringProblem& pb, double p, double k, const MCOptions& mc);

}  // namespace stablescat
