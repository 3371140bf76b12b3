#pragma once

#include <cstdint>
#include <vector>

#include "stablescat/jump_functional.hpp"
#include "stablescat/model.hpp"
#include "stablescat/path.hpp"
#include "stablescat/potential.hpp"

namespace stablescat {

/// Components of the additive functional along one path and the resulting weight.
struct FKWeight {
  double a_mu = 0.0;
  double jump_sum_big = 0.0;
  double compensator_small = 0.0;
  double weight = 1.0;
};

/// Monte Carlo controls shared by the Feynman-Kac estimators.
struct MCOptions {
  int n_paths = 1000;
  double horizon = 0.0;      // <= 0: chosen from the tail bound
  double exit_radius = 0.0;  // <= 0: chosen from the tail bound
  double delta = 0.02;
  double delta_far_max = 0.5;
  double dt_max = 1e-3;
  double dt_min = 1e-7;
  std::uint64_t seed = 1;
  /// Added to the path index; equal offsets give common random numbers.
  std::uint64_t stream_offset = 0;
  double tail_target = 1e-3;
};

/// Precomputed fields for one (V, F) pair at a list of F levels q (the factor on F).
/// Small-jump compensators are tabulated at truncation delta for each level.
struct FKContext {
  StableModel model;
  PotentialSpec pot;
  JumpFunctional jf;
  double delta = 0.0;
  std::vector<double> levels;
  std::vector<CompensatorTable> compensators;
  std::vector<Ball> active;
  Interfaces interfaces;
  /// F1 = F^{(1)}1 used as an extra potential (its integral is a_f1 in PathFunctional).
  double hat_l1 = 0.0;  // int F-hat 1 dx
  bool has_f1_potential = false;
  FOneField f1_potential;

  /// Index of level q; throws DomainError if absent.
  std::size_t level_index(double q) const;
};

FKContext make_fk_context(const StableModel& m, const PotentialSpec& pot, const JumpFunctional& jf, double delta,
                          std::vector<double> levels, bool with_f1_potential = false);

/// Unit-scale summary of one path: weights at (scale_mu, levels[k]) follow as
/// exp(-scale_mu a_mu - scale_f1 a_f1 - q jump_sum - compensator[k]).
struct PathFunctional {
  double a_mu = 0.0;
  double a_f1 = 0.0;
  double jump_sum = 0.0;
  std::vector<double> compensator;
  bool exited = false;

  double weight(double scale_mu, double q, std::size_t k, double scale_f1 = 0.0) const;
};

PathFunctional evaluate_path(const FKContext& ctx, const PathLedger& p);

/// Weight components along a ledger at the given scales (tables built on the fly).
FKWeight accumulate(const StableModel& m, const PathLedger& p, const PotentialSpec& pot, const JumpFunctional& jf,
                    double scale_mu, double scale_F);
FKWeight accumulate(const FKContext& ctx, const PathLedger& p, double scale_mu, double scale_F);

/// A ball containing the supports of V and F1.
Ball support_ball(const FKContext& ctx);

/// Horizon and exit radius chosen so the neglected part of the functional stays below
/// the target, together with the bound actually achieved.
struct TailChoice {
  double horizon = 0.0;
  double exit_radius = 0.0;
  double bound = 0.0;
};

/// Bound on 1 - E[weight] contributions missed after leaving B(0, exit_radius) or after
/// the horizon, for (scale_mu V, scale_F F).
TailChoice choose_tail(const FKContext& ctx, double scale_mu, double scale_F, double target, double scale_f1 = 0.0);
double tail_bound(const FKContext& ctx, double scale_mu, double scale_F, double horizon, double exit_radius,
                  double scale_f1 = 0.0);

SimulationOptions simulation_options(const FKContext& ctx, const MCOptions& mc, const Point& start, double horizon,
                                     double exit_radius);

/// Simulates n paths from x and returns their unit-scale summaries in path order.
std::vector<PathFunctional> simulate_functionals(const FKContext& ctx, const Point& x, const MCOptions& mc,
                                                 double horizon, double exit_radius);

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double bias_bound = 0.0;
  int n = 0;
};

/// U(x) = 1 - E_x[exp(-A_inf - sum F)] for (scale_mu V, scale_F F).
Estimate capacitary_potential(const FKContext& ctx, const Point& x, double scale_mu, double scale_F,
                              const MCOptions& mc);
Estimate capacitary_potential(const StableModel& m, const PotentialSpec& pot, const JumpFunctional& jf, const Point& x,
                              const MCOptions& mc);

/// U^T(x) with horizon exactly T; exit radius infinite unless given in mc.
Estimate capacitary_potential_finite(const FKContext& ctx, const Point& x, double T, double scale_mu, double scale_F,
                                     const MCOptions& mc);

/// E_x[exp(-sum F)] two ways (V is ignored): explicit big-jump sum with small-jump
/// compensator, and 1 - E int_0^inf Z_s F^{(q)}1(X_s) ds with Z the running weight,
/// the Levy-system (Dynkin) form driven by the full F^{(q)}1 field.
struct GirsanovPair {
  Estimate explicit_form;
  Estimate compensator_form;
  double z_score = 0.0;
};

GirsanovPair girsanov_consistency(const FKContext& ctx, const FOneField& f_one, const Point& x, double q,
                                  const MCOptions& mc);

}  // namespace stablescat
