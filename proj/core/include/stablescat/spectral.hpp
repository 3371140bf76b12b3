#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stablescat/jump_functional.hpp"
#include "stablescat/potential.hpp"
#include "stablescat/scattering.hpp"

namespace stablescat {

/// The cube D_{r,xi} of side r centered at xi.
struct CubeSpec {
  double r = 1.0;
  Point xi{};

  Cube cube() const { return Cube{xi, r}; }
};

enum class Boundary { neumann_reflected, dirichlet };

Boundary parse_boundary(const std::string& s);

struct AssemblyOptions {
  /// Multiply the jump perturbation by c_levy; off reproduces the form with a bare kernel.
  bool levy_prefactor = false;
  int max_unknowns = 4096;  // dense matrices
  int v_subcells = 8;  // midpoint sub-cells per axis for the V cell integrals
};

/// Piecewise-constant Galerkin system on an n^d grid of D_{r,xi}:
///   A: (C/2) int_D int_D (f(x) - f(y))^2 |x-y|^{-d-alpha}, plus C int_D f^2 kappa_D for dirichlet
///   H: int_D f^2 mu V + int_D int_D f(x) f(y) (1 - e^{-s F(x,y)}) |x-y|^{-d-alpha}
///   M: cell volumes.
/// Touching cells are integrated exactly by polar reduction, so alpha < 1 is required.
struct SpectralSystem {
  int d = 2;
  int n_cells = 0;
  Boundary boundary = Boundary::neumann_reflected;
  CubeSpec cube;
  Eigen::MatrixXd A, H;
  Eigen::VectorXd M;  // diagonal of the mass matrix

  Eigen::Index size() const { return M.size(); }
  Point cell_center(Eigen::Index i) const;
};

SpectralSystem assemble(const StableModel& m, const CubeSpec& cube, const PotentialSpec& pot, const JumpFunctional& jf,
                        Boundary boundary, int n_cells, double scale_mu = 1.0, double scale_F = 1.0,
                        const AssemblyOptions& opt = {});

struct EigenPair {
  double value = 0.0;
  /// ||(K - lambda M) u||_{M^-1} / (||K||_1-norm of M^{-1/2} K M^{-1/2}) with ||u||_M = 1.
  double residual = 0.0;
  double op_norm = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;
};

/// Smallest eigenvalue of (A + H) u = lambda M u by shifted inverse iteration.
/// Throws ConvergenceError when the residual stays above tol after max_iter steps.
EigenPair lambda1(const SpectralSystem& sys, double tol = 1e-10, int max_iter = 20000);

/// u^T (A + H) u / u^T M u.
double rayleigh_quotient(const SpectralSystem& sys, const Eigen::VectorXd& u);

struct BracketRow {
  double eps = 0.0;
  ScatteringEstimate gamma;
  double lambda = 0.0;
  double lambda_fine = 0.0;  // on the refined grid
  double ratio = 0.0;        // lambda / gamma
  double refinement_change = 0.0;
  bool flagged = false;  // gamma or lambda zero: ratio undefined
};

struct BracketTable {
  std::vector<BracketRow> rows;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  /// log10(ratio_max / ratio_min) over unflagged rows.
  double decades = 0.0;
  double max_refinement_change = 0.0;
};

/// lambda_1^N(eps V + eps F) on the cube against Gamma(eps V + eps F) over eps; the
/// refinement column repeats lambda on a 2n grid.
BracketTable gamma_lambda_bracket(const StableModel& m, const CubeSpec& cube, const PotentialSpec& pot,
                                  const JumpFunctional& jf, const std::vector<double>& eps_grid, int n_cells,
                                  const MCOptions& mc, const AssemblyOptions& opt = {});

struct ScanRow {
  Point xi{};
  double gamma = 0.0;
  double stderr_ = 0.0;
  double threshold = 0.0;  // r^alpha c
  bool holds = false;
  double sublevel = 0.0;  // |{V <= c} cap D_{r,xi}|
};

struct ScanReport {
  std::vector<ScanRow> rows;
  /// Smallest |xi| in the grid beyond which the threshold holds on every tested cube;
  /// infinity when it fails on the outermost cube.
  double empirical_R = 0.0;
  bool criterion_holds = false;  // holds on the outer half of the grid
  bool sublevel_vanishes = false;  // sublevel measure zero on the outer half of the grid
};

/// Gamma(r^alpha V_{r,xi} + F_{r,xi}) for xi in the grid, with V_{r,xi} and F_{r,xi}
/// restricted to the unit cube. F_{r,xi} must have its support ball inside or outside the
/// unit cube in rescaled coordinates. Gamma comes from the time-average route on t_grid,
/// or from the expression route when t_grid is empty; the expression variance grows with
/// the size of the potential, the time average stays bounded.
ScanReport discreteness_scan(const StableModel& m, const PotentialSpec& pot, const JumpFunctional& jf, double r,
                             const std::vector<Point>& xi_grid, double c, const MCOptions& mc,
                             const std::vector<double>& t_grid = {2.0, 4.0, 8.0, 16.0});

}  // namespace stablescat
