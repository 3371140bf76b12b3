#pragma once

#include <string>
#include <vector>

#include "stablescat/config.hpp"

namespace stablescat {

/// Rows of one sweep, already formatted. x_col, y_col and err_col name the plotted columns.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  int x_col = 0, y_col = 1, err_col = 2;
};

struct RunResult {
  CsvTable table;
  std::string csv;  // full file contents
  std::vector<std::string> failures;  // oracle checks that did not pass

  bool ok() const { return failures.empty(); }
};

/// Executes the configured sweep.
///
/// CSV schemas (first line "# stablescat sweep=<kind> config_sha256=<hex> digest=<hex>", where
/// digest is the git blob id of everything after that line):
///   semiclassical: p, gamma, stderr, bias_bound, bound, pcaf_gamma, pcaf_stderr, psi_ratio, cap_oracle, rel_gap
///   small_eps:     eps, value, stderr, target, rel_gap
///   time_average:  label, t, value, stderr
///   bracket:       eps, gamma, gamma_stderr, lambda, lambda_fine, ratio, refinement_change, flagged
///   discreteness:  c, r, xi, gamma, stderr, threshold, holds, sublevel
///   capacity:      scale, cap_equilibrium, spread, cap_mc, mc_stderr, mc_bias, scaling_ratio
/// Oracle checks: semiclassical final row within 10% of the capacity of the support and the
/// p sequence nondecreasing within 3 sigma; small_eps rows with eps <= 1e-3 within 5% of the
/// target; time_average extrapolation within 3 combined sigma of the expression route;
/// bracket ratio within 4 decades and refinement change below 5%; discreteness verdicts of
/// the threshold and the sublevel condition agree; capacity routes within 3 sigma plus the MC
/// bias bound and dilation scaling within 0.5%.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Header line, column row and data rows.
std::string render_csv(const ExperimentConfig& cfg, const CsvTable& t);

/// Value with +-3 sigma bars against the sweep variable, log x when the grid spans a decade.
std::string render_svg(const CsvTable& t, const std::string& title);

}  // namespace stablescat
