#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stablescat {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  double seconds = 0.0;

  bool passed() const;
};

struct SelftestOptions {
  std::uint64_t seed = 1;
  /// Multiplies the jump-kernel constant of every model; anything but 1 is a fault to be caught.
  double c_levy_factor = 1.0;
  double budget_seconds = 300.0;
};

/// Density against the closed-form Cauchy kernel, the small-time tail against c_levy,
/// the Riesz constant, Poisson jump counts, path marginals against the exact sampler,
/// the two forms of E exp(-sum F), monotonicity in V under common random numbers,
/// capacity dilation and the spectral rescaling identity; the last check is the wall-clock
/// budget.
SelftestReport run_selftest(const SelftestOptions& opt = {});

}  // namespace stablescat
