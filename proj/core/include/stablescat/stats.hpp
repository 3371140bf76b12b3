#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stablescat {

/// Pairwise (cascade) summation in index order; the result depends only on the
/// values and their order, never on how they were produced.
double pairwise_sum(std::span<const double> v);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

MeanStderr mean_stderr(std::span<const double> v);

/// Mean and stderr of a ratio estimator sum(a)/sum(b) by the delta method.
MeanStderr ratio_mean_stderr(std::span<const double> num, std::span<const double> den);

struct TestResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// Two-sample Kolmogorov-Smirnov test (asymptotic Kolmogorov distribution).
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Complementary Kolmogorov CDF Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// Chi-square homogeneity test for an r x c contingency table (rows = samples).
TestResult chi_square_homogeneity(const std::vector<std::vector<double>>& table);

/// Weighted least-squares fit y ~ a + b/t.
struct InverseTFit {
  double a = 0.0, b = 0.0;
  double se_a = 0.0, se_b = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  std::vector<double> residuals;  // standardized
};

InverseTFit fit_inverse_t(std::span<const double> t, std::span<const double> y, std::span<const double> sigma);

/// Lag-1 autocorrelation of a residual sequence (whiteness diagnostic).
double lag1_autocorrelation(std::span<const double> r);

}  // namespace stablescat
