#include "stablescat/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

#include "stablescat/errors.hpp"

namespace stablescat {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

MeanStderr mean_stderr(std::span<const double> v) {
  MeanStderr r;
  r.n = v.size();
  if (v.empty()) return r;
  r.mean = pairwise_sum(v) / double(v.size());
  if (v.size() < 2) return r;
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - r.mean) * (v[i] - r.mean);
  const double var = pairwise_sum(dev) / double(v.size() - 1);
  r.stderr_ = std::sqrt(var / double(v.size()));
  return r;
}

MeanStderr ratio_mean_stderr(std::span<const double> num, std::span<const double> den) {
  MeanStderr r;
  r.n = num.size();
  if (num.empty() || num.size() != den.size()) return r;
  const double n = double(num.size());
  const double ma = pairwise_sum(num) / n, mb = pairwise_sum(den) / n;
  if (mb == 0.0) return r;
  r.mean = ma / mb;
  std::vector<double> dev(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    const double e = num[i] - r.mean * den[i];
    dev[i] = e * e;
  }
  if (num.size() > 1) r.stderr_ = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n) / std::abs(mb);
  return r;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double dmax = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    dmax = std::max(dmax, std::abs(double(i) / na - double(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  // Stephens' small-sample correction
  const double lambda = (sq + 0.12 + 0.11 / sq) * dmax;
  return {dmax, kolmogorov_q(lambda)};
}

TestResult chi_square_homogeneity(const std::vector<std::vector<double>>& table) {
  const std::size_t r = table.size();
  if (r < 2) throw std::invalid_argument("chi_square_homogeneity: need two rows");
  const std::size_t c = table[0].size();
  std::vector<double> row(r, 0.0), col(c, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      row[i] += table[i][j];
      col[j] += table[i][j];
      total += table[i][j];
    }
  double stat = 0.0;
  int used_cols = 0;
  for (std::size_t j = 0; j < c; ++j) {
    if (col[j] <= 0.0) continue;
    ++used_cols;
    for (std::size_t i = 0; i < r; ++i) {
      const double e = row[i] * col[j] / total;
      stat += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  }
  const int dof = int(r - 1) * (used_cols - 1);
  if (dof <= 0) return {stat, 1.0};
  return {stat, boost::math::gamma_q(0.5 * dof, 0.5 * stat)};
}

InverseTFit fit_inverse_t(std::span<const double> t, std::span<const double> y, std::span<const double> sigma) {
  const std::size_t n = t.size();
  if (n < 2 || y.size() != n || sigma.size() != n) throw FitError("fit_inverse_t: need at least two points");
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 1.0 / std::max(sigma[i] * sigma[i], 1e-300);
    const double x = 1.0 / t[i];
    s += w;
    sx += w * x;
    sy += w * y[i];
    sxx += w * x * x;
    sxy += w * x * y[i];
  }
  const double det = s * sxx - sx * sx;
  if (!(det > 0.0)) throw FitError("fit_inverse_t: degenerate design");
  InverseTFit f;
  f.a = (sxx * sy - sx * sxy) / det;
  f.b = (s * sxy - sx * sy) / det;
  f.se_a = std::sqrt(sxx / det);
  f.se_b = std::sqrt(s / det);
  f.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (y[i] - f.a - f.b / t[i]) / std::max(sigma[i], 1e-300);
    f.residuals[i] = r;
    f.chi2 += r * r;
  }
  f.dof = int(n) - 2;
  return f;
}

double lag1_autocorrelation(std::span<const double> r) {
  if (r.size() < 3) return 0.0;
  double m = 0.0;
  for (double x : r) m += x;
  m /= double(r.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    den += (r[i] - m) * (r[i] - m);
    if (i + 1 < r.size()) num += (r[i] - m) * (r[i + 1] - m);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace stablescat
