#include "stablescat/cell_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "detail/quad.hpp"
#include "stablescat/errors.hpp"
#include "stablescat/parallel.hpp"

namespace stablescat {

namespace {

void check_dim(int d) {
  if (d != 2 && d != 3) throw DomainError("cell integrals support d = 2 and d = 3 only");
}

/// Full n-point Gauss-Legendre nodes and weights on [0, 1].
template <int N>
std::pair<std::vector<double>, std::vector<double>> unit_gauss() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  std::vector<double> x, w;
  for (std::size_t i = 0; i < ab.size(); ++i) {
    x.push_back(0.5 + 0.5 * ab[i]);
    w.push_back(0.5 * wt[i]);
    if (ab[i] != 0.0) {
      x.push_back(0.5 - 0.5 * ab[i]);
      w.push_back(0.5 * wt[i]);
    }
  }
  return {x, w};
}

const auto& gauss8() {
  static const auto g = unit_gauss<8>();
  return g;
}
const auto& gauss4() {
  static const auto g = unit_gauss<4>();
  return g;
}

/// Tensor Gauss over the box prod [lo_i, hi_i] with `seg` equal segments per axis.
template <class F>
double box_gauss(int d, const Point& lo, const Point& hi, int seg, bool high, const F& f) {
  const auto& [gx, gw] = high ? gauss8() : gauss4();
  const int m = int(gx.size()) * seg;
  std::vector<std::vector<double>> nodes(static_cast<std::size_t>(d)), weights(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const double h = (hi[i] - lo[i]) / seg;
    for (int s = 0; s < seg; ++s)
      for (std::size_t q = 0; q < gx.size(); ++q) {
        nodes[std::size_t(i)].push_back(lo[i] + h * (s + gx[q]));
        weights[std::size_t(i)].push_back(h * gw[q]);
      }
  }
  double acc = 0.0;
  std::array<int, kMaxDim> idx{};
  long total = 1;
  for (int i = 0; i < d; ++i) total *= m;
  for (long c = 0; c < total; ++c) {
    long r = c;
    Point z{};
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      idx[std::size_t(i)] = int(r % m);
      r /= m;
      z[i] = nodes[std::size_t(i)][std::size_t(idx[std::size_t(i)])];
      w *= weights[std::size_t(i)][std::size_t(idx[std::size_t(i)])];
    }
    acc += w * f(z);
  }
  return acc;
}

/// int_a^b r^{-1-alpha} sum_m c_m r^m dr, with a = 0 allowed when c_0 = 0.
double power_poly_integral(const std::vector<double>& c, double a, double b, double alpha) {
  double s = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (c[m] == 0.0) continue;
    const double e = double(m) - alpha;
    if (std::abs(e) < 1e-12) {
      s += c[m] * std::log(b / a);
    } else {
      const double fa = a > 0.0 ? std::pow(a, e) : (e > 0.0 ? 0.0 : INFINITY);
      s += c[m] * (std::pow(b, e) - fa) / e;
    }
  }
  return s;
}

/// Multiplies the polynomial c by (p + q r).
void poly_mul(std::vector<double>& c, double p, double q) {
  c.push_back(0.0);
  for (std::size_t m = c.size() - 1; m > 0; --m) c[m] = p * c[m] + q * c[m - 1];
  c[0] *= p;
}

/// int_0^inf r^{-1-alpha} prod_i tri(r theta_i - k_i) dr with tri(t) = (1 - |t|)_+.
double radial_pair(int d, double alpha, const Point& th, const Offset& k) {
  double lo = 0.0, hi = INFINITY;
  std::vector<double> cuts;
  double constant = 1.0;
  for (int i = 0; i < d; ++i) {
    if (th[i] == 0.0) {
      constant *= std::max(0.0, 1.0 - std::abs(double(k[std::size_t(i)])));
      continue;
    }
    double a = (k[std::size_t(i)] - 1.0) / th[i], b = (k[std::size_t(i)] + 1.0) / th[i];
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    const double mid = k[std::size_t(i)] / th[i];
    if (mid > 0.0) cuts.push_back(mid);
  }
  if (constant == 0.0 || !(hi > lo)) return 0.0;
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double a = std::max(cuts[j], lo), b = std::min(cuts[j + 1], hi);
    if (!(b > a)) continue;
    const double rm = 0.5 * (a + b);
    std::vector<double> c{constant};
    for (int i = 0; i < d; ++i) {
      if (th[i] == 0.0) continue;
      const double t = rm * th[i] - k[std::size_t(i)];
      const double sg = t >= 0.0 ? 1.0 : -1.0;
      poly_mul(c, 1.0 + sg * k[std::size_t(i)], -sg * th[i]);
    }
    if (a == 0.0) c[0] = 0.0;  // a factor vanishes at r = 0
    s += power_poly_integral(c, a, b, alpha);
  }
  return s;
}

/// int_0^inf r^{-1-alpha} (1 - prod_i tri(r theta_i)) dr.
double radial_complement(int d, double alpha, const Point& th) {
  double amax = 0.0;
  std::vector<double> c{1.0};
  for (int i = 0; i < d; ++i) {
    amax = std::max(amax, std::abs(th[i]));
    poly_mul(c, 1.0, -std::abs(th[i]));
  }
  const double rs = 1.0 / amax;
  for (auto& v : c) v = -v;
  c[0] = 0.0;
  return power_poly_integral(c, 0.0, rs, alpha) + std::pow(rs, -alpha) / alpha;
}

Offset canonical(int d, Offset k) {
  for (int i = 0; i < d; ++i) k[std::size_t(i)] = std::abs(k[std::size_t(i)]);
  std::sort(k.begin(), k.begin() + d, std::greater<int>());
  return k;
}

int linf(int d, const Offset& k) {
  int m = 0;
  for (int i = 0; i < d; ++i) m = std::max(m, std::abs(k[std::size_t(i)]));
  return m;
}

}  // namespace

double sphere_integral(int d, const std::function<double(const Point&)>& f, double rel_tol) {
  check_dim(d);
  auto face = [&](int axis, double sign, double v1, double v2) {
    Point u{};
    int j = 0;
    for (int i = 0; i < d; ++i) u[i] = i == axis ? sign : (j++ == 0 ? v1 : v2);
    const double r = norm(u);
    return f((1.0 / r) * u) * std::pow(r, -d);
  };
  auto integrate_face = [&](int axis, double sign, double tol) {
    if (d == 2) return detail::adaptive_gk([&](double v) { return face(axis, sign, v, 0.0); }, -1.0, 1.0, tol).value;
    auto inner = [&](double v1) {
      return detail::adaptive_gk([&](double v2) { return face(axis, sign, v1, v2); }, -1.0, 1.0, 0.25 * tol).value;
    };
    return detail::adaptive_gk(inner, -1.0, 1.0, 0.5 * tol).value;
  };
  // a rough pass fixes the absolute tolerance
  double rough = 0.0;
  const auto rule = make_sphere_rule(d, 2, 4);
  rough = std::abs(rule.integrate(f));
  const double tol = std::max(rel_tol * rough, 1e-300) / (2.0 * d);
  double s = 0.0;
  for (int axis = 0; axis < d; ++axis)
    for (double sign : {-1.0, 1.0}) s += integrate_face(axis, sign, tol);
  return s;
}

double SphereRule::integrate(const std::function<double(const Point&)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) s += weights[i] * f(dirs[i]);
  return s;
}

SphereRule make_sphere_rule(int d, int panels, int order) {
  check_dim(d);
  const auto& [gx, gw] = order >= 8 ? gauss8() : gauss4();
  std::vector<double> x, w;
  for (int p = 0; p < panels; ++p)
    for (std::size_t q = 0; q < gx.size(); ++q) {
      x.push_back(-1.0 + 2.0 * (p + gx[q]) / panels);
      w.push_back(2.0 * gw[q] / panels);
    }
  SphereRule rule;
  for (int axis = 0; axis < d; ++axis)
    for (double sign : {-1.0, 1.0}) {
      const std::size_t n2 = d == 3 ? x.size() : 1;
      for (std::size_t a = 0; a < x.size(); ++a)
        for (std::size_t b = 0; b < n2; ++b) {
          Point u{};
          int j = 0;
          for (int i = 0; i < d; ++i) u[i] = i == axis ? sign : (j++ == 0 ? x[a] : x[b]);
          const double r = norm(u);
          rule.dirs.push_back((1.0 / r) * u);
          rule.weights.push_back(w[a] * (d == 3 ? w[b] : 1.0) * std::pow(r, -d));
        }
    }
  return rule;
}

double cell_pair_kernel(int d, double alpha, const Offset& k_in) {
  check_dim(d);
  const Offset k = canonical(d, k_in);
  const int m = linf(d, k);
  if (m == 0) throw DomainError("cell_pair_kernel: offset must be nonzero");
  if (m == 1) {
    if (!(alpha < 1.0)) throw DomainError("touching cells need alpha < 1 for the hypersingular kernel");
    static std::mutex mu;
    static std::map<std::tuple<int, double, Offset>, double> cache;
    const auto key = std::make_tuple(d, alpha, k);
    {
      std::lock_guard<std::mutex> lock(mu);
      const auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    const double v = sphere_integral(d, [&](const Point& th) { return radial_pair(d, alpha, th, k); }, 1e-9);
    std::lock_guard<std::mutex> lock(mu);
    cache[key] = v;
    return v;
  }
  // smooth integrand on [k-1, k+1]^d; split each axis at the kink of tri
  const int seg = m == 2 ? 2 : 1;
  const bool high = m <= 6;
  double s = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    Point lo{}, hi{};
    for (int i = 0; i < d; ++i) {
      const bool upper = (corner >> i) & 1;
      lo[i] = k[std::size_t(i)] + (upper ? 0.0 : -1.0);
      hi[i] = lo[i] + 1.0;
    }
    s += box_gauss(d, lo, hi, seg, high, [&](const Point& z) {
      double t = 1.0;
      for (int i = 0; i < d; ++i) t *= 1.0 - std::abs(z[i] - k[std::size_t(i)]);
      return t * std::pow(norm2(z), -0.5 * (d + alpha));
    });
  }
  return s;
}

double cell_complement_kernel(int d, double alpha) {
  check_dim(d);
  if (!(alpha < 1.0)) throw DomainError("cell_complement_kernel needs alpha < 1");
  return sphere_integral(d, [&](const Point& th) { return radial_complement(d, alpha, th); }, 1e-10);
}

double riesz_self_cell(int d, double alpha) {
  check_dim(d);
  return sphere_integral(
      d,
      [&](const Point& th) {
        double a = 0.0;
        for (int i = 0; i < d; ++i) a = std::max(a, std::abs(th[i]));
        return std::pow(0.5 / a, alpha) / alpha;
      },
      1e-11);
}

double riesz_cell(int d, double alpha, const Offset& k_in) {
  check_dim(d);
  const Offset k = canonical(d, k_in);
  const int m = linf(d, k);
  if (m == 0) return riesz_self_cell(d, alpha);
  Point lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = k[std::size_t(i)] - 0.5;
    hi[i] = k[std::size_t(i)] + 0.5;
  }
  const int seg = m == 1 ? 4 : (m == 2 ? 2 : 1);
  return box_gauss(d, lo, hi, seg, m <= 6, [&](const Point& z) { return std::pow(norm2(z), 0.5 * (alpha - d)); });
}

LatticeKernel::LatticeKernel(int d, double alpha, int n, Kind kind) : d_(d), n_(n) {
  check_dim(d);
  if (n < 1) throw DomainError("LatticeKernel: extent must be positive");
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= std::size_t(n);
  values_.assign(total, 0.0);
  // evaluate canonical (sorted) offsets once and scatter by permutation
  std::vector<Offset> canon;
  std::map<Offset, std::size_t> slot;
  for (std::size_t c = 0; c < total; ++c) {
    Offset k{};
    std::size_t r = c;
    for (int i = 0; i < d; ++i) {
      k[std::size_t(i)] = int(r % std::size_t(n));
      r /= std::size_t(n);
    }
    const Offset key = canonical(d, k);
    if (slot.emplace(key, canon.size()).second) canon.push_back(key);
  }
  std::vector<double> val(canon.size(), 0.0);
  parallel_for(canon.size(), [&](std::size_t j) {
    const Offset& k = canon[j];
    if (kind == Kind::riesz) {
      val[j] = riesz_cell(d, alpha, k);
    } else {
      val[j] = linf(d, k) == 0 ? 0.0 : cell_pair_kernel(d, alpha, k);
    }
  });
  for (std::size_t c = 0; c < total; ++c) {
    Offset k{};
    std::size_t r = c;
    for (int i = 0; i < d; ++i) {
      k[std::size_t(i)] = int(r % std::size_t(n));
      r /= std::size_t(n);
    }
    values_[c] = val[slot.at(canonical(d, k))];
  }
  if (kind == Kind::hypersingular) complement_ = cell_complement_kernel(d, alpha);
}

std::size_t LatticeKernel::index(const Offset& k) const {
  std::size_t c = 0, mul = 1;
  for (int i = 0; i < d_; ++i) {
    const int a = std::abs(k[std::size_t(i)]);
    if (a >= n_) throw DomainError("LatticeKernel: offset outside the table");
    c += std::size_t(a) * mul;
    mul *= std::size_t(n_);
  }
  return c;
}

double LatticeKernel::at(const Offset& k) const { return values_[index(k)]; }

}  // namespace stablescat
