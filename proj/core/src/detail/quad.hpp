#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <vector>

namespace stablescat::detail {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Globally adaptive Gauss-Kronrod (15/31): bisects the interval with the largest error
/// until the summed error is below max(abs_tol, rel_floor * |value|) or the
/// subdivision budget is spent.
template <class F>
QuadResult adaptive_gk(const F& f, double a, double b, double abs_tol, int max_intervals = 2000,
                       double rel_floor = 1e-14) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Piece {
    double a, b, v, e;
    bool operator<(const Piece& o) const { return e < o.e; }
  };
  auto eval = [&](double lo, double hi) {
    double err = 0.0;
    const double v = GK::integrate(f, lo, hi, 0, 0.0, &err);
    // the non-recursive rule reports its error on [-1, 1]
    return Piece{lo, hi, v, err * 0.5 * (hi - lo)};
  };
  std::priority_queue<Piece> heap;
  Piece first = eval(a, b);
  double value = first.v, error = first.e;
  heap.push(first);
  int count = 1;
  while (error > std::max(abs_tol, rel_floor * std::abs(value)) && count < max_intervals) {
    const Piece p = heap.top();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;
    heap.pop();
    const Piece l = eval(p.a, mid), r = eval(mid, p.b);
    value += l.v + r.v - p.v;
    error += l.e + r.e - p.e;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  // re-sum to shed accumulated cancellation in the running totals
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().v;
    e += heap.top().e;
    heap.pop();
  }
  return {v, e};
}

/// Fixed n-point Gauss-Legendre rule on [a,b].
template <int N, class F>
double gauss(const F& f, double a, double b) {
  return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

}  // namespace stablescat::detail
