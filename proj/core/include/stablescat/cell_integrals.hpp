#pragma once

#include <array>
#include <functional>
#include <vector>

#include "stablescat/model.hpp"

namespace stablescat {

using Offset = std::array<int, kMaxDim>;

/// Integral of f over the unit sphere S^{d-1}, d in {2, 3}: the sphere is parametrized by
/// the faces of [-1,1]^d and each face is integrated by adaptive Gauss-Kronrod.
double sphere_integral(int d, const std::function<double(const Point&)>& f, double rel_tol = 1e-9);

/// Fixed direction rule on S^{d-1} (composite Gauss on the cube faces); for integrands
/// evaluated many times where a few digits suffice.
struct SphereRule {
  std::vector<Point> dirs;
  std::vector<double> weights;

  double integrate(const std::function<double(const Point&)>& f) const;
};

SphereRule make_sphere_rule(int d, int panels = 4, int order = 8);

/// W(k) = int_{Q_0} int_{Q_k} |x-y|^{-d-alpha} dy dx for unit cells offset by k != 0.
/// Touching cells need alpha < 1. At side h the value is h^{d-alpha} W(k).
double cell_pair_kernel(int d, double alpha, const Offset& k);

/// int_Q int_{R^d \ Q} |x-y|^{-d-alpha} dy dx for the unit cube (alpha < 1).
double cell_complement_kernel(int d, double alpha);

/// int_Q |c - y|^{alpha-d} dy for the unit cube Q centered at c.
double riesz_self_cell(int d, double alpha);

/// R(k) = int_{Q_k} |y|^{alpha-d} dy for the unit cell centered at k; R(0) is the self term.
/// At side h the value is h^alpha R(k).
double riesz_cell(int d, double alpha, const Offset& k);

/// Lookup tables of W and R over offsets with |k_i| < n, stored by |k_i|.
class LatticeKernel {
 public:
  enum class Kind { hypersingular, riesz };
  LatticeKernel(int d, double alpha, int n, Kind kind);

  double at(const Offset& k) const;
  int extent() const { return n_; }
  /// Sum of W over all k != 0 in Z^d (hypersingular tables only).
  double complement() const { return complement_; }

 private:
  int d_, n_;
  std::vector<double> values_;
  double complement_ = 0.0;
  std::size_t index(const Offset& k) const;
};

}  // namespace stablescat
