#include "stablescat/measure_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "stablescat/errors.hpp"

namespace stablescat {

namespace {

Point uniform_in_ball(Rng& rng, int d, const Point& c, double r) {
  const double rho = r * std::pow(rng.uniform(), 1.0 / d);
  return c + rho * rng.unit_vector(d);
}

Point uniform_in_cube(Rng& rng, int d, const Point& c, double half) {
  Point x = c;
  for (int i = 0; i < d; ++i) x[i] += half * (2.0 * rng.uniform() - 1.0);
  return x;
}

}  // namespace

MeasureSampler::MeasureSampler(const PotentialSpec& v, double mass_v, const FOneField* f, double mass_f, int cells) {
  if (mass_v < 0.0 || mass_f < 0.0) throw DomainError("mixture weights must be nonnegative");
  d_ = v.d;
  if (v.is_zero()) mass_v = 0.0;
  if (f == nullptr || f->jf.is_zero() || f->table.empty() || !(f->l1_norm > 0.0)) mass_f = 0.0;
  const double total = mass_v + mass_f;
  if (!(total > 0.0)) throw DegenerateMeasureError("sampling measure has zero mass");
  pi_v_ = mass_v / total;
  pi_f_ = mass_f / total;

  if (pi_v_ > 0.0) {
    if (!std::isfinite(v.support_radius())) throw DomainError("potential support is unbounded");
    v_ = v;
    v_norm_ = v.l1_norm();
    v_uniform_ = !std::isfinite(v_norm_) || !std::isfinite(v.sup());
    const bool quad_window = v.windowed && v.kind == PotentialKind::quadratic;
    // sample from the smaller of window cube and support ball; both contain the support
    v_cube_ = v.windowed &&
              (quad_window || v.window.volume(d_) < ball_volume(d_) * std::pow(v.radius / v.scale, d_));
    if (v_cube_) {
      v_center_ = v.window.center;
      v_radius_ = 0.5 * v.window.side;
      v_region_volume_ = v.window.volume(d_);
    } else {
      v_center_ = (-1.0 / v.scale) * v.shift;
      v_radius_ = v.radius / v.scale;
      v_region_volume_ = ball_volume(d_) * std::pow(v_radius_, d_);
    }
  }

  if (pi_f_ > 0.0) {
    jf_ = f->jf;
    const int d = d_;
    const double top = jf_.outer_radius();
    // cells aligned with the table breakpoints so the fit never straddles a jump
    std::vector<double> cuts{0.0};
    const double mid = std::abs(jf_.R - jf_.Rp);
    if (mid > 0.0 && mid < jf_.R) cuts.push_back(mid);
    cuts.push_back(jf_.R);
    cuts.push_back(top);
    const int per = std::max(1, cells / int(cuts.size() - 1));
    edges_.push_back(0.0);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
      for (int i = 1; i <= per; ++i) edges_.push_back(cuts[s] + (cuts[s + 1] - cuts[s]) * double(i) / per);
    const std::size_t nc = edges_.size() - 1;
    std::vector<double> mass(nc);
    cell_density_.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
      const double lo = edges_[c], hi = edges_[c + 1];
      const double u = 0.5 * (lo + hi);
      const double h = std::max(0.0, f->table.at(u));
      const double shell = ball_volume(d) * (std::pow(hi, d) - std::pow(lo, d));
      mass[c] = h * shell;
      cell_density_[c] = h;
    }
    double acc = 0.0;
    cdf_.assign(nc + 1, 0.0);
    for (std::size_t c = 0; c < nc; ++c) cdf_[c + 1] = (acc += mass[c]);
    if (!(acc > 0.0)) throw DegenerateMeasureError("F1 field has zero mass");
    for (auto& x : cdf_) x /= acc;
    for (auto& x : cell_density_) x /= acc;
  }
}

Point MeasureSampler::sample(Rng& rng) const {
  const double pick = rng.uniform();
  if (pick < pi_v_) {
    for (int tries = 0; tries < 1000000; ++tries) {
      const Point x = v_cube_ ? uniform_in_cube(rng, d_, v_center_, v_radius_)
                              : uniform_in_ball(rng, d_, v_center_, v_radius_);
      if (v_uniform_) return x;
      if (rng.uniform() * v_.sup() < v_(x)) return x;
    }
    throw DegenerateMeasureError("rejection sampler for V made no progress");
  }
  const double w = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), w);
  const std::size_t c = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - cdf_.begin() - 1, 0), cdf_.size() - 2);
  const double lo = edges_[c], hi = edges_[c + 1];
  const double lo_d = std::pow(lo, d_), hi_d = std::pow(hi, d_);
  const double u = std::pow(lo_d + rng.uniform() * (hi_d - lo_d), 1.0 / d_);
  const Point xp = u * rng.unit_vector(d_);
  return (1.0 / jf_.scale) * (xp - jf_.shift);
}

double MeasureSampler::density(const Point& x) const {
  double q = 0.0;
  if (pi_v_ > 0.0) {
    if (v_uniform_) {
      const bool inside = v_cube_ ? Cube{v_center_, 2.0 * v_radius_}.contains(x, d_)
                                  : distance(x, v_center_) < v_radius_;
      if (inside) q += pi_v_ / v_region_volume_;
    } else {
      q += pi_v_ * v_(x) / v_norm_;
    }
  }
  if (pi_f_ > 0.0) {
    const double u = jf_.transformed_radius(x);
    if (u < edges_.back()) {
      const auto it = std::upper_bound(edges_.begin(), edges_.end(), u);
      const std::size_t c = std::size_t(std::max<std::ptrdiff_t>(it - edges_.begin() - 1, 0));
      q += pi_f_ * cell_density_[std::min(c, cell_density_.size() - 1)] * std::pow(jf_.scale, d_);
    }
  }
  return q;
}

}  // namespace stablescat
