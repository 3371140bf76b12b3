#include "stablescat/capacity.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "stablescat/cell_integrals.hpp"
#include "stablescat/errors.hpp"
#include "stablescat/parallel.hpp"
#include "stablescat/rng.hpp"
#include "stablescat/stats.hpp"

namespace stablescat {

namespace {

using Intervals = std::vector<std::pair<double, double>>;

constexpr std::uint64_t kHitTag = 0x68697473ull;

Intervals ball_ray(const Ball& b, const Point& x, const Point& th) {
  const Point e = x - b.center;
  const double p = dot(th, e), c = norm2(e) - b.radius * b.radius;
  const double disc = p * p - c;
  if (disc <= 0.0) return {};
  const double s = std::sqrt(disc);
  const double r1 = -p - s, r2 = -p + s;
  if (r2 <= 0.0) return {};
  return {{std::max(0.0, r1), r2}};
}

/// Slab intersection of the ray with the box [lo, hi].
bool box_ray(const Point& lo, const Point& hi, const Point& x, const Point& th, int d, double& a, double& b) {
  a = 0.0;
  b = INFINITY;
  for (int i = 0; i < d; ++i) {
    if (th[i] == 0.0) {
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
      continue;
    }
    double t1 = (lo[i] - x[i]) / th[i], t2 = (hi[i] - x[i]) / th[i];
    if (t1 > t2) std::swap(t1, t2);
    a = std::max(a, t1);
    b = std::min(b, t2);
  }
  return b > a;
}

struct Cell {
  Point lo{}, center{}, centroid{};
  bool full = true;
  double volume = 0.0;
  std::vector<Point> sub;  // inside sub-points of clipped cells
  Offset index{};
};

}  // namespace

bool CompactSet::contains(const Point& x) const {
  if (kind == SetKind::cube) return cube.contains(x, d);
  for (const auto& b : balls)
    if (distance(x, b.center) <= b.radius) return true;
  return false;
}

Ball CompactSet::enclosing_ball() const {
  if (kind == SetKind::cube) return {cube.center, cube.circumradius(d)};
  if (balls.size() == 1) return balls.front();
  Point c{};
  for (const auto& b : balls) c = c + (1.0 / double(balls.size())) * b.center;
  double r = 0.0;
  for (const auto& b : balls) r = std::max(r, distance(c, b.center) + b.radius);
  return {c, r};
}

std::pair<Point, Point> CompactSet::bounds() const {
  Point lo{}, hi{};
  if (kind == SetKind::cube) {
    for (int i = 0; i < d; ++i) {
      lo[i] = cube.center[i] - 0.5 * cube.side;
      hi[i] = cube.center[i] + 0.5 * cube.side;
    }
    return {lo, hi};
  }
  for (int i = 0; i < d; ++i) {
    lo[i] = INFINITY;
    hi[i] = -INFINITY;
  }
  for (const auto& b : balls)
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], b.center[i] - b.radius);
      hi[i] = std::max(hi[i], b.center[i] + b.radius);
    }
  return {lo, hi};
}

std::vector<std::pair<double, double>> CompactSet::ray(const Point& x, const Point& theta) const {
  if (kind == SetKind::cube) {
    Point lo{}, hi{};
    for (int i = 0; i < d; ++i) {
      lo[i] = cube.center[i] - 0.5 * cube.side;
      hi[i] = cube.center[i] + 0.5 * cube.side;
    }
    double a, b;
    if (!box_ray(lo, hi, x, theta, d, a, b)) return {};
    return {{a, b}};
  }
  Intervals all;
  for (const auto& b : balls) {
    const auto v = ball_ray(b, x, theta);
    all.insert(all.end(), v.begin(), v.end());
  }
  std::sort(all.begin(), all.end());
  Intervals merged;
  for (const auto& iv : all) {
    if (!merged.empty() && iv.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, iv.second);
    else
      merged.push_back(iv);
  }
  return merged;
}

CompactSet CompactSet::scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("CompactSet::scaled: factor must be positive");
  CompactSet s = *this;
  for (auto& b : s.balls) {
    b.center = c * b.center;
    b.radius *= c;
  }
  s.cube.center = c * s.cube.center;
  s.cube.side *= c;
  return s;
}

CompactSet ball_set(int d, double radius, const Point& center) {
  if (!(radius > 0.0)) throw DomainError("ball_set: radius must be positive");
  CompactSet k;
  k.kind = SetKind::ball;
  k.d = d;
  k.balls = {Ball{center, radius}};
  return k;
}

CompactSet cube_set(int d, double side, const Point& center) {
  if (!(side > 0.0)) throw DomainError("cube_set: side must be positive");
  CompactSet k;
  k.kind = SetKind::cube;
  k.d = d;
  k.cube = Cube{center, side};
  return k;
}

CompactSet union_set(int d, std::vector<Ball> balls) {
  if (balls.empty()) throw DomainError("union_set: needs at least one ball");
  for (const auto& b : balls)
    if (!(b.radius > 0.0)) throw DomainError("union_set: radii must be positive");
  CompactSet k;
  k.kind = SetKind::union_of_balls;
  k.d = d;
  k.balls = std::move(balls);
  return k;
}

CompactSet parse_compact_set(const std::string& spec, int d) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("set", 0, "set spec needs kind:parameters, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
  try {
    if (kind == "ball") return ball_set(d, std::stod(rest));
    if (kind == "cube") return cube_set(d, std::stod(rest));
    if (kind == "balls") {
      std::vector<Ball> balls;
      std::stringstream ss(rest);
      std::string item;
      while (std::getline(ss, item, ';')) {
        std::vector<double> v;
        std::stringstream is(item);
        std::string num;
        while (std::getline(is, num, ',')) v.push_back(std::stod(num));
        if (int(v.size()) != d + 1) throw ConfigError("set", 0, "each ball needs d coordinates and a radius");
        Ball b;
        for (int i = 0; i < d; ++i) b.center[i] = v[std::size_t(i)];
        b.radius = v.back();
        balls.push_back(b);
      }
      return union_set(d, balls);
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("set", 0, "bad number in set spec '" + spec + "'");
  }
  throw ConfigError("set", 0, "unknown set kind '" + kind + "'");
}

EquilibriumResult capacity_equilibrium(const StableModel& m, const CompactSet& k, int n, double tol) {
  const int d = m.d;
  if (k.d != d) throw DomainError("capacity_equilibrium: set and model dimensions differ");
  if (n < 2) throw DomainError("capacity_equilibrium: need at least 2 cells per axis");
  const auto [blo, bhi] = k.bounds();
  double side = 0.0;
  for (int i = 0; i < d; ++i) side = std::max(side, bhi[i] - blo[i]);
  const double h = side / n;
  const int s = d == 2 ? 16 : 8;  // sub-samples per axis for clipped cells
  double hd = std::pow(h, d);

  // cells meeting K
  std::vector<Cell> cells;
  long total = 1;
  for (int i = 0; i < d; ++i) total *= n;
  for (long c = 0; c < total; ++c) {
    Cell cell;
    long r = c;
    for (int i = 0; i < d; ++i) {
      cell.index[std::size_t(i)] = int(r % n);
      r /= n;
      cell.lo[i] = blo[i] + h * cell.index[std::size_t(i)];
      cell.center[i] = cell.lo[i] + 0.5 * h;
    }
    bool corners = true;
    for (int q = 0; q < (1 << d) && corners; ++q) {
      Point x = cell.lo;
      for (int i = 0; i < d; ++i) x[i] += ((q >> i) & 1) ? h : 0.0;
      corners = k.contains(x);
    }
    long subtotal = 1;
    for (int i = 0; i < d; ++i) subtotal *= s;
    std::vector<Point> inside;
    for (long q = 0; q < subtotal; ++q) {
      long rr = q;
      Point x = cell.lo;
      for (int i = 0; i < d; ++i) {
        x[i] += h * (double(rr % s) + 0.5) / s;
        rr /= s;
      }
      if (k.contains(x)) inside.push_back(x);
    }
    if (inside.empty()) continue;
    cell.full = corners && long(inside.size()) == subtotal;
    if (cell.full) {
      cell.volume = hd;
      cell.centroid = cell.center;
    } else {
      cell.volume = hd * double(inside.size()) / double(subtotal);
      Point g{};
      for (const auto& x : inside) g = g + (1.0 / double(inside.size())) * x;
      cell.centroid = g;
      cell.sub = std::move(inside);
    }
    cells.push_back(std::move(cell));
  }
  const std::size_t nc = cells.size();
  if (nc == 0) throw DegenerateMeasureError("capacity_equilibrium: no cell meets the set");

  const LatticeKernel table(d, m.alpha, n, LatticeKernel::Kind::riesz);
  const SphereRule near_rule = make_sphere_rule(d, d == 2 ? 8 : 3, 8);
  const double ex = m.alpha - d;

  // potential at x of unit mass spread uniformly on the clipped cell j
  auto kernel_avg = [&](const Point& x, const Offset& kx, bool x_centered, const Cell& cj) {
    Offset off{};
    int linf = 0;
    for (int i = 0; i < d; ++i) {
      off[std::size_t(i)] = cj.index[std::size_t(i)] - kx[std::size_t(i)];
      linf = std::max(linf, std::abs(off[std::size_t(i)]));
    }
    if (x_centered && cj.full) return m.a_riesz * std::pow(h, m.alpha) * table.at(off) / cj.volume;
    if (linf <= 1) {
      Point hi = cj.lo;
      for (int i = 0; i < d; ++i) hi[i] += h;
      const double v = near_rule.integrate([&](const Point& th) {
        double a, b;
        if (!box_ray(cj.lo, hi, x, th, d, a, b)) return 0.0;
        double acc = 0.0;
        if (cj.full) {
          acc = (std::pow(b, m.alpha) - std::pow(a, m.alpha)) / m.alpha;
        } else {
          for (const auto& iv : k.ray(x, th)) {
            const double lo = std::max(a, iv.first), up = std::min(b, iv.second);
            if (up > lo) acc += (std::pow(up, m.alpha) - std::pow(lo, m.alpha)) / m.alpha;
          }
        }
        return acc;
      });
      return m.a_riesz * v / cj.volume;
    }
    if (linf == 2) {
      double acc = 0.0;
      if (cj.full) {
        long subtotal = 1;
        for (int i = 0; i < d; ++i) subtotal *= s;
        for (long q = 0; q < subtotal; ++q) {
          long rr = q;
          Point y = cj.lo;
          for (int i = 0; i < d; ++i) {
            y[i] += h * (double(rr % s) + 0.5) / s;
            rr /= s;
          }
          acc += std::pow(norm2(x - y), 0.5 * ex);
        }
        return m.a_riesz * acc / double(subtotal);
      }
      for (const auto& y : cj.sub) acc += std::pow(norm2(x - y), 0.5 * ex);
      return m.a_riesz * acc / double(cj.sub.size());
    }
    return m.a_riesz * std::pow(norm2(x - cj.centroid), 0.5 * ex);
  };

  Eigen::MatrixXd A(nc, nc);
  parallel_for(nc, [&](std::size_t i) {
    const auto& ci = cells[i];
    for (std::size_t j = 0; j < nc; ++j) A(Eigen::Index(i), Eigen::Index(j)) = kernel_avg(ci.centroid, ci.index, ci.full, cells[j]);
  });
  const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-10);
  cg.setMaxIterations(20 * int(nc));
  cg.compute(S);
  const Eigen::VectorXd mass = cg.solve(Eigen::VectorXd::Ones(Eigen::Index(nc)));
  if (cg.info() != Eigen::Success) throw ConvergenceError("capacity_equilibrium: CG did not converge");

  EquilibriumResult res;
  res.n_cells = int(nc);
  res.cap = mass.sum();
  for (std::size_t j = 0; j < nc; ++j) {
    res.nodes.push_back(cells[j].centroid);
    res.masses.push_back(mass(Eigen::Index(j)));
    res.volumes.push_back(cells[j].volume);
  }

  // residual on a sparse subset of the doubled grid
  std::vector<std::pair<Point, Offset>> checks;
  const int n2 = 2 * n;
  long total2 = 1;
  for (int i = 0; i < d; ++i) total2 *= n2;
  const long stride = std::max<long>(1, total2 / 2000) | 1;
  for (long c = 0; c < total2; c += stride) {
    long r = c;
    Point x{};
    Offset kx{};
    for (int i = 0; i < d; ++i) {
      const int q = int(r % n2);
      r /= n2;
      x[i] = blo[i] + 0.5 * h * (q + 0.5);
      kx[std::size_t(i)] = q / 2;
    }
    if (k.contains(x)) checks.push_back({x, kx});
  }
  std::vector<double> dev(checks.size(), 0.0);
  parallel_for(checks.size(), [&](std::size_t q) {
    double u = 0.0;
    for (std::size_t j = 0; j < nc; ++j) u += mass(Eigen::Index(j)) * kernel_avg(checks[q].first, checks[q].second, false, cells[j]);
    dev[q] = std::abs(u - 1.0);
  });
  for (double v : dev) res.residual = std::max(res.residual, v);
  if (res.residual > tol)
    throw ConvergenceError("capacity_equilibrium: residual " + std::to_string(res.residual) + " exceeds tolerance");
  return res;
}

ExtrapolatedCapacity capacity_extrapolated(const StableModel& m, const CompactSet& k,
                                           const std::vector<int>& cells_per_axis, double tol) {
  if (cells_per_axis.size() < 2) throw DomainError("capacity_extrapolated: need at least two lattices");
  ExtrapolatedCapacity out;
  Eigen::MatrixXd X(Eigen::Index(cells_per_axis.size()), 2);
  Eigen::VectorXd y(X.rows());
  int finest = 0;
  for (std::size_t i = 0; i < cells_per_axis.size(); ++i) {
    const int n = cells_per_axis[i];
    out.levels.push_back(capacity_equilibrium(m, k, n, tol));
    const double h = 1.0 / n;
    X(Eigen::Index(i), 0) = 1.0;
    X(Eigen::Index(i), 1) = h;
    y(Eigen::Index(i)) = out.levels.back().cap;
    if (n > cells_per_axis[std::size_t(finest)]) finest = int(i);
  }
  const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
  out.cap = c(0);
  out.spread = std::abs(out.cap - out.levels[std::size_t(finest)].cap);
  return out;
}

HittingResult capacity_hitting_mc(const StableModel& m, const CompactSet& k, const HittingOptions& opt) {
  if (k.d != m.d) throw DomainError("capacity_hitting_mc: set and model dimensions differ");
  if (opt.n_paths < 2) throw DomainError("capacity_hitting_mc: need at least two paths");
  const int d = m.d;
  if (!(opt.enclosing_factor >= 1.0)) throw DomainError("capacity_hitting_mc: enclosing_factor must be >= 1");
  Ball b = k.enclosing_ball();
  b.radius *= opt.enclosing_factor;
  const double far = opt.far_radius > 0.0 ? opt.far_radius : 20.0 * b.radius;
  const bool balayage = opt.start == HittingStart::balayage;
  if (!balayage && !(far > norm(b.center) + b.radius)) throw DomainError("far_radius must enclose the set");
  const double exit_radius = balayage ? norm(b.center) + far : 20.0 * far;
  const double cap_b = ball_capacity(m, b.radius);
  const double block = 2.0 * mean_exit_time_ball(m, exit_radius);
  const int blocks = 14;

  SimulationOptions so;
  so.horizon = blocks * block;
  so.exit_radius = exit_radius;
  so.dt_max = opt.dt_max;
  so.truncation.delta_near = opt.delta;
  so.truncation.active = {b};
  so.full_skeleton = false;
  so.stop_set = [&k](const Point& x) { return k.contains(x); };

  Point dir = opt.direction;
  if (norm(dir) > 0.0) dir = (1.0 / norm(dir)) * dir;

  const std::size_t n = std::size_t(opt.n_paths);
  std::vector<double> hit(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(opt.seed, opt.stream_offset + i, kHitTag);
    SimulationOptions o = so;
    if (balayage) {
      const double rad = b.radius * std::sqrt(rng.beta(0.5 * d, 1.0 - 0.5 * m.alpha));
      o.start = b.center + rad * rng.unit_vector(d);
    } else {
      o.start = far * (norm(dir) > 0.0 ? dir : rng.unit_vector(d));
    }
    const auto p = simulate_path(m, opt.seed ^ kHitTag, opt.stream_offset + i, o);
    hit[i] = p.stopped ? 1.0 : 0.0;
  });
  const auto ms = mean_stderr(hit);
  // after the exit cut: P(hit) <= a dist^{alpha-d} Cap(B); after the horizon: 2^-blocks
  const double dist = exit_radius - norm(b.center) - b.radius;
  const double missed = std::min(1.0, m.a_riesz * std::pow(dist, m.alpha - d) * cap_b) + std::pow(0.5, blocks);
  HittingResult res;
  res.n_paths = opt.n_paths;
  const double scale = balayage ? cap_b : 1.0 / (m.a_riesz * std::pow(far, m.alpha - d));
  res.cap = scale * ms.mean;
  res.stderr_ = scale * ms.stderr_;
  res.bias_bound = scale * missed;
  return res;
}

}  // namespace stablescat
