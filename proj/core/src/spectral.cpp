#include "stablescat/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>

#include "stablescat/cell_integrals.hpp"
#include "stablescat/errors.hpp"
#include "stablescat/parallel.hpp"

namespace stablescat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// n-point Gauss-Legendre on [0, 1].
template <int N>
std::pair<std::vector<double>, std::vector<double>> unit_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  std::vector<double> x, w;
  for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
    const double a = G::abscissa()[i], b = G::weights()[i];
    x.push_back(0.5 + 0.5 * a);
    w.push_back(0.5 * b);
    if (a != 0.0) {
      x.push_back(0.5 - 0.5 * a);
      w.push_back(0.5 * b);
    }
  }
  return {x, w};
}

struct Grid {
  int d, n;
  double h;
  Point lo;  // corner of the cube

  Offset index(Eigen::Index i) const {
    Offset k{};
    for (int a = 0; a < d; ++a) {
      k[std::size_t(a)] = int(i % n);
      i /= n;
    }
    return k;
  }
  Point corner(const Offset& k) const {
    Point x = lo;
    for (int a = 0; a < d; ++a) x[a] += h * k[std::size_t(a)];
    return x;
  }
};

/// Tensor rule nodes inside the box [lo, lo + h]^d.
std::vector<std::pair<Point, double>> box_nodes(int d, const Point& lo, double h, const std::vector<double>& x,
                                                const std::vector<double>& w) {
  std::vector<std::pair<Point, double>> out;
  const std::size_t q = x.size();
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= q;
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t r = c;
    Point p = lo;
    double wt = 1.0;
    for (int a = 0; a < d; ++a) {
      p[a] += h * x[r % q];
      wt *= h * w[r % q];
      r /= q;
    }
    out.push_back({p, wt});
  }
  return out;
}

/// Ray parameters [a, b] with x + rho theta in the box [lo, lo + h]^d.
bool ray_box(int d, const Point& lo, double h, const Point& x, const Point& th, double& a, double& b) {
  a = 0.0;
  b = kInf;
  for (int i = 0; i < d; ++i) {
    const double l = lo[i], u = lo[i] + h;
    if (th[i] == 0.0) {
      if (x[i] < l || x[i] > u) return false;
      continue;
    }
    double t1 = (l - x[i]) / th[i], t2 = (u - x[i]) / th[i];
    if (t1 > t2) std::swap(t1, t2);
    a = std::max(a, t1);
    b = std::min(b, t2);
  }
  return b > a;
}

/// int_{Q_i} int_{Q_j} g(x, y) |x-y|^{-d-alpha} dy dx for touching or equal cells, with the
/// inner integral in polar coordinates about each outer node.
template <class G>
double near_pair(int d, double alpha, const Point& lo_i, const Point& lo_j, double h, double range,
                 const SphereRule& dirs, const G& g) {
  static const auto outer = unit_rule<4>();
  static const auto radial = unit_rule<8>();
  double total = 0.0;
  for (const auto& [x, wx] : box_nodes(d, lo_i, h, outer.first, outer.second)) {
    const double v = dirs.integrate([&](const Point& th) {
      double a, b;
      if (!ray_box(d, lo_j, h, x, th, a, b)) return 0.0;
      b = std::min(b, range);
      if (!(b > a)) return 0.0;
      double s = 0.0;
      if (a == 0.0) {
        // rho = b t^2 smooths the algebraic behaviour at the origin
        for (std::size_t q = 0; q < radial.first.size(); ++q) {
          const double t = radial.first[q], rho = b * t * t;
          s += radial.second[q] * g(x, x + rho * th) * std::pow(rho, -1.0 - alpha) * 2.0 * b * t;
        }
      } else {
        for (std::size_t q = 0; q < radial.first.size(); ++q) {
          const double rho = a + (b - a) * radial.first[q];
          s += radial.second[q] * (b - a) * g(x, x + rho * th) * std::pow(rho, -1.0 - alpha);
        }
      }
      return s;
    });
    total += wx * v;
  }
  return total;
}

template <class G>
double far_pair(int d, double alpha, const Point& lo_i, const Point& lo_j, double h, const G& g) {
  static const auto rule = unit_rule<4>();
  const auto xi = box_nodes(d, lo_i, h, rule.first, rule.second);
  const auto yj = box_nodes(d, lo_j, h, rule.first, rule.second);
  double s = 0.0;
  for (const auto& [x, wx] : xi)
    for (const auto& [y, wy] : yj) s += wx * wy * g(x, y) * std::pow(norm2(x - y), -0.5 * (d + alpha));
  return s;
}

/// Smallest distance between two cells of side h at integer offset k.
double cell_gap(int d, const Offset& k, double h) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    const double g = std::max(0, std::abs(k[std::size_t(a)]) - 1);
    s += g * g;
  }
  return h * std::sqrt(s);
}

/// Distance from a point to the box [lo, lo + h]^d.
double box_distance(int d, const Point& lo, double h, const Point& c) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    const double g = std::max({lo[a] - c[a], 0.0, c[a] - lo[a] - h});
    s += g * g;
  }
  return std::sqrt(s);
}

/// F_{r,xi} on the unit cube: kept when its support ball lies inside, dropped when outside.
JumpFunctional restrict_to_unit_cube(const JumpFunctional& jf, int d) {
  if (jf.is_zero()) return jf;
  const Point c = jf.support_center();
  const double rho = jf.support_radius();
  bool inside = true;
  double gap = 0.0;
  for (int a = 0; a < d; ++a) {
    inside = inside && std::abs(c[a]) + rho <= 0.5;
    const double g = std::max(0.0, std::abs(c[a]) - 0.5);
    gap += g * g;
  }
  if (inside) return jf;
  if (std::sqrt(gap) >= rho) return zero_functional();
  throw DomainError("F support ball straddles the unit cube boundary");
}

}  // namespace

Boundary parse_boundary(const std::string& s) {
  if (s == "neumann" || s == "neumann_reflected") return Boundary::neumann_reflected;
  if (s == "dirichlet") return Boundary::dirichlet;
  throw ConfigError("spectral.boundary", 0, "unknown boundary '" + s + "'");
}

Point SpectralSystem::cell_center(Eigen::Index i) const {
  const double h = cube.r / n_cells;
  Point x{};
  for (int a = 0; a < d; ++a) {
    x[a] = cube.xi[a] - 0.5 * cube.r + h * (double(i % n_cells) + 0.5);
    i /= n_cells;
  }
  return x;
}

SpectralSystem assemble(const StableModel& m, const CubeSpec& cube, const PotentialSpec& pot, const JumpFunctional& jf,
                        Boundary boundary, int n, double scale_mu, double scale_F, const AssemblyOptions& opt) {
  const int d = m.d;
  if (d != 2 && d != 3) throw DomainError("spectral assembly supports d = 2 and d = 3");
  if (!(m.alpha < 1.0)) throw DomainError("piecewise constants are conforming only for alpha < 1");
  if (n < 4) throw DomainError("assemble: need at least 4 cells per axis");
  if (!(cube.r > 0.0)) throw DomainError("assemble: cube side must be positive");
  if (scale_mu < 0.0 || scale_F < 0.0) throw DomainError("assemble: scales must be nonnegative");
  double total = 1.0;
  for (int a = 0; a < d; ++a) total *= n;
  if (total > opt.max_unknowns) throw DomainError("assemble: " + std::to_string(long(total)) + " unknowns exceed the budget");

  const Eigen::Index N = Eigen::Index(total);
  Grid grid{d, n, cube.r / n, {}};
  for (int a = 0; a < d; ++a) grid.lo[a] = cube.xi[a] - 0.5 * cube.r;
  const double h = grid.h, hd = std::pow(h, d), C = m.c_levy;
  const double ha = C * std::pow(h, d - m.alpha);

  SpectralSystem sys;
  sys.d = d;
  sys.n_cells = n;
  sys.boundary = boundary;
  sys.cube = cube;
  sys.M = Eigen::VectorXd::Constant(N, hd);
  sys.A = Eigen::MatrixXd::Zero(N, N);
  sys.H = Eigen::MatrixXd::Zero(N, N);

  const LatticeKernel W(d, m.alpha, n, LatticeKernel::Kind::hypersingular);
  parallel_for(std::size_t(N), [&](std::size_t iu) {
    const Eigen::Index i = Eigen::Index(iu);
    const Offset ki = grid.index(i);
    double row = 0.0;
    for (Eigen::Index j = 0; j < N; ++j) {
      if (j == i) continue;
      const Offset kj = grid.index(j);
      Offset k{};
      for (int a = 0; a < d; ++a) k[std::size_t(a)] = kj[std::size_t(a)] - ki[std::size_t(a)];
      const double w = ha * W.at(k);
      sys.A(i, j) = -w;
      row += w;
    }
    sys.A(i, i) = row;
    if (boundary == Boundary::dirichlet) sys.A(i, i) += ha * W.complement() - row;
  });

  if (!pot.is_zero() && scale_mu > 0.0) {
    const int s = opt.v_subcells;
    const double sub = h / s;
    long count = 1;
    for (int a = 0; a < d; ++a) count *= s;
    parallel_for(std::size_t(N), [&](std::size_t iu) {
      const Point lo = grid.corner(grid.index(Eigen::Index(iu)));
      double acc = 0.0;
      for (long q = 0; q < count; ++q) {
        long r = q;
        Point x = lo;
        for (int a = 0; a < d; ++a) {
          x[a] += sub * (double(r % s) + 0.5);
          r /= s;
        }
        acc += pot(x);
      }
      sys.H(Eigen::Index(iu), Eigen::Index(iu)) += scale_mu * acc * std::pow(sub, d);
    });
  }

  if (!jf.is_zero() && scale_F > 0.0) {
    const double range = jf.range();
    const Point fc = jf.support_center();
    const double fr = jf.support_radius();
    const double pref = opt.levy_prefactor ? C : 1.0;
    const SphereRule dirs = make_sphere_rule(d, d == 2 ? 4 : 2, 8);
    auto g = [&](const Point& x, const Point& y) { return -std::expm1(-scale_F * jf(x, y)); };
    std::vector<char> touches(std::size_t(N), 0);
    for (Eigen::Index i = 0; i < N; ++i)
      touches[std::size_t(i)] = box_distance(d, grid.corner(grid.index(i)), h, fc) < fr;
    std::vector<std::vector<std::pair<Eigen::Index, double>>> upper(static_cast<std::size_t>(N));
    parallel_for(std::size_t(N), [&](std::size_t iu) {
      const Eigen::Index i = Eigen::Index(iu);
      const Offset ki = grid.index(i);
      const Point lo_i = grid.corner(ki);
      for (Eigen::Index j = i; j < N; ++j) {
        if (!touches[iu] && !touches[std::size_t(j)]) continue;
        const Offset kj = grid.index(j);
        Offset k{};
        int linf = 0;
        for (int a = 0; a < d; ++a) {
          k[std::size_t(a)] = kj[std::size_t(a)] - ki[std::size_t(a)];
          linf = std::max(linf, std::abs(k[std::size_t(a)]));
        }
        if (cell_gap(d, k, h) >= range) continue;
        const Point lo_j = grid.corner(kj);
        double v;
        if (linf > 1)
          v = far_pair(d, m.alpha, lo_i, lo_j, h, g);
        else if (j == i)
          v = near_pair(d, m.alpha, lo_i, lo_j, h, range, dirs, g);
        else  // the polar rule is not symmetric in the two cells; average both orders
          v = 0.5 * (near_pair(d, m.alpha, lo_i, lo_j, h, range, dirs, g) +
                     near_pair(d, m.alpha, lo_j, lo_i, h, range, dirs, g));
        if (v != 0.0) upper[iu].push_back({j, pref * v});
      }
    });
    for (Eigen::Index i = 0; i < N; ++i)
      for (const auto& [j, v] : upper[std::size_t(i)]) {
        sys.H(i, j) += v;
        if (j != i) sys.H(j, i) += v;
      }
  }
  return sys;
}

double rayleigh_quotient(const SpectralSystem& sys, const Eigen::VectorXd& u) {
  const double den = u.dot(sys.M.cwiseProduct(u));
  if (!(den > 0.0)) throw DomainError("rayleigh_quotient: zero test vector");
  return u.dot((sys.A + sys.H) * u) / den;
}

EigenPair lambda1(const SpectralSystem& sys, double tol, int max_iter) {
  const Eigen::Index N = sys.size();
  if (N == 0) throw DomainError("lambda1: empty system");
  const Eigen::VectorXd s = sys.M.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd K = s.asDiagonal() * (sys.A + sys.H) * s.asDiagonal();
  EigenPair out;
  out.op_norm = K.cwiseAbs().colwise().sum().maxCoeff();
  if (out.op_norm == 0.0) {
    out.vector = sys.M.cwiseSqrt().cwiseInverse().normalized();
    return out;
  }
  // Gershgorin lower bound keeps K - sigma I positive definite
  double lower = kInf;
  for (Eigen::Index i = 0; i < N; ++i) lower = std::min(lower, 2.0 * K(i, i) - K.row(i).cwiseAbs().sum());
  const double sigma = lower - 1e-9 * out.op_norm;
  const Eigen::LDLT<Eigen::MatrixXd> solver(K - sigma * Eigen::MatrixXd::Identity(N, N));
  if (solver.info() != Eigen::Success) throw ConvergenceError("lambda1: factorization failed");

  const Eigen::Index p = std::min<Eigen::Index>(6, N);
  Eigen::MatrixXd X(N, p);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index c = 0; c < p; ++c) X(i, c) = 1.0 + std::sin(double((i + 1) * (c + 1)) * 0.7071);
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd Y = solver.solve(X);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    Y = qr.householderQ() * Eigen::MatrixXd::Identity(N, p);
    const Eigen::MatrixXd KY = K * Y;
    const Eigen::MatrixXd T = Y.transpose() * KY;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (T + T.transpose()));
    X = Y * ritz.eigenvectors();
    const Eigen::VectorXd u = X.col(0);
    const double lam = ritz.eigenvalues()(0);
    const double res = (KY * ritz.eigenvectors().col(0) - lam * u).norm() / out.op_norm;
    if (res < tol) {
      out.value = lam;
      out.residual = res;
      out.iterations = it;
      out.vector = s.asDiagonal() * u;
      return out;
    }
  }
  throw ConvergenceError("lambda1: inverse iteration did not reach the tolerance");
}

BracketTable gamma_lambda_bracket(const StableModel& m, const CubeSpec& cube, const PotentialSpec& pot,
                                  const JumpFunctional& jf, const std::vector<double>& eps_grid, int n,
                                  const MCOptions& mc, const AssemblyOptions& opt) {
  if (eps_grid.empty()) throw DomainError("bracket: empty eps grid");
  for (double e : eps_grid)
    if (!(e > 0.0)) throw DomainError("bracket: eps must be positive");
  const auto pb = make_scattering_problem(m, pot, jf, mc.delta, eps_grid);
  std::vector<Scales> scales;
  for (double e : eps_grid) scales.push_back({e, e, 0.0});
  std::vector<ScatteringEstimate> gammas;
  bool any_mass = false;
  for (const auto& s : scales) any_mass = any_mass || pb.total_mass(s) > 0.0;
  if (any_mass)
    gammas = gamma_expression_sweep(pb, scales, mc);
  else
    gammas.assign(scales.size(), ScatteringEstimate{0.0, 0.0, mc.n_paths, GammaVariant::expression, 0.0});

  BracketTable t;
  t.ratio_min = kInf;
  t.ratio_max = 0.0;
  for (std::size_t q = 0; q < eps_grid.size(); ++q) {
    const double e = eps_grid[q];
    BracketRow row;
    row.eps = e;
    row.gamma = gammas[q];
    row.lambda = lambda1(assemble(m, cube, pot, jf, Boundary::neumann_reflected, n, e, e, opt)).value;
    row.lambda_fine = lambda1(assemble(m, cube, pot, jf, Boundary::neumann_reflected, 2 * n, e, e, opt)).value;
    row.flagged = !(row.gamma.value > 0.0) || !(row.lambda > 0.0);
    if (!row.flagged) {
      row.ratio = row.lambda / row.gamma.value;
      row.refinement_change = std::abs(row.lambda_fine / row.lambda - 1.0);
      t.ratio_min = std::min(t.ratio_min, row.ratio);
      t.ratio_max = std::max(t.ratio_max, row.ratio);
      t.max_refinement_change = std::max(t.max_refinement_change, row.refinement_change);
    }
    t.rows.push_back(row);
  }
  t.decades = t.ratio_max > 0.0 ? std::log10(t.ratio_max / t.ratio_min) : kInf;
  return t;
}

ScanReport discreteness_scan(const StableModel& m, const PotentialSpec& pot, const JumpFunctional& jf, double r,
                             const std::vector<Point>& xi_grid, double c, const MCOptions& mc,
                             const std::vector<double>& t_grid) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("discreteness_scan: r must lie in (0, 1]");
  if (xi_grid.empty()) throw DomainError("discreteness_scan: empty xi grid");
  const int d = m.d;
  const Cube unit{Point{}, 1.0};
  const double ra = std::pow(r, m.alpha);
  ScanReport rep;
  for (const auto& xi : xi_grid) {
    ScanRow row;
    row.xi = xi;
    row.threshold = ra * c;
    const PotentialSpec v = pot.is_zero() ? pot : pot.transformed(r, xi, unit).scaled(ra);
    const JumpFunctional f = restrict_to_unit_cube(jf.is_zero() ? jf : jf.transformed(r, xi), d);
    const auto pb = make_scattering_problem(m, v, f, mc.delta, {1.0});
    const Scales s{1.0, 1.0, 0.0};
    if (pb.total_mass(s) > 0.0) {
      const auto est = t_grid.empty() ? gamma_expression(pb, s, mc) : gamma_time_average(pb, s, t_grid, mc).estimate;
      row.gamma = est.value;
      row.stderr_ = est.stderr_;
    }
    row.holds = row.gamma >= row.threshold;
    row.sublevel = sublevel_measure(pot, c, Cube{xi, r});
    rep.rows.push_back(row);
  }
  std::vector<std::size_t> order(rep.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return norm(rep.rows[a].xi) < norm(rep.rows[b].xi); });
  rep.empirical_R = kInf;
  for (std::size_t q = order.size(); q-- > 0;) {
    if (!rep.rows[order[q]].holds) break;
    rep.empirical_R = norm(rep.rows[order[q]].xi);
  }
  rep.criterion_holds = true;
  rep.sublevel_vanishes = true;
  for (std::size_t q = order.size() / 2; q < order.size(); ++q) {
    rep.criterion_holds = rep.criterion_holds && rep.rows[order[q]].holds;
    rep.sublevel_vanishes = rep.sublevel_vanishes && rep.rows[order[q]].sublevel == 0.0;
  }
  return rep;
}

}  // namespace stablescat
