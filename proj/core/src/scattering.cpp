#include "stablescat/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stablescat/errors.hpp"
#include "stablescat/parallel.hpp"
#include "stablescat/stats.hpp"

namespace stablescat {

namespace {

constexpr std::uint64_t kSampleTag = 0x73616d70ull;
constexpr std::uint64_t kTimeTag = 0x74617667ull;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kShiftsPerPath = 4;
constexpr std::uint64_t kMassTag = 0x6d617373ull;
constexpr std::size_t kPathsPerStratum = 50;
constexpr std::size_t kMaxStrata = 48;
constexpr std::size_t kMassDraws = 400000;
constexpr double kDefensive = 0.2;

bool uses_f(const Scales& s) { return s.F > 0.0; }

/// Drops the F scales when there is no functional, so no level lookup is attempted.
Scales effective(const ScatteringProblem& pb, Scales s) {
  if (pb.ctx.jf.is_zero()) s.F = s.f1 = 0.0;
  return s;
}

/// Shift proposal for one path X from the origin: x = c - z + rho U with U uniform in the
/// unit ball and z a skeleton point (chosen by trapezoid time weight) or a jump pre-point,
/// so that x + X visits B(c, rho) wherever the shifted functional can be nonzero.
struct ShiftProposal {
  int d = 3;
  Point c{};
  double rho = 1.0;
  std::vector<Point> anchors;
  std::vector<double> cdf;
  std::vector<double> prob;

  ShiftProposal(const PathLedger& p, const Ball& s, double jump_share) : d(p.d), c(s.center), rho(s.radius) {
    const std::size_t n = p.times.size();
    std::vector<double> w;
    double tw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = i > 0 ? p.times[i] - p.times[i - 1] : 0.0;
      const double hi = i + 1 < n ? p.times[i + 1] - p.times[i] : 0.0;
      anchors.push_back(p.positions[i]);
      w.push_back(0.5 * (lo + hi));
      tw += w.back();
    }
    const double share = p.jumps.empty() ? 0.0 : jump_share;
    for (auto& v : w) v *= (1.0 - share) / tw;
    for (const auto& j : p.jumps) {
      anchors.push_back(j.pre);
      w.push_back(share / double(p.jumps.size()));
    }
    prob = w;
    double acc = 0.0;
    for (double v : w) cdf.push_back(acc += v);
  }

  Point sample(Rng& rng) const {
    const double u = rng.uniform() * cdf.back();
    const std::size_t j = std::size_t(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const double r = rho * std::pow(rng.uniform(), 1.0 / d);
    return c - anchors[std::min(j, anchors.size() - 1)] + r * rng.unit_vector(d);
  }

  double density(const Point& x) const {
    const double r2 = rho * rho;
    double acc = 0.0;
    for (std::size_t j = 0; j < anchors.size(); ++j) {
      double q = 0.0;
      for (int i = 0; i < d; ++i) {
        const double e = x[i] + anchors[j][i] - c[i];
        q += e * e;
      }
      if (q < r2) acc += prob[j];
    }
    return acc / (ball_volume(d) * std::pow(rho, d));
  }
};

PathLedger shifted(PathLedger p, const Point& x) {
  for (auto& y : p.positions) y = y + x;
  for (auto& j : p.jumps) {
    j.pre = j.pre + x;
    j.post = j.post + x;
  }
  return p;
}

double numeric_l1(const PotentialSpec& v) {
  // midpoint rule on the bounding cube of the support ball; only used for mixture weights
  const double r = v.support_radius();
  const Point c = v.support_center();
  const int n = v.d == 2 ? 400 : 80;
  const double h = 2.0 * r / n;
  long total = 1;
  for (int i = 0; i < v.d; ++i) total *= n;
  double s = 0.0;
  for (long k = 0; k < total; ++k) {
    Point x = c;
    long q = k;
    for (int i = 0; i < v.d; ++i) {
      x[i] += -r + h * (double(q % n) + 0.5);
      q /= n;
    }
    s += v(x);
  }
  return s * std::pow(h, v.d);
}

}  // namespace

const FOneField& ScatteringProblem::field(double q) const {
  const auto it = fields.find(q);
  if (it == fields.end()) throw DomainError("F^(q)1 field not tabulated for this level");
  return it->second;
}

double ScatteringProblem::total_mass(const Scales& s) const {
  double z = s.mu * v_l1;
  if (s.f1 > 0.0 && ctx.has_f1_potential) z += s.f1 * ctx.f1_potential.l1_norm;
  if (uses_f(s) && !ctx.jf.is_zero()) z += field(s.F).l1_norm;
  return z;
}

double ScatteringProblem::measure_density(const Scales& s, const Point& x) const {
  double g = s.mu > 0.0 ? s.mu * ctx.pot(x) : 0.0;
  if (s.f1 > 0.0 && ctx.has_f1_potential) g += s.f1 * ctx.f1_potential(x);
  if (uses_f(s) && !ctx.jf.is_zero()) g += field(s.F)(x);
  return g;
}

ScatteringProblem make_scattering_problem(const StableModel& m, const PotentialSpec& pot, const JumpFunctional& jf,
                                          double delta, std::vector<double> levels, bool with_f1_potential) {
  ScatteringProblem pb;
  if (!jf.is_zero() && std::find(levels.begin(), levels.end(), 1.0) == levels.end()) levels.push_back(1.0);
  if (jf.is_zero()) levels.clear();
  pb.ctx = make_fk_context(m, pot, jf, delta, levels, with_f1_potential);
  std::vector<FOneField> built(pb.ctx.levels.size());
  parallel_for(built.size(), [&](std::size_t k) { built[k] = make_f_one_field(m, jf, pb.ctx.levels[k]); });
  for (std::size_t k = 0; k < built.size(); ++k) pb.fields.emplace(pb.ctx.levels[k], std::move(built[k]));
  if (!pot.is_zero()) {
    pb.v_l1 = pot.l1_norm();
    if (!std::isfinite(pb.v_l1)) pb.v_l1 = numeric_l1(pot);
  }
  return pb;
}

std::vector<ScatteringEstimate> gamma_expression_sweep(const ScatteringProblem& pb, const std::vector<Scales>& scales,
                                                       const MCOptions& mc) {
  if (scales.empty()) throw DomainError("empty scale grid");
  std::vector<Scales> grid;
  for (const auto& s : scales) grid.push_back(effective(pb, s));
  std::vector<ScatteringEstimate> out(grid.size());
  // proposal: average normalized masses over the grid; F shape from the middle level
  double wv = 0.0, wf = 0.0;
  std::vector<double> f_levels;
  Scales top{0.0, 0.0, 0.0};
  for (const auto& s : grid) {
    if (s.mu < 0.0 || s.F < 0.0 || s.f1 < 0.0) throw DomainError("scales must be nonnegative");
    const double z = pb.total_mass(s);
    top.mu = std::max(top.mu, s.mu);
    top.F = std::max(top.F, s.F);
    top.f1 = std::max(top.f1, s.f1);
    if (!(z > 0.0)) continue;
    wv += s.mu * pb.v_l1 / z;
    wf += (z - s.mu * pb.v_l1) / z;
    if (uses_f(s)) f_levels.push_back(s.F);
  }
  if (!(wv + wf > 0.0)) {
    for (auto& e : out) e.n_paths = mc.n_paths;
    return out;  // every scale has a zero measure: Gamma = 0
  }
  double ref = 1.0;
  if (!f_levels.empty()) {
    std::sort(f_levels.begin(), f_levels.end());
    ref = f_levels[f_levels.size() / 2];
  }
  const FOneField* shape = pb.ctx.jf.is_zero() ? nullptr : &pb.field(ref);
  const MeasureSampler sampler(pb.ctx.pot, wv, shape, shape ? wf : 0.0);

  auto tail = choose_tail(pb.ctx, top.mu, top.F, mc.tail_target, top.f1);
  if (mc.exit_radius > 0.0) tail.exit_radius = mc.exit_radius;
  // the horizon part is charged against Z, so it gets Z / Cap more blocks
  const double block = 2.0 * mean_exit_time_ball(pb.model(), tail.exit_radius);
  const double cap = ball_capacity(pb.model(), support_ball(pb.ctx).radius);
  const double zmax = pb.total_mass(top);
  tail.horizon = block * std::ceil(std::log2(std::max(1.0, zmax / cap) / mc.tail_target));
  if (mc.horizon > 0.0) tail.horizon = mc.horizon;
  const auto bias_of = [&](const Scales& s, double value) {
    const double exit_part = tail_bound(pb.ctx, s.mu, s.F, kInf, tail.exit_radius, s.f1);
    const double time_part = std::pow(0.5, std::floor(tail.horizon / block));
    return value * exit_part + std::min(value, pb.total_mass(s) * time_part);
  };

  const std::size_t n = std::size_t(mc.n_paths), ns = grid.size();
  std::vector<std::size_t> level_of(ns, 0);
  for (std::size_t j = 0; j < ns; ++j)
    if (uses_f(grid[j])) level_of[j] = pb.ctx.level_index(grid[j].F);

  // radial strata around the support ball, equal volume in |x - c|^d
  const Ball sb = support_ball(pb.ctx);
  const int d = pb.model().d;
  const std::size_t nb = std::clamp<std::size_t>(n / kPathsPerStratum, 1, kMaxStrata);
  const auto stratum = [&](const Point& x) {
    const double u = std::min(1.0, std::pow(distance(x, sb.center) / sb.radius, d));
    return std::min(nb - 1, std::size_t(u * double(nb)));
  };
  // stratum probabilities under the proposal from cheap draws (no paths)
  const std::size_t n_mass = std::max<std::size_t>(kMassDraws, 40 * n);
  std::vector<double> prob(nb, 0.0);
  {
    const std::size_t chunks = 64;
    std::vector<std::vector<double>> cnt(chunks, std::vector<double>(nb, 0.0));
    parallel_for(chunks, [&](std::size_t c) {
      Rng rng(mc.seed, mc.stream_offset + c, kMassTag);
      for (std::size_t i = c; i < n_mass; i += chunks) cnt[c][stratum(sampler.sample(rng))] += 1.0;
    });
    for (const auto& c : cnt)
      for (std::size_t b = 0; b < nb; ++b) prob[b] += c[b] / double(n_mass);
  }

  // one (x, path) pair; x drawn from the proposal, restricted to a stratum when target < nb
  std::vector<std::size_t> bin(n, 0);
  std::vector<double> vals(n * ns, 0.0);
  const auto run = [&](std::size_t i, std::size_t target) {
    Rng rng(mc.seed, mc.stream_offset + i, kSampleTag);
    Point x = sampler.sample(rng);
    while (target < nb && stratum(x) != target) x = sampler.sample(rng);
    bin[i] = stratum(x);
    const double q = sampler.density(x);
    const auto opt = simulation_options(pb.ctx, mc, x, tail.horizon, tail.exit_radius);
    const auto pf = evaluate_path(pb.ctx, simulate_path(pb.ctx.model, mc.seed, mc.stream_offset + i, opt));
    for (std::size_t j = 0; j < ns; ++j) {
      const auto& s = grid[j];
      const double g = pb.measure_density(s, x);
      vals[j * n + i] = g > 0.0 ? g / q * pf.weight(s.mu, s.F, level_of[j], s.f1) : 0.0;
    }
  };

  // pilot from the plain proposal, then Neyman allocation averaged over the scales
  const std::size_t n_pilot = nb == 1 ? n : std::max<std::size_t>(n / 4, 2 * nb);
  parallel_for(n_pilot, [&](std::size_t i) { run(i, nb); });
  std::vector<std::size_t> targets;
  if (n_pilot < n) {
    std::vector<double> alloc(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) alloc[b] = kDefensive * prob[b];
    for (std::size_t j = 0; j < ns; ++j) {
      std::vector<double> sum(nb, 0.0), sq(nb, 0.0), cnt(nb, 0.0);
      for (std::size_t i = 0; i < n_pilot; ++i) {
        const double v = vals[j * n + i];
        sum[bin[i]] += v;
        sq[bin[i]] += v * v;
        cnt[bin[i]] += 1.0;
      }
      std::vector<double> a(nb, 0.0);
      double tot = 0.0;
      for (std::size_t b = 0; b < nb; ++b) {
        if (cnt[b] < 2.0) continue;
        const double m = sum[b] / cnt[b];
        a[b] = prob[b] * std::sqrt(std::max(0.0, sq[b] / cnt[b] - m * m));
        tot += a[b];
      }
      if (tot > 0.0)
        for (std::size_t b = 0; b < nb; ++b) alloc[b] += (1.0 - kDefensive) * a[b] / tot / double(ns);
    }
    double at = 0.0;
    for (double a : alloc) at += a;
    const std::size_t n2 = n - n_pilot;
    for (std::size_t b = 0; b < nb; ++b) {
      if (prob[b] == 0.0) continue;
      const auto k = std::size_t(std::llround(alloc[b] / at * double(n2)));
      targets.insert(targets.end(), k, b);
    }
    targets.resize(n2, std::size_t(std::max_element(alloc.begin(), alloc.end()) - alloc.begin()));
    parallel_for(n2, [&](std::size_t i) { run(n_pilot + i, targets[i]); });
  }

  for (std::size_t j = 0; j < ns; ++j) {
    const auto& s = grid[j];
    std::vector<double> sum(nb, 0.0), sq(nb, 0.0), cnt(nb, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = vals[j * n + i];
      sum[bin[i]] += v;
      sq[bin[i]] += v * v;
      cnt[bin[i]] += 1.0;
    }
    double value = 0.0, var = 0.0, second = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      if (cnt[b] == 0.0) continue;
      const double m = sum[b] / cnt[b];
      value += prob[b] * m;
      second += prob[b] * m * m;
      if (cnt[b] > 1.0) var += prob[b] * prob[b] * (sq[b] - cnt[b] * m * m) / (cnt[b] - 1.0) / cnt[b];
    }
    // uncertainty of the stratum probabilities (multinomial)
    if (nb > 1) var += std::max(0.0, second - value * value) / double(n_mass);
    ScatteringEstimate e;
    e.value = value;
    e.stderr_ = std::sqrt(std::max(0.0, var));
    e.n_paths = int(n);
    e.variant = GammaVariant::expression;
    e.bias_bound = bias_of(s, value);
    out[j] = e;
  }
  return out;
}

ScatteringEstimate gamma_expression(const ScatteringProblem& pb, const Scales& s, const MCOptions& mc) {
  if (!(pb.total_mass(s) > 0.0)) {
    const bool zero_everything = (pb.ctx.pot.is_zero() || s.mu == 0.0) && (pb.ctx.jf.is_zero() || (s.F == 0.0 && s.f1 == 0.0));
    if (zero_everything) return {0.0, 0.0, mc.n_paths, GammaVariant::expression, 0.0};
    throw DegenerateMeasureError("defining measure has zero mass");
  }
  return gamma_expression_sweep(pb, {s}, mc).front();
}

TimeAverageResult gamma_time_average(const ScatteringProblem& pb, const Scales& scales,
                                     const std::vector<double>& t_grid, const MCOptions& mc) {
  const Scales s = effective(pb, scales);
  if (t_grid.empty()) throw DomainError("empty t grid");
  for (std::size_t j = 0; j + 1 < t_grid.size(); ++j)
    if (!(t_grid[j + 1] > t_grid[j])) throw DomainError("t grid must be increasing");
  if (!(t_grid.front() > 0.0)) throw DomainError("t grid must be positive");
  TimeAverageResult res;
  res.estimate.variant = GammaVariant::time_average;
  const bool trivial = (pb.ctx.pot.is_zero() || s.mu == 0.0) && (pb.ctx.jf.is_zero() || (s.F == 0.0 && s.f1 == 0.0));
  if (trivial) {
    for (double t : t_grid) res.points.push_back({t, 0.0, 0.0});
    res.estimate.n_paths = mc.n_paths * int(t_grid.size());
    return res;
  }
  const auto& m = pb.model();
  const Ball sb = support_ball(pb.ctx);
  const std::size_t n = std::size_t(mc.n_paths);
  const std::size_t k = uses_f(s) ? pb.ctx.level_index(s.F) : 0;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const double t = t_grid[j];
    SimulationOptions opt;
    opt.horizon = t;
    opt.exit_radius = kInf;
    opt.dt_max = mc.dt_max;
    opt.truncation.delta_near = pb.ctx.delta;
    opt.full_skeleton = true;
    std::vector<double> v(n);
    const std::uint64_t base = mc.stream_offset + j * n;
    parallel_for(n, [&](std::size_t i) {
      const auto path = simulate_path(m, mc.seed ^ kTimeTag, base + i, opt);
      const ShiftProposal prop(path, sb, 0.25);
      Rng rng(mc.seed, base + i, kTimeTag);
      double acc = 0.0;
      for (int r = 0; r < kShiftsPerPath; ++r) {
        const Point x = prop.sample(rng);
        const auto pf = evaluate_path(pb.ctx, shifted(path, x));
        acc += (1.0 - pf.weight(s.mu, s.F, k, s.f1)) / prop.density(x);
      }
      v[i] = acc / (kShiftsPerPath * t);
    });
    const auto ms = mean_stderr(v);
    res.points.push_back({t, ms.mean, ms.stderr_});
  }
  for (std::size_t j = 0; j + 1 < res.points.size(); ++j) {
    const auto &a = res.points[j], &b = res.points[j + 1];
    if (b.value > a.value + 3.0 * std::hypot(a.stderr_, b.stderr_))
      throw FitError("time averages increase in t beyond noise");
  }
  std::vector<double> ts, ys, ss;
  for (const auto& p : res.points) {
    ts.push_back(p.t);
    ys.push_back(p.value);
    ss.push_back(p.stderr_);
  }
  if (res.points.size() >= 3) {
    const auto fit = fit_inverse_t(ts, ys, ss);
    res.estimate.value = fit.a;
    res.estimate.stderr_ = fit.se_a;
    res.b = fit.b;
    res.chi2 = fit.chi2;
    res.dof = fit.dof;
    res.residual_lag1 = lag1_autocorrelation(fit.residuals);
  } else {
    res.estimate.value = ys.back();
    res.estimate.stderr_ = ss.back();
  }
  res.estimate.n_paths = int(n * t_grid.size());
  return res;
}

SemiclassicalTable semiclassical_sweep(const ScatteringProblem& pb, const std::vector<double>& p_grid,
                                       const MCOptions& mc, const std::vector<double>& t_grid) {
  if (p_grid.empty()) throw DomainError("empty p grid");
  std::vector<Scales> grid;
  for (double p : p_grid) grid.push_back({p, p, 0.0});
  const bool pcaf = pb.ctx.has_f1_potential;
  if (pcaf)
    for (double p : p_grid) grid.push_back({p, 0.0, p});
  std::vector<ScatteringEstimate> est(grid.size());
  // p = 0 rows carry no measure; keep them out of the shared ensemble
  std::vector<Scales> live;
  std::vector<std::size_t> where;
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (pb.total_mass(grid[j]) > 0.0) {
      live.push_back(grid[j]);
      where.push_back(j);
    } else {
      est[j].n_paths = mc.n_paths;
    }
  if (!live.empty() && t_grid.empty()) {
    const auto e = gamma_expression_sweep(pb, live, mc);
    for (std::size_t j = 0; j < live.size(); ++j) est[where[j]] = e[j];
  }
  if (!t_grid.empty())
    for (std::size_t j = 0; j < live.size(); ++j) est[where[j]] = gamma_time_average(pb, live[j], t_grid, mc).estimate;
  SemiclassicalTable tab;
  for (std::size_t j = 0; j < p_grid.size(); ++j) tab.rows.push_back({p_grid[j], est[j], pb.total_mass(grid[j])});
  if (pcaf)
    for (std::size_t j = 0; j < p_grid.size(); ++j) {
      const auto& g = grid[p_grid.size() + j];
      tab.pcaf_rows.push_back({p_grid[j], est[p_grid.size() + j], pb.total_mass(g)});
    }
  return tab;
}

SmallEpsilonTable small_epsilon_sweep(const ScatteringProblem& pb, const std::vector<double>& eps_grid,
                                      const MCOptions& mc) {
  if (eps_grid.empty()) throw DomainError("empty epsilon grid");
  for (double e : eps_grid)
    if (!(e > 0.0)) throw DomainError("epsilon must be positive");
  if (!pb.ctx.pot.is_zero() && !std::isfinite(pb.ctx.pot.support_radius()))
    throw DomainError("small-epsilon limit needs compactly supported V");
  std::vector<Scales> grid;
  for (double e : eps_grid) grid.push_back({e, e, 0.0});
  const auto est = gamma_expression_sweep(pb, grid, mc);
  SmallEpsilonTable tab;
  tab.target = pb.v_l1 + pb.ctx.hat_l1;
  for (std::size_t j = 0; j < eps_grid.size(); ++j) {
    const double e = eps_grid[j];
    ScatteringEstimate r = est[j];
    r.value /= e;
    r.stderr_ /= e;
    r.bias_bound /= e;
    tab.rows.push_back({e, r, pb.total_mass(grid[j]) / e});
  }
  return tab;
}

Sandwich sandwich_check(const ScatteringProblem& pb, double p, double k, const MCOptions& mc) {
  if (!pb.ctx.has_f1_potential) throw DomainError("sandwich check needs F1 as a potential");
  const double pk = std::pow(p, k);
  const auto est = gamma_expression_sweep(pb, {Scales{p, 0.0, p}, Scales{p, pk, p}}, mc);
  Sandwich s;
  s.lower = est[0];
  s.middle = est[1];
  s.upper = (1.0 + std::pow(p, k - 1.0)) * est[0].value;
  s.upper_stderr = (1.0 + std::pow(p, k - 1.0)) * est[0].stderr_;
  return s;
}

}  // namespace stablescat
