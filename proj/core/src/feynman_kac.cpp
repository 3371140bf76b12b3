#include "stablescat/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stablescat/errors.hpp"
#include "stablescat/parallel.hpp"
#include "stablescat/stats.hpp"

namespace stablescat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Ball support_ball(const FKContext& ctx) {
  std::vector<Ball> balls;
  if (!ctx.pot.is_zero()) balls.push_back({ctx.pot.support_center(), ctx.pot.support_radius()});
  if (!ctx.jf.is_zero()) balls.push_back({ctx.jf.support_center(), ctx.jf.support_radius()});
  if (balls.empty()) return {};
  Ball best{balls[0].center, kInf};
  for (const auto& c : balls) {
    double r = 0.0;
    for (const auto& b : balls) r = std::max(r, distance(c.center, b.center) + b.radius);
    if (r < best.radius) best = {c.center, r};
  }
  return best;
}

namespace {

double hat_l1_norm(const FKContext& ctx) { return ctx.hat_l1; }

double compensator_at(const CompensatorTable& c, const Point& x) { return c.table.empty() ? 0.0 : c(x); }

Estimate summarize(std::vector<double>& values, double bias) {
  const auto ms = mean_stderr(values);
  return {ms.mean, ms.stderr_, bias, int(values.size())};
}

}  // namespace

std::size_t FKContext::level_index(double q) const {
  for (std::size_t k = 0; k < levels.size(); ++k)
    if (levels[k] == q) return k;
  throw DomainError("F level not tabulated in the Feynman-Kac context");
}

FKContext make_fk_context(const StableModel& m, const PotentialSpec& pot, const JumpFunctional& jf, double delta,
                          std::vector<double> levels, bool with_f1_potential) {
  if (!(delta > 0.0)) throw DomainError("truncation delta must be positive");
  FKContext ctx;
  ctx.model = m;
  ctx.pot = pot;
  ctx.jf = jf;
  ctx.delta = delta;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  ctx.levels = levels;
  ctx.compensators.resize(levels.size());
  parallel_for(levels.size(), [&](std::size_t k) {
    ctx.compensators[k] = make_compensator_table(m, jf, levels[k], delta);
  });
  if (!jf.is_zero()) ctx.hat_l1 = make_f_one_field(m, jf, 1.0, true, 40).l1_norm;
  if (with_f1_potential && !jf.is_zero()) {
    ctx.has_f1_potential = true;
    ctx.f1_potential = make_f_one_field(m, jf, 1.0);
  }
  if (!pot.is_zero()) {
    if (!std::isfinite(pot.support_radius())) throw DomainError("potential must have bounded support");
    ctx.active.push_back({pot.support_center(), pot.support_radius() + delta});
  }
  if (!jf.is_zero()) ctx.active.push_back({jf.support_center(), jf.support_radius() + delta});
  if (!pot.is_zero()) {
    if (pot.kind == PotentialKind::ball) ctx.interfaces.spheres.push_back({(-1.0 / pot.scale) * pot.shift, pot.radius / pot.scale});
    if (pot.windowed) ctx.interfaces.cubes.push_back(pot.window);
  }
  if (!jf.is_zero()) {
    if (jf.kind == FKind::shell) ctx.interfaces.spheres.push_back({jf.support_center(), jf.R / jf.scale});
    ctx.interfaces.spheres.push_back({jf.support_center(), jf.support_radius()});
  }
  return ctx;
}

double PathFunctional::weight(double scale_mu, double q, std::size_t k, double scale_f1) const {
  const double comp = q > 0.0 ? compensator.at(k) : 0.0;
  return std::exp(-scale_mu * a_mu - scale_f1 * a_f1 - q * jump_sum - comp);
}

PathFunctional evaluate_path(const FKContext& ctx, const PathLedger& p) {
  PathFunctional out;
  out.exited = p.exited;
  const std::size_t nl = ctx.levels.size();
  out.compensator.assign(nl, 0.0);
  const bool has_v = !ctx.pot.is_zero(), has_f = !ctx.jf.is_zero();
  const std::size_t n = p.times.size();
  if (n == 0) return out;

  std::vector<double> g_prev(nl, 0.0), g_left(nl, 0.0);
  double v_prev = has_v ? ctx.pot(p.positions[0]) : 0.0;
  if (has_f)
    for (std::size_t k = 0; k < nl; ++k) g_prev[k] = compensator_at(ctx.compensators[k], p.positions[0]);
  double a = 0.0, af = 0.0;
  const bool has_f1 = ctx.has_f1_potential;
  double f1_prev = has_f1 ? ctx.f1_potential(p.positions[0]) : 0.0;
  std::vector<double> comp(nl, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = p.times[i] - p.times[i - 1];
    const Point& left = p.left_limit(i);
    if (has_v) {
      const double v_left = ctx.pot(left);
      a += 0.5 * dt * (v_prev + v_left);
      v_prev = p.jump_at[i] >= 0 ? ctx.pot(p.positions[i]) : v_left;
    }
    if (has_f1) {
      const double f_left = ctx.f1_potential(left);
      af += 0.5 * dt * (f1_prev + f_left);
      f1_prev = p.jump_at[i] >= 0 ? ctx.f1_potential(p.positions[i]) : f_left;
    }
    if (has_f) {
      for (std::size_t k = 0; k < nl; ++k) {
        const auto& tab = ctx.compensators[k];
        const double gl = compensator_at(tab, left);
        comp[k] += 0.5 * dt * (g_prev[k] + gl);
        g_prev[k] = p.jump_at[i] >= 0 ? compensator_at(tab, p.positions[i]) : gl;
      }
    }
  }
  double js = 0.0;
  if (has_f)
    for (const auto& j : p.jumps) js += ctx.jf(j.pre, j.post);
  out.a_mu = a;
  out.a_f1 = af;
  out.jump_sum = js;
  out.compensator = comp;
  return out;
}

FKWeight accumulate(const FKContext& ctx, const PathLedger& p, double scale_mu, double scale_F) {
  if (scale_mu < 0.0 || scale_F < 0.0) throw DomainError("accumulate: scales must be nonnegative");
  const auto pf = evaluate_path(ctx, p);
  FKWeight w;
  w.a_mu = scale_mu * pf.a_mu;
  w.jump_sum_big = scale_F * pf.jump_sum;
  w.compensator_small = scale_F > 0.0 ? pf.compensator.at(ctx.level_index(scale_F)) : 0.0;
  w.weight = std::exp(-w.a_mu - w.jump_sum_big - w.compensator_small);
  return w;
}

FKWeight accumulate(const StableModel& m, const PathLedger& p, const PotentialSpec& pot, const JumpFunctional& jf,
                    double scale_mu, double scale_F) {
  std::vector<double> levels;
  if (scale_F > 0.0) levels.push_back(scale_F);
  const double delta = p.truncation_delta > 0.0 ? p.truncation_delta : 0.01;
  return accumulate(make_fk_context(m, pot, jf, delta, levels), p, scale_mu, scale_F);
}

double tail_bound(const FKContext& ctx, double scale_mu, double scale_F, double horizon, double exit_radius,
                  double scale_f1) {
  const bool has_v = !ctx.pot.is_zero() && scale_mu > 0.0;
  const bool has_f = !ctx.jf.is_zero() && (scale_F > 0.0 || scale_f1 > 0.0);
  if (!has_v && !has_f) return 0.0;
  const auto& m = ctx.model;
  const Ball s = support_ball(ctx);
  double exit_part = 0.0;
  if (std::isfinite(exit_radius)) {
    const double dist = exit_radius - norm(s.center) - s.radius;
    if (!(dist > 0.0)) return 1.0;
    double g = 0.0;
    if (has_v) g += scale_mu * ctx.pot.l1_norm();
    if (has_f) g += scale_F * hat_l1_norm(ctx) + scale_f1 * ctx.f1_potential.l1_norm;
    const double mass = std::isfinite(g) ? std::min(g, ball_capacity(m, s.radius)) : ball_capacity(m, s.radius);
    exit_part = std::min(1.0, m.a_riesz * std::pow(dist, m.alpha - m.d) * mass);
  }
  double time_part = 0.0;
  if (std::isfinite(horizon)) {
    if (!std::isfinite(exit_radius)) return 1.0;
    // P(tau > k T) <= 2^{-k} for T = 2 sup_x E_x tau
    const double block = 2.0 * mean_exit_time_ball(m, exit_radius);
    time_part = std::pow(0.5, std::floor(horizon / block));
  }
  return std::min(1.0, exit_part + time_part);
}

TailChoice choose_tail(const FKContext& ctx, double scale_mu, double scale_F, double target, double scale_f1) {
  if (!(target > 0.0 && target < 1.0)) throw DomainError("tail target must lie in (0,1)");
  const auto& m = ctx.model;
  const Ball s = support_ball(ctx);
  TailChoice t;
  // exit part: a_riesz dist^{alpha-d} mass <= target/2
  double g = 0.0;
  if (!ctx.pot.is_zero() && scale_mu > 0.0) g += scale_mu * ctx.pot.l1_norm();
  if (!ctx.jf.is_zero() && scale_F > 0.0) g += scale_F * hat_l1_norm(ctx);
  if (ctx.has_f1_potential && scale_f1 > 0.0) g += scale_f1 * ctx.f1_potential.l1_norm;
  if (g == 0.0) return {1.0, 1.0, 0.0};
  const double mass = std::isfinite(g) ? std::min(g, ball_capacity(m, s.radius)) : ball_capacity(m, s.radius);
  const double dist = std::pow(0.5 * target / (m.a_riesz * mass), 1.0 / (m.alpha - m.d));
  t.exit_radius = norm(s.center) + s.radius + std::max(dist, s.radius);
  const double block = 2.0 * mean_exit_time_ball(m, t.exit_radius);
  t.horizon = block * std::ceil(std::log2(2.0 / target));
  t.bound = tail_bound(ctx, scale_mu, scale_F, t.horizon, t.exit_radius, scale_f1);
  return t;
}

SimulationOptions simulation_options(const FKContext& ctx, const MCOptions& mc, const Point& start, double horizon,
                                     double exit_radius) {
  SimulationOptions o;
  o.horizon = horizon;
  o.exit_radius = exit_radius;
  o.dt_max = mc.dt_max;
  o.start = start;
  o.truncation.delta_near = ctx.delta;
  o.truncation.delta_far_max = std::max(ctx.delta, mc.delta_far_max);
  o.truncation.active = ctx.active;
  if (o.truncation.active.empty()) o.truncation.delta_far_max = ctx.delta;
  o.full_skeleton = false;
  o.interfaces = ctx.interfaces;
  o.interfaces.dt_min = mc.dt_min;
  return o;
}

std::vector<PathFunctional> simulate_functionals(const FKContext& ctx, const Point& x, const MCOptions& mc,
                                                 double horizon, double exit_radius) {
  if (mc.n_paths < 1) throw DomainError("n_paths must be at least 1");
  std::vector<PathFunctional> out(std::size_t(mc.n_paths));
  const auto opt = simulation_options(ctx, mc, x, horizon, exit_radius);
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = evaluate_path(ctx, simulate_path(ctx.model, mc.seed, mc.stream_offset + i, opt));
  });
  return out;
}

Estimate capacitary_potential(const FKContext& ctx, const Point& x, double scale_mu, double scale_F,
                              const MCOptions& mc) {
  const bool trivial = (ctx.pot.is_zero() || scale_mu == 0.0) && (ctx.jf.is_zero() || scale_F == 0.0);
  if (trivial) return {0.0, 0.0, 0.0, mc.n_paths};
  auto tail = choose_tail(ctx, scale_mu, scale_F, mc.tail_target);
  if (mc.horizon > 0.0) tail.horizon = mc.horizon;
  if (mc.exit_radius > 0.0) tail.exit_radius = mc.exit_radius;
  const double bias = tail_bound(ctx, scale_mu, scale_F, tail.horizon, tail.exit_radius);
  const std::size_t k = scale_F > 0.0 ? ctx.level_index(scale_F) : 0;
  const auto paths = simulate_functionals(ctx, x, mc, tail.horizon, tail.exit_radius);
  std::vector<double> u(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) u[i] = 1.0 - paths[i].weight(scale_mu, scale_F, k);
  return summarize(u, bias);
}

Estimate capacitary_potential(const StableModel& m, const PotentialSpec& pot, const JumpFunctional& jf, const Point& x,
                              const MCOptions& mc) {
  const auto ctx = make_fk_context(m, pot, jf, mc.delta, jf.is_zero() ? std::vector<double>{} : std::vector{1.0});
  return capacitary_potential(ctx, x, 1.0, 1.0, mc);
}

Estimate capacitary_potential_finite(const FKContext& ctx, const Point& x, double T, double scale_mu, double scale_F,
                                     const MCOptions& mc) {
  if (!(T > 0.0)) throw DomainError("finite-horizon potential needs T > 0");
  const double r_ex = mc.exit_radius > 0.0 ? mc.exit_radius : kInf;
  const double bias = std::isfinite(r_ex) ? tail_bound(ctx, scale_mu, scale_F, kInf, r_ex) : 0.0;
  const bool trivial = (ctx.pot.is_zero() || scale_mu == 0.0) && (ctx.jf.is_zero() || scale_F == 0.0);
  if (trivial) return {0.0, 0.0, 0.0, mc.n_paths};
  const std::size_t k = scale_F > 0.0 ? ctx.level_index(scale_F) : 0;
  const auto paths = simulate_functionals(ctx, x, mc, T, r_ex);
  std::vector<double> u(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) u[i] = 1.0 - paths[i].weight(scale_mu, scale_F, k);
  return summarize(u, bias);
}

GirsanovPair girsanov_consistency(const FKContext& ctx, const FOneField& f_one, const Point& x, double q,
                                  const MCOptions& mc) {
  if (f_one.hat || f_one.p != q) throw DomainError("girsanov_consistency: F1 field must be F^{(q)}1");
  const std::size_t k = ctx.level_index(q);
  auto tail = choose_tail(ctx, 0.0, q, mc.tail_target);
  if (mc.horizon > 0.0) tail.horizon = mc.horizon;
  if (mc.exit_radius > 0.0) tail.exit_radius = mc.exit_radius;
  const double bias = tail_bound(ctx, 0.0, q, tail.horizon, tail.exit_radius);

  const std::size_t n = std::size_t(mc.n_paths);
  std::vector<double> w1(n), w2(n);
  const auto opt = simulation_options(ctx, mc, x, tail.horizon, tail.exit_radius);
  const auto& comp = ctx.compensators[k];
  parallel_for(n, [&](std::size_t i) {
    // explicit form on one stream
    const auto p1 = simulate_path(ctx.model, mc.seed, mc.stream_offset + i, opt);
    w1[i] = evaluate_path(ctx, p1).weight(0.0, q, k);
    // Dynkin form on an independent stream
    const auto p = simulate_path(ctx.model, mc.seed, mc.stream_offset + n + i, opt);
    double log_z = 0.0, integral = 0.0;
    double g_prev = compensator_at(comp, p.positions[0]);
    double f_prev = f_one(p.positions[0]);
    for (std::size_t j = 1; j < p.times.size(); ++j) {
      const double dt = p.times[j] - p.times[j - 1];
      const Point& left = p.left_limit(j);
      const double gl = compensator_at(comp, left), fl = f_one(left);
      const double log_z_left = log_z - 0.5 * dt * (g_prev + gl);
      integral += 0.5 * dt * (std::exp(log_z) * f_prev + std::exp(log_z_left) * fl);
      log_z = log_z_left;
      if (p.jump_at[j] >= 0) {
        const auto& jev = p.jumps[std::size_t(p.jump_at[j])];
        log_z -= q * ctx.jf(jev.pre, jev.post);
        g_prev = compensator_at(comp, p.positions[j]);
        f_prev = f_one(p.positions[j]);
      } else {
        g_prev = gl;
        f_prev = fl;
      }
    }
    w2[i] = 1.0 - integral;
  });
  GirsanovPair out;
  out.explicit_form = summarize(w1, bias);
  out.compensator_form = summarize(w2, bias);
  const double se = std::hypot(out.explicit_form.stderr_, out.compensator_form.stderr_);
  const double diff = out.explicit_form.value - out.compensator_form.value;
  out.z_score = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : kInf);
  return out;
}

}  // namespace stablescat
