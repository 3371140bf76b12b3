#include "stablescat/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "stablescat/capacity.hpp"
#include "stablescat/density.hpp"
#include "stablescat/feynman_kac.hpp"
#include "stablescat/scattering.hpp"
#include "stablescat/spectral.hpp"
#include "stablescat/stats.hpp"
#include "stablescat/subordination.hpp"

namespace stablescat {

bool SelftestReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

JumpFunctional shell_f() { return make_shell_functional(Profile{PhiKind::power, 2.0, 1}, 1.0, 0.5); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Outcome density_vs_cauchy(const StableModel& m) {
  double worst = 0.0;
  for (double t : {0.5, 1.0, 2.0})
    for (double r : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      const double exact = cauchy_density_3d(t, r);
      worst = std::max(worst, std::abs(density_radial(m, t, r, 1e-10) / exact - 1.0));
    }
  return {worst <= 1e-6, "max relative error " + fmt(worst)};
}

/// p_t(r) / t -> c_levy r^{-d-alpha} as t -> 0, with relative correction O(t r^{-alpha}).
Outcome levy_tail(const StableModel& m) {
  const double t = 1e-4, r = 1.0;
  const double limit = density_radial(m, t, r) / t * std::pow(r, m.d + m.alpha);
  const double rel = limit / m.c_levy - 1.0;
  return {std::abs(rel) <= 2e-3, "d=" + std::to_string(m.d) + " alpha=" + fmt(m.alpha) + " tail/c_levy-1 = " + fmt(rel)};
}

Outcome riesz(const StableModel& m) {
  double worst = 0.0;
  for (double r : {0.5, 1.3, 4.0})
    worst = std::max(worst, std::abs(riesz_by_time_integral(m, r) / (m.a_riesz * std::pow(r, m.alpha - m.d)) - 1.0));
  return {worst <= 1e-5, "max relative error " + fmt(worst)};
}

Outcome jump_counts(const StableModel& m, std::uint64_t seed) {
  const int n = 4000;
  const double delta = 0.2, T = 1.0;
  std::vector<double> counts(n);
  for (int i = 0; i < n; ++i) {
    SimulationOptions so;
    so.horizon = T;
    so.dt_max = 0.05;
    so.truncation.delta_near = delta;
    so.truncation.delta_far_max = delta;
    so.full_skeleton = false;
    counts[std::size_t(i)] = double(simulate_path(m, seed, std::uint64_t(i), so).jumps.size());
  }
  const double lam = big_jump_rate(m, delta) * T;
  const auto ms = mean_stderr(counts);
  double var = 0.0;
  for (double c : counts) var += (c - ms.mean) * (c - ms.mean);
  var /= (n - 1);
  const double z_mean = (ms.mean - lam) / std::sqrt(lam / n);
  const double z_disp = (var / ms.mean - 1.0) / std::sqrt(2.0 / (n - 1));
  return {std::abs(z_mean) < 4.0 && std::abs(z_disp) < 4.0,
          "rate " + fmt(lam) + " mean " + fmt(ms.mean) + " z " + fmt(z_mean) + " dispersion z " + fmt(z_disp)};
}

Outcome marginals(const StableModel& m, std::uint64_t seed) {
  const int n = 2000;
  std::vector<double> sim(n), exact(n);
  SimulationOptions so;
  so.horizon = 1.0;
  so.dt_max = 0.01;
  so.truncation.delta_near = 0.05;
  so.truncation.delta_far_max = 0.05;
  so.full_skeleton = false;
  for (int i = 0; i < n; ++i) {
    sim[std::size_t(i)] = simulate_path(m, seed, std::uint64_t(i), so).positions.back()[0];
    Rng rng(seed, std::uint64_t(i), 0x5e1f);
    exact[std::size_t(i)] = sample_stable_exact(m, rng, 1.0)[0];
  }
  const auto ks = ks_two_sample(sim, exact);
  return {ks.p_value >= 1e-3, "KS statistic " + fmt(ks.statistic) + " p " + fmt(ks.p_value)};
}

Outcome girsanov(const StableModel& m, std::uint64_t seed) {
  const auto jf = shell_f();
  const double q = 5.0;
  const auto ctx = make_fk_context(m, zero_potential(m.d), jf, 0.02, {q});
  const auto f1 = make_f_one_field(m, jf, q);
  MCOptions mc;
  mc.n_paths = 1000;
  mc.seed = seed;
  const auto g = girsanov_consistency(ctx, f1, Point{0.4, 0.2, 0, 0}, q, mc);
  return {std::abs(g.z_score) < 3.0, "explicit " + fmt(g.explicit_form.value) + " Levy system " +
                                         fmt(g.compensator_form.value) + " z " + fmt(g.z_score)};
}

Outcome monotone(const StableModel& m, std::uint64_t seed) {
  const auto pb = make_scattering_problem(m, ball_potential(m.d, 1.0, 1.0), shell_f(), 0.02, {1.0, 2.0});
  MCOptions mc;
  mc.n_paths = 300;
  mc.seed = seed;
  const auto e = gamma_expression_sweep(pb, {Scales{1, 1, 0}, Scales{2, 2, 0}}, mc);
  const bool ok = e[1].value >= e[0].value - 3.0 * std::hypot(e[0].stderr_, e[1].stderr_);
  return {ok, "Gamma(V+F) " + fmt(e[0].value) + " Gamma(2V+2F) " + fmt(e[1].value)};
}

Outcome dilation(const StableModel& m) {
  const double a = capacity_equilibrium(m, ball_set(m.d, 1.0), 8).cap;
  const double b = capacity_equilibrium(m, ball_set(m.d, 2.0), 8).cap;
  const double ratio = b / (a * std::pow(2.0, m.d - m.alpha));
  return {std::abs(ratio - 1.0) <= 0.005, "Cap(2K)/(2^{d-alpha} Cap(K)) = " + fmt(ratio)};
}

Outcome rescaling(const StableModel& m) {
  const Point xi{0.1, -0.15, 0, 0};
  const auto v = bump_potential(2, 3.0, 0.3, Point{0.05, -0.1, 0, 0});
  const auto f = shell_f().transformed(10.0, Point{-1.0, 1.5, 0, 0});
  double worst = 0.0;
  for (double r : {0.5, 0.25}) {
    const double ra = std::pow(r, m.alpha);
    const double direct = lambda1(assemble(m, CubeSpec{r, xi}, v, f, Boundary::neumann_reflected, 8)).value;
    const double unit =
        lambda1(assemble(m, CubeSpec{}, v.transformed(r, xi).scaled(ra), f.transformed(r, xi), Boundary::neumann_reflected, 8))
            .value;
    worst = std::max(worst, std::abs(direct * ra / unit - 1.0));
  }
  return {worst <= 1e-8, "max relative deviation " + fmt(worst)};
}

}  // namespace

SelftestReport run_selftest(const SelftestOptions& opt) {
  using clock = std::chrono::steady_clock;
  auto faulty = [&](int d, double alpha) {
    auto m = make_model(d, alpha);
    m.c_levy *= opt.c_levy_factor;
    return m;
  };
  const auto cauchy = faulty(3, 1.0);
  const auto light = faulty(2, 0.5);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"density vs Cauchy kernel", [&] { return density_vs_cauchy(cauchy); }},
      {"small-time tail d=3", [&] { return levy_tail(cauchy); }},
      {"small-time tail d=2", [&] { return levy_tail(light); }},
      {"Riesz constant", [&] { return riesz(light); }},
      {"Poisson jump counts", [&] { return jump_counts(cauchy, opt.seed); }},
      {"path marginals vs exact sampler", [&] { return marginals(cauchy, opt.seed); }},
      {"explicit vs Levy-system weights", [&] { return girsanov(cauchy, opt.seed); }},
      {"monotone in V and F", [&] { return monotone(cauchy, opt.seed); }},
      {"capacity dilation", [&] { return dilation(cauchy); }},
      {"spectral rescaling", [&] { return rescaling(light); }},
  };

  SelftestReport rep;
  const auto start = clock::now();
  for (const auto& [name, fn] : checks) {
    const auto t0 = clock::now();
    SelftestCheck c;
    c.name = name;
    try {
      const auto o = fn();
      c.passed = o.passed;
      c.detail = o.detail;
    } catch (const std::exception& e) {
      c.detail = std::string("threw: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    rep.checks.push_back(std::move(c));
  }
  rep.seconds = std::chrono::duration<double>(clock::now() - start).count();
  rep.checks.push_back(SelftestCheck{"time budget", rep.seconds <= opt.budget_seconds,
                                     fmt(rep.seconds) + " s of " + fmt(opt.budget_seconds), 0.0});
  return rep;
}

}  // namespace stablescat
