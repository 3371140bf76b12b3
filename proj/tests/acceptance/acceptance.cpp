// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "stablescat/capacity.hpp"
#include "stablescat/config.hpp"
#include "stablescat/density.hpp"
#include "stablescat/experiment.hpp"
#include "stablescat/scattering.hpp"
#include "stablescat/spectral.hpp"
#include "stablescat/stats.hpp"
#include "stablescat/subordination.hpp"

using namespace stablescat;

namespace {

// tolerances
constexpr double kDensityRel = 1e-6;
constexpr double kKsP = 0.01;
constexpr double kSigmas = 3.0;
constexpr double kSemiclassicalRel = 0.10;
constexpr double kPsiMin = 0.4;
constexpr double kSmallEpsRel = 0.05;
constexpr double kDilationRel = 0.005;
constexpr double kSpectralScalingRel = 0.02;
constexpr double kBracketDecades = 4.0;
constexpr double kRefinementRel = 0.05;
constexpr double kContrastCMax = 10.0;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string f(double v, int prec = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

JumpFunctional bench_f() { return make_shell_functional(Profile{PhiKind::power, 2.0, 1}, 1.0, 0.5); }

MCOptions mc_with(int n, std::uint64_t seed) {
  MCOptions mc;
  mc.n_paths = n;
  mc.seed = seed;
  return mc;
}

double z(double a, double sa, double b, double sb) { return std::abs(a - b) / std::hypot(sa, sb); }

Verdict density_oracle() {
  const auto m = make_model(3, 1.0);
  double worst = 0.0;
  int n = 0;
  for (double t : {0.25, 1.0, 4.0, 16.0})
    for (double r : {0.0, 0.3, 1.0, 3.0, 10.0}) {
      worst = std::max(worst, std::abs(density_radial(m, t, r, 1e-10) / cauchy_density_3d(t, r) - 1.0));
      ++n;
    }
  const int paths = 4000;
  std::vector<double> sx(paths), ex(paths), sr(paths), er(paths);
  SimulationOptions so;
  so.horizon = 1.0;
  so.dt_max = 0.01;
  so.truncation.delta_near = so.truncation.delta_far_max = 0.05;
  so.full_skeleton = false;
  for (int i = 0; i < paths; ++i) {
    const Point a = simulate_path(m, 101, std::uint64_t(i), so).positions.back();
    Rng rng(202, std::uint64_t(i));
    const Point b = sample_stable_exact(m, rng, 1.0);
    sx[std::size_t(i)] = a[1];
    ex[std::size_t(i)] = b[1];
    sr[std::size_t(i)] = norm(a);
    er[std::size_t(i)] = norm(b);
  }
  const auto k1 = ks_two_sample(sx, ex);
  const auto k2 = ks_two_sample(sr, er);
  return {worst <= kDensityRel && k1.p_value > kKsP && k2.p_value > kKsP,
          std::to_string(n) + "-point max rel err " + f(worst) + "; KS p (coordinate, radius) = " + f(k1.p_value) +
              ", " + f(k2.p_value)};
}

Verdict expression_vs_time_average() {
  const auto m = make_model(3, 1.0);
  const auto pb = make_scattering_problem(m, ball_potential(3, 1.0, 1.0), bench_f(), 0.02, {1.0});
  auto mc = mc_with(2000, 2);
  mc.dt_max = 4e-3;
  const auto ex = gamma_expression(pb, Scales{1, 1, 0}, mc);
  const auto ta = gamma_time_average(pb, Scales{1, 1, 0}, {2, 4, 8, 16}, mc).estimate;
  const double zz = z(ex.value, ex.stderr_, ta.value, ta.stderr_);
  return {zz <= kSigmas, "expression " + f(ex.value) + " +- " + f(ex.stderr_) + ", time average " + f(ta.value) +
                             " +- " + f(ta.stderr_) + ", z " + f(zz, 3)};
}

Verdict monotone_pairs() {
  const auto m = make_model(3, 1.0);
  Rng rng(303, 0);
  int ok = 0;
  double worst = -1e300;
  for (int i = 0; i < 20; ++i) {
    Point c{};
    for (int k = 0; k < 3; ++k) c[k] = rng.uniform() - 0.5;
    const double h = 0.5 + 1.5 * rng.uniform(), rho = 0.5 + 0.7 * rng.uniform(), a = 0.5 + 1.5 * rng.uniform();
    const double h2 = h * (1.0 + rng.uniform()), rho2 = rho * (1.0 + 0.3 * rng.uniform()), a2 = a * (1.0 + rng.uniform());
    const auto lo = make_scattering_problem(m, ball_potential(3, h, rho, c), bench_f().scaled(a), 0.02, {1.0});
    const auto hi = make_scattering_problem(m, ball_potential(3, h2, rho2, c), bench_f().scaled(a2), 0.02, {1.0});
    const auto mc = mc_with(300, 400 + std::uint64_t(i));  // same seed within the pair
    const auto e1 = gamma_expression(lo, Scales{1, 1, 0}, mc);
    const auto e2 = gamma_expression(hi, Scales{1, 1, 0}, mc);
    const double margin = (e2.value - e1.value) / std::hypot(e1.stderr_, e2.stderr_);
    worst = std::max(worst, -margin);
    if (margin >= -kSigmas) ++ok;
  }
  return {ok == 20, std::to_string(ok) + "/20 ordered; worst reversal " + f(std::max(0.0, worst), 3) + " sigma"};
}

const char* kSemiclassical = R"([model]
d = 3
alpha = 1
[potential]
kind = ball
height = 1
radius = 1
[jump]
kind = shell
beta = 2
R = 1
Rp = 0.5
[mc]
n_paths = 2000
dt_max = 0.004
seed = 20261016
[sweep]
kind = semiclassical
grid = 1, 10, 100, 1000
)";

Verdict semiclassical() {
  const auto cfg = parse_config(kSemiclassical);
  const auto res = run_experiment(cfg);
  const auto& rows = res.table.rows;
  const double cap = ball_capacity(cfg.model, 1.5);
  const double g = std::stod(rows.back()[1]);
  bool nondecreasing = true;
  double psi = 1e300;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    psi = std::min(psi, std::stod(rows[i][7]));
    if (i > 0 && std::stod(rows[i][1]) < std::stod(rows[i - 1][1]) -
                                             kSigmas * std::hypot(std::stod(rows[i][2]), std::stod(rows[i - 1][2])))
      nondecreasing = false;
  }
  const double rel = std::abs(g - cap) / cap;
  return {rel <= kSemiclassicalRel && nondecreasing && psi >= kPsiMin && res.ok(),
          "Gamma(p=1e3) " + f(g) + " +- " + f(std::stod(rows.back()[2]), 2) + " vs Cap " + f(cap) + " (" + f(100 * rel, 3) +
              "%); nondecreasing " + (nondecreasing ? "yes" : "no") + "; psi C " + f(psi, 3)};
}

Verdict small_eps() {
  const auto m = make_model(3, 1.0);
  const auto pb = make_scattering_problem(m, ball_potential(3, 1.0, 1.0), bench_f(), 0.02, {1e-3});
  const auto tab = small_epsilon_sweep(pb, {1e-3}, mc_with(2000, 5));
  const double v = tab.rows[0].estimate.value, rel = std::abs(v / tab.target - 1.0);
  return {rel <= kSmallEpsRel, "eps^-1 Gamma " + f(v, 6) + " vs int V + int hat F1 " + f(tab.target, 6) + " (" +
                                   f(100 * rel, 3) + "%)"};
}

Verdict capacity_oracles() {
  const auto m = make_model(3, 1.0);
  bool ok = true;
  std::string detail;
  for (const auto& [name, k] : {std::pair{"ball", ball_set(3, 1.0)}, std::pair{"cube", cube_set(3, 1.0)}}) {
    const auto eq = capacity_extrapolated(m, k, {14, 18});
    HittingOptions ho;
    ho.n_paths = 20000;
    ho.seed = 606;
    const auto mc = capacity_hitting_mc(m, k, ho);
    const bool agree = std::abs(mc.cap - eq.cap) <= kSigmas * mc.stderr_ + mc.bias_bound;
    const double ratio = capacity_equilibrium(m, k.scaled(2.0), 10).cap /
                         (4.0 * capacity_equilibrium(m, k, 10).cap);  // 2^{d-alpha}
    const bool scales = std::abs(ratio - 1.0) <= kDilationRel;
    ok = ok && agree && scales;
    detail += std::string(detail.empty() ? "" : "; ") + name + " equilibrium " + f(eq.cap) + " hitting " + f(mc.cap) +
              " +- " + f(mc.stderr_, 2) + " (bias " + f(mc.bias_bound, 2) + "), dilation " + f(ratio, 8);
  }
  return {ok, detail};
}

Verdict spectral_scaling() {
  const auto m = make_model(2, 0.5);
  const Point xi{0.1, -0.15, 0, 0};
  const auto v = bump_potential(2, 3.0, 0.3, Point{0.05, -0.1, 0, 0});
  const auto jf = make_shell_functional(Profile{PhiKind::power, 2.0, 1}, 0.1, 0.05).transformed(1.0, Point{-0.1, 0.15, 0, 0});
  double worst = 0.0;
  std::string detail;
  for (double r : {0.5, 0.25}) {
    const double ra = std::pow(r, m.alpha);
    const double direct = lambda1(assemble(m, CubeSpec{r, xi}, v, jf, Boundary::neumann_reflected, 16)).value;
    const double unit =
        lambda1(assemble(m, CubeSpec{}, v.transformed(r, xi).scaled(ra), jf.transformed(r, xi), Boundary::neumann_reflected, 16))
            .value;
    const double rel = std::abs(direct * ra / unit - 1.0);
    worst = std::max(worst, rel);
    detail += std::string(detail.empty() ? "" : "; ") + "r=" + f(r) + " lambda " + f(direct, 6) + " vs r^-a lambda_unit " +
              f(unit / ra, 6);
  }
  return {worst <= kSpectralScalingRel, detail + "; max rel " + f(worst, 2)};
}

Verdict bracket() {
  const auto m = make_model(2, 0.5);
  std::vector<double> eps;
  for (int i = 0; i < 10; ++i) eps.push_back(std::pow(10.0, -3.0 + 3.0 * i / 9.0));
  const auto tab = gamma_lambda_bracket(m, CubeSpec{}, ball_potential(2, 1.0, 0.25),
                                        make_shell_functional(Profile{PhiKind::power, 2.0, 1}, 0.25, 0.2), eps, 16,
                                        mc_with(1000, 3));
  bool flagged = false;
  for (const auto& r : tab.rows) flagged = flagged || r.flagged;
  return {!flagged && tab.decades <= kBracketDecades && tab.max_refinement_change <= kRefinementRel,
          "lambda/Gamma in [" + f(tab.ratio_min) + ", " + f(tab.ratio_max) + "] (" + f(tab.decades, 3) +
              " decades); max refinement change " + f(100 * tab.max_refinement_change, 3) + "%"};
}

Verdict contrast_scan() {
  const auto m = make_model(2, 0.5);
  const auto jf = bench_f();
  const double cap_unit = capacity_extrapolated(m, cube_set(2, 1.0), {16, 32}).cap;
  std::vector<Point> xi;
  for (double x : {2.0, 4.0, 8.0, 16.0, 32.0}) xi.push_back(Point{x, 0, 0, 0});
  const auto mc = mc_with(400, 9);
  bool ok = true;
  std::string detail;
  for (double c : {1.0, kContrastCMax}) {
    const double r = std::min(1.0, std::pow(cap_unit / (2.0 * c), 1.0 / m.alpha));
    const auto rep = discreteness_scan(m, quadratic_potential(2), jf, r, xi, c, mc);
    ok = ok && rep.criterion_holds && rep.sublevel_vanishes && std::isfinite(rep.empirical_R);
    detail += std::string(detail.empty() ? "" : "; ") + "|x|^2 c=" + f(c) + " r=" + f(r, 3) + " R=" +
              f(rep.empirical_R) + " holds " + (rep.criterion_holds ? "yes" : "no") + " thin " +
              (rep.sublevel_vanishes ? "yes" : "no");
  }
  const auto rep = discreteness_scan(m, ball_potential(2, 1.0, 1.0), jf, 0.5, xi, 1.0, mc);
  bool zero_far = true;
  for (std::size_t i = rep.rows.size() / 2; i < rep.rows.size(); ++i) zero_far = zero_far && rep.rows[i].gamma == 0.0;
  ok = ok && zero_far && !rep.criterion_holds && !rep.sublevel_vanishes;
  detail += std::string("; compact V Gamma=0 far ") + (zero_far ? "yes" : "no") + " thin " +
            (rep.sublevel_vanishes ? "yes" : "no");
  return {ok, detail};
}

Verdict girsanov() {
  const auto m = make_model(3, 1.0);
  const auto jf = bench_f();
  const double q = 5.0;
  const auto ctx = make_fk_context(m, zero_potential(3), jf, 0.02, {q});
  const auto f1 = make_f_one_field(m, jf, q);
  const std::vector<Point> xs{{0, 0, 0, 0}, {0.4, 0.2, 0, 0}, {1.0, 0, 0, 0}, {0.3, 1.1, 0.2, 0}, {2.0, 0, 0, 0}};
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto g = girsanov_consistency(ctx, f1, xs[i], q, mc_with(1000, 1000 + i));
    worst = std::max(worst, std::abs(g.z_score));
  }
  return {worst <= kSigmas, "5 points, max |z| " + f(worst, 3)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"density oracle and path marginals", density_oracle},
      {"expression vs time average", expression_vs_time_average},
      {"monotonicity on 20 random pairs", monotone_pairs},
      {"semiclassical limit vs capacity", semiclassical},
      {"small-eps limit", small_eps},
      {"capacity oracles and dilation", capacity_oracles},
      {"spectral scaling identity", spectral_scaling},
      {"lambda/Gamma bracket", bracket},
      {"discreteness contrast scan", contrast_scan},
      {"Girsanov consistency", girsanov},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu: %s  %s | %s (%.0f s)\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str(), s);
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  return failures;
}
