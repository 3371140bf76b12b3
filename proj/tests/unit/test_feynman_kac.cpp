#include <cmath>

#include "doctest.h"
#include "stablescat/feynman_kac.hpp"

using namespace stablescat;

namespace {

JumpFunctional bench_f() { return make_shell_functional(Profile{PhiKind::power, 2.0, 1}, 1.0, 0.5); }

MCOptions small_mc(int n) {
  MCOptions mc;
  mc.n_paths = n;
  mc.seed = 17;
  return mc;
}

}  // namespace

TEST_CASE("empty functional gives weight one exactly") {
  const auto m = make_model(3, 1.0);
  const auto ctx = make_fk_context(m, zero_potential(3), zero_functional(), 0.02, {});
  SimulationOptions opt;
  opt.horizon = 5.0;
  opt.exit_radius = 20.0;
  opt.truncation.delta_near = 0.02;
  const auto p = simulate_path(m, 3, 0, opt);
  const auto w = accumulate(ctx, p, 1.0, 0.0);
  CHECK(w.weight == 1.0);
  const auto e = capacitary_potential(ctx, {}, 1.0, 1.0, small_mc(10));
  CHECK(e.value == 0.0);
  CHECK(e.stderr_ == 0.0);
}

TEST_CASE("constant potential on a huge ball reproduces exp(-cT)") {
  const auto m = make_model(3, 1.0);
  const auto pot = ball_potential(3, 0.7, 1e4);
  const auto ctx = make_fk_context(m, pot, zero_functional(), 0.05, {});
  auto mc = small_mc(50);
  mc.dt_max = 0.01;
  for (double T : {0.5, 2.0}) {
    const auto e = capacitary_potential_finite(ctx, {}, T, 1.0, 0.0, mc);
    CHECK(e.value == doctest::Approx(1.0 - std::exp(-0.7 * T)).epsilon(1e-12));
    CHECK(e.stderr_ < 1e-12);
  }
}

TEST_CASE("weight components are nonnegative and the weight lies in (0,1]") {
  const auto m = make_model(3, 1.0);
  const auto ctx = make_fk_context(m, ball_potential(3, 1.0, 1.0), bench_f(), 0.02, {1.0, 10.0});
  const auto opt = simulation_options(ctx, small_mc(1), Point{0.5, 0, 0, 0}, 20.0, 30.0);
  for (std::uint64_t k = 0; k < 40; ++k) {
    const auto p = simulate_path(m, 5, k, opt);
    for (double q : {1.0, 10.0}) {
      const auto w = accumulate(ctx, p, q, q);
      CHECK(w.a_mu >= 0.0);
      CHECK(w.jump_sum_big >= 0.0);
      CHECK(w.compensator_small >= 0.0);
      CHECK(w.weight > 0.0);
      CHECK(w.weight <= 1.0);
    }
    // the on-the-fly overload agrees with the context
    if (k < 3) CHECK(accumulate(m, p, ctx.pot, ctx.jf, 1.0, 1.0).weight == doctest::Approx(accumulate(ctx, p, 1.0, 1.0).weight));
  }
}

TEST_CASE("capacitary potential bounds, decay and monotonicity in V") {
  const auto m = make_model(3, 1.0);
  const auto v1 = ball_potential(3, 1.0, 1.0);
  const auto ctx1 = make_fk_context(m, v1, zero_functional(), 0.02, {});
  const auto ctx2 = make_fk_context(m, v1.scaled(2.0), zero_functional(), 0.02, {});
  const auto mc = small_mc(400);
  double prev = 1.0;
  for (double r : {0.0, 2.0, 6.0, 15.0}) {
    const auto a = capacitary_potential(ctx1, Point{r, 0, 0, 0}, 1.0, 0.0, mc);
    const auto b = capacitary_potential(ctx2, Point{r, 0, 0, 0}, 1.0, 0.0, mc);
    CHECK(a.value >= 0.0);
    CHECK(b.value <= 1.0);
    // common random numbers: identical paths, so the ordering is exact
    CHECK(b.value >= a.value);
    CHECK(a.value <= prev + 3 * a.stderr_);
    prev = a.value;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("finite-horizon potential grows with T and stays below the infinite one") {
  const auto m = make_model(3, 1.0);
  const auto ctx = make_fk_context(m, ball_potential(3, 1.0, 1.0), bench_f(), 0.02, {1.0});
  const auto mc = small_mc(600);
  const Point x{0.3, 0, 0, 0};
  const auto tiny = capacitary_potential_finite(ctx, x, 1e-6, 1.0, 1.0, mc);
  CHECK(tiny.value < 1e-4);
  double prev = tiny.value;
  for (double T : {0.1, 0.5, 2.0}) {
    const auto e = capacitary_potential_finite(ctx, x, T, 1.0, 1.0, mc);
    CHECK(e.value >= prev - 3 * e.stderr_);
    prev = e.value;
  }
  const auto inf = capacitary_potential(ctx, x, 1.0, 1.0, mc);
  CHECK(prev <= inf.value + 3 * std::hypot(inf.stderr_, 0.01));
}

TEST_CASE("refinement of delta and dt_max stays within noise") {
  const auto m = make_model(3, 1.0);
  const auto pot = ball_potential(3, 1.0, 1.0);
  const auto jf = bench_f();
  auto mc = small_mc(3000);
  const auto c1 = make_fk_context(m, pot, jf, 0.04, {1.0});
  const auto c2 = make_fk_context(m, pot, jf, 0.02, {1.0});
  mc.dt_max = 2e-3;
  const auto a = capacitary_potential(c1, Point{0.6, 0, 0, 0}, 1.0, 1.0, mc);
  mc.dt_max = 1e-3;
  mc.seed = 18;
  const auto b = capacitary_potential(c2, Point{0.6, 0, 0, 0}, 1.0, 1.0, mc);
  CHECK(std::abs(a.value - b.value) < 3 * std::hypot(a.stderr_, b.stderr_));
}

TEST_CASE("translation covariance") {
  const auto m = make_model(3, 1.0);
  const Point xi{0.7, -0.4, 0.2, 0};
  const auto jf = bench_f();
  const auto c0 = make_fk_context(m, ball_potential(3, 1.0, 1.0), jf, 0.02, {1.0});
  const auto c1 = make_fk_context(m, ball_potential(3, 1.0, 1.0, xi), jf.transformed(1.0, -1.0 * xi), 0.02, {1.0});
  auto mc = small_mc(2000);
  mc.exit_radius = 40.0;
  mc.horizon = 400.0;
  const Point x{0.5, 0.5, 0, 0};
  const auto a = capacitary_potential(c0, x, 1.0, 1.0, mc);
  mc.seed = 99;
  const auto b = capacitary_potential(c1, x + xi, 1.0, 1.0, mc);
  CHECK(std::abs(a.value - b.value) < 3 * std::hypot(a.stderr_, b.stderr_));
}

TEST_CASE("tail bound shrinks with the exit radius and horizon") {
  const auto m = make_model(3, 1.0);
  const auto ctx = make_fk_context(m, ball_potential(3, 1.0, 1.0), bench_f(), 0.02, {1.0});
  CHECK(tail_bound(ctx, 1, 1, 1e9, 10.0) > tail_bound(ctx, 1, 1, 1e9, 20.0));
  CHECK(tail_bound(ctx, 1, 1, 10.0, 20.0) > tail_bound(ctx, 1, 1, 100.0, 20.0));
  const auto t = choose_tail(ctx, 1, 1, 1e-3);
  CHECK(t.bound <= 1e-3);
  CHECK(tail_bound(ctx, 0, 0, 1.0, 2.0) == 0.0);
}

TEST_CASE("explicit and Levy-system forms of E exp(-sum F) agree") {
  const auto m = make_model(3, 1.0);
  const auto jf = bench_f();
  for (double q : {1.0, 20.0}) {
    const auto ctx = make_fk_context(m, zero_potential(3), jf, 0.02, {q});
    const auto f1 = make_f_one_field(m, jf, q);
    auto mc = small_mc(1500);
    const auto g = girsanov_consistency(ctx, f1, Point{0.4, 0.2, 0, 0}, q, mc);
    MESSAGE("q=" << q << " explicit " << g.explicit_form.value << " dynkin " << g.compensator_form.value << " z "
                 << g.z_score);
    CHECK(std::abs(g.z_score) < 3.0);
    CHECK(g.explicit_form.value < 1.0);
  }
}
