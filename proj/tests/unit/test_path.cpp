#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "stablescat/path.hpp"
#include "stablescat/stats.hpp"
#include "stablescat/subordination.hpp"

using namespace stablescat;

TEST_CASE("degenerate horizon gives a single point") {
  const auto m = make_model(3, 1.0);
  const Point s{0.1, 0.2, 0.3, 0};
  const auto p = simulate_path(m, 1, 0.0, 10.0, 0.1, 0.5, s);
  REQUIRE(p.times.size() == 1);
  CHECK(p.times[0] == 0.0);
  CHECK(p.positions[0] == s);
}

TEST_CASE("start outside the exit ball is a valid ledger") {
  const auto m = make_model(3, 1.0);
  const auto p = simulate_path(m, 1, 1.0, 1.0, 0.1, 0.01, Point{2, 0, 0, 0});
  CHECK(p.exited);
  CHECK(p.times.size() == 1);
}

TEST_CASE("ledger invariants and determinism") {
  const auto m = make_model(3, 1.0);
  SimulationOptions opt;
  opt.horizon = 2.0;
  opt.exit_radius = 50.0;
  opt.dt_max = 0.01;
  opt.truncation.delta_near = 0.05;
  opt.truncation.active = {Ball{{}, 1.0}};
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto p = simulate_path(m, 9, k, opt);
    const auto q = simulate_path(m, 9, k, opt);
    REQUIRE(p.times == q.times);
    REQUIRE(p.positions == q.positions);
    CHECK(p.times.front() == 0.0);
    for (std::size_t i = 1; i < p.times.size(); ++i) REQUIRE(p.times[i] > p.times[i - 1]);
    for (const auto& j : p.jumps) {
      CHECK(j.time > 0.0);
      CHECK(j.time <= opt.horizon);
      CHECK(distance(j.pre, j.post) > opt.truncation.delta_near);
    }
    if (!p.exited) CHECK(p.end_time() == opt.horizon);
  }
}

TEST_CASE("ledger binary round trip") {
  const auto m = make_model(2, 0.5);
  const auto p = simulate_path(m, 3, 1.0, 100.0, 0.05, 0.01, Point{});
  std::stringstream ss;
  write_ledger(ss, p);
  const auto q = read_ledger(ss);
  CHECK(q.times == p.times);
  CHECK(q.positions == p.positions);
  REQUIRE(q.jumps.size() == p.jumps.size());
  for (std::size_t i = 0; i < p.jumps.size(); ++i) CHECK(q.jumps[i].pre == p.jumps[i].pre);
}

TEST_CASE("big jump counts are Poisson") {
  const auto m = make_model(3, 1.0);
  const double delta = 0.2, T = 1.0;
  const int n = 10000;
  std::vector<double> counts(n);
  for (int k = 0; k < n; ++k) {
    SimulationOptions opt;
    opt.horizon = T;
    opt.dt_max = 0.05;
    opt.truncation.delta_near = delta;
    counts[std::size_t(k)] = double(simulate_path(m, 17, std::uint64_t(k), opt).jumps.size());
  }
  const double lam = big_jump_rate(m, delta) * T;
  CHECK(std::abs(mean_stderr(counts).mean - lam) < 3.0 * std::sqrt(lam / n));
}

TEST_CASE("positive stable Laplace transform") {
  Rng rng(11, 0);
  const int n = 100000;
  for (double a : {0.25, 0.5, 0.75}) {
    std::vector<double> v(n);
    for (auto& x : v) x = std::exp(-2.0 * sample_positive_stable(rng, a));
    const auto ms = mean_stderr(v);
    CHECK(std::abs(ms.mean - std::exp(-std::pow(2.0, a))) < 4 * ms.stderr_);
  }
}

TEST_CASE("exact sampler matches the Cauchy radial law") {
  // |X_1| for the d=3 Cauchy law has CDF (2/pi)(atan r - r/(1+r^2))
  const auto m = make_model(3, 1.0);
  Rng rng(4, 0);
  const int n = 40000;
  int below = 0;
  for (int i = 0; i < n; ++i) below += norm(sample_stable_exact(m, rng, 1.0)) < 1.0;
  const double p = 2.0 / M_PI * (M_PI / 4 - 0.5);
  CHECK(std::abs(below / double(n) - p) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("path marginal at t=1 matches exact subordination samples") {
  const auto m = make_model(3, 1.0);
  const int n = 20000;
  std::vector<double> a(n), b(n);
  Rng rng(6, 0);
  for (int k = 0; k < n; ++k) {
    SimulationOptions o;
    o.horizon = 1.0;
    o.dt_max = 0.01;
    o.truncation.delta_near = 0.01;
    a[std::size_t(k)] = norm(simulate_path(m, 5, std::uint64_t(k), o).positions.back());
    b[std::size_t(k)] = norm(sample_stable_exact(m, rng, 1.0));
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("mean exit time matches the exact-increment simulator") {
  const auto m = make_model(3, 1.0);
  const int n = 10000;
  std::vector<double> e1(n), e2(n);
  Rng rng(8, 0);
  for (int k = 0; k < n; ++k) {
    SimulationOptions o;
    o.horizon = 100.0;
    o.exit_radius = 1.0;
    o.dt_max = 1e-3;
    o.truncation.delta_near = 0.01;
    e1[std::size_t(k)] = simulate_path(m, 7, std::uint64_t(k), o).end_time();
    e2[std::size_t(k)] = exit_time_exact_grid(m, rng, 1.0, Point{}, 1e-3, 100.0);
  }
  const auto s1 = mean_stderr(e1), s2 = mean_stderr(e2);
  CHECK(std::abs(s1.mean - s2.mean) < 3.0 * std::hypot(s1.stderr_, s2.stderr_));
  CHECK(std::abs(s1.mean - mean_exit_time_ball(m, 1.0)) < 3.0 * s1.stderr_ + 0.005);
}

TEST_CASE("isotropy of exit positions") {
  const auto m = make_model(3, 1.0);
  const int n = 6000, bins = 8;
  const Point s1{0.5, 0, 0, 0}, s2{0, 0.3, 0.4, 0};
  std::vector<std::vector<double>> table(2, std::vector<double>(bins, 0.0));
  for (int c = 0; c < 2; ++c) {
    const Point s = c == 0 ? s1 : s2;
    const Point dir = (1.0 / norm(s)) * s;
    for (int k = 0; k < n; ++k) {
      SimulationOptions o;
      o.horizon = 100.0;
      o.exit_radius = 1.0;
      o.dt_max = 2e-3;
      o.truncation.delta_near = 0.02;
      o.start = s;
      const auto p = simulate_path(m, 21, std::uint64_t(k + c * n), o);
      const Point x = p.positions.back();
      const double cosang = dot(x, dir) / norm(x);
      const int b = std::min(bins - 1, int((cosang + 1.0) * 0.5 * bins));
      table[std::size_t(c)][std::size_t(b)] += 1.0;
    }
  }
  CHECK(chi_square_homogeneity(table).p_value > 0.01);
}

TEST_CASE("self-similarity of marginals") {
  const auto m = make_model(2, 0.5);
  const int n = 8000;
  std::vector<double> a(n), b(n);
  for (int k = 0; k < n; ++k) {
    SimulationOptions o;
    o.dt_max = 0.01;
    o.truncation.delta_near = 0.005;
    o.horizon = 0.5;
    // X_1 = 2^{1/alpha} X_{1/2} in law, 2^{1/alpha} = 4
    a[std::size_t(k)] = 4.0 * norm(simulate_path(m, 31, std::uint64_t(k), o).positions.back());
    o.horizon = 1.0;
    b[std::size_t(k)] = norm(simulate_path(m, 32, std::uint64_t(k), o).positions.back());
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
}
