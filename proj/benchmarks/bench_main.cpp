#include <benchmark/benchmark.h>

#include "stablescat/capacity.hpp"
#include "stablescat/density.hpp"
#include "stablescat/path.hpp"
#include "stablescat/scattering.hpp"
#include "stablescat/spectral.hpp"

using namespace stablescat;

namespace {

JumpFunctional shell_f() { return make_shell_functional(Profile{PhiKind::power, 2.0, 1}, 1.0, 0.5); }

void BM_DensityRadial(benchmark::State& st) {
  const auto m = make_model(int(st.range(0)), st.range(1) / 10.0);
  double r = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(density_radial(m, 1.0, r));
    r = r < 20.0 ? r * 1.3 : 0.1;
  }
}
BENCHMARK(BM_DensityRadial)->Args({3, 10})->Args({2, 5});

void BM_SimulatePath(benchmark::State& st) {
  const auto m = make_model(3, 1.0);
  const double delta = 1.0 / double(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_path(m, 1, 1.0, 50.0, delta, 1e-3, Point{}).positions.size());
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_SimulatePath)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_GammaExpression(benchmark::State& st) {
  const auto m = make_model(3, 1.0);
  const auto pb = make_scattering_problem(m, ball_potential(3, 1.0, 1.0), shell_f(), 0.02, {1.0});
  MCOptions mc;
  mc.n_paths = int(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(gamma_expression(pb, Scales{1, 1, 0}, mc).value);
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_GammaExpression)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_CapacityEquilibrium(benchmark::State& st) {
  const auto m = make_model(3, 1.0);
  const auto k = ball_set(3, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(capacity_equilibrium(m, k, int(st.range(0))).cap);
}
BENCHMARK(BM_CapacityEquilibrium)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_AssembleAndLambda1(benchmark::State& st) {
  const auto m = make_model(2, 0.5);
  const auto v = ball_potential(2, 1.0, 0.25);
  const auto f = make_shell_functional(Profile{PhiKind::power, 2.0, 1}, 0.25, 0.2);
  for (auto _ : st) {
    const auto sys = assemble(m, CubeSpec{}, v, f, Boundary::neumann_reflected, int(st.range(0)));
    benchmark::DoNotOptimize(lambda1(sys).value);
  }
}
BENCHMARK(BM_AssembleAndLambda1)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
