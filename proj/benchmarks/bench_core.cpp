#include <benchmark/benchmark.h>

#include <vector>

#include "coulomb/exactpf.hpp"
#include "coulomb/geometry.hpp"
#include "coulomb/specfun.hpp"

using namespace coulomb;
using geometry::PotentialSpec;
using geometry::SurfaceSpec;

static void BM_RiemannThetaGenus1(benchmark::State& state) {
  const auto tau = specfun::PeriodMatrix::genus1(cplx(0.3, 1.7));
  const cplx z[] = {cplx(0.21, 0.4)};
  for (auto _ : state) benchmark::DoNotOptimize(specfun::riemann_theta(z, tau));
}
BENCHMARK(BM_RiemannThetaGenus1);

static void BM_RiemannThetaGenus2(benchmark::State& state) {
  const specfun::PeriodMatrix tau(2, {cplx(0.1, 1.0), cplx(0.2, 0.3), cplx(0.2, 0.3), cplx(-0.1, 1.5)});
  const cplx z[] = {cplx(0.21, 0.4), cplx(-0.3, 0.1)};
  for (auto _ : state) benchmark::DoNotOptimize(specfun::riemann_theta(z, tau));
}
BENCHMARK(BM_RiemannThetaGenus2);

static void BM_GramSphere(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = geometry::make_grid(SurfaceSpec::sphere(), 4 * n);
  const auto v = PotentialSpec::sphere_zonal(1, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(exactpf::ln_z_sphere_gram_single(n, v, grid).value);
}
BENCHMARK(BM_GramSphere)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_GreenIntegralTorus(benchmark::State& state) {
  const auto grid = geometry::make_grid(SurfaceSpec::torus(cplx(0.3, 1.7)), static_cast<int>(state.range(0)));
  const std::vector<double> f(grid->size(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(geometry::green_integral(*grid, f, cplx(0.37, 0.81)));
}
BENCHMARK(BM_GreenIntegralTorus)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_GreenIntegralSphere(benchmark::State& state) {
  const auto grid = geometry::make_grid(SurfaceSpec::sphere(), static_cast<int>(state.range(0)));
  const std::vector<double> f(grid->size(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(geometry::green_integral(*grid, f, cplx(0.37, 0.81)));
}
BENCHMARK(BM_GreenIntegralSphere)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_LaplacianTorus(benchmark::State& state) {
  const auto grid = geometry::make_grid(SurfaceSpec::torus(cplx(0, 1)), static_cast<int>(state.range(0)));
  const auto f = geometry::sample(PotentialSpec::torus_fourier({{{1, 2}, cplx(0.1, 0)}, {{-1, -2}, cplx(0.1, 0)}}), grid);
  for (auto _ : state) benchmark::DoNotOptimize(geometry::apply_laplacian(*grid, f.values));
}
BENCHMARK(BM_LaplacianTorus)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
