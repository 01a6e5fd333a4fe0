#include "homog/aniso.hpp"
#include "homog/darcy.hpp"
#include "homog/stokes_operator.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace homog;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// One resolved spherical obstacle, so the operators see solid faces.
Masks obstacle_masks(const StaggeredGrid& grid) {
  return rasterize_predicate(grid, [](const Vec3& x) { return (x - Vec3(0.5, 0.5, 0.5)).norm() < 0.2; });
}

std::vector<double> random_values(std::size_t n) {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = U(g);
  return v;
}

void BM_StokesApply(benchmark::State& state) {
  const auto grid = StaggeredGrid::uniform(static_cast<int>(state.range(0)), 1.0, DomainKind::torus3);
  const Masks masks = obstacle_masks(grid);
  const StokesOperator op(grid, masks, 1.0);
  const auto x = random_values(op.size());
  std::vector<double> y(op.size());
  for (auto _ : state) {
    op.apply(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(op.size()));
}
BENCHMARK(BM_StokesApply)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_IcSolve(benchmark::State& state) {
  const auto grid = StaggeredGrid::uniform(static_cast<int>(state.range(0)), 1.0, DomainKind::torus3);
  const Masks masks = obstacle_masks(grid);
  const StokesOperator op(grid, masks, 1.0);
  const auto r = random_values(op.face_total());
  std::vector<double> z(op.face_total());
  for (auto _ : state) {
    op.ic_solve(r.data(), z.data());
    benchmark::DoNotOptimize(z.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(op.face_total()));
}
BENCHMARK(BM_IcSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_AnisoFlux(benchmark::State& state) {
  const auto grid = StaggeredGrid::uniform(static_cast<int>(state.range(0)), 1.0, DomainKind::torus3);
  Mat3 A;
  A << 1.0, 0.3, 0.1, 0.3, 0.8, -0.2, 0.1, -0.2, 1.2;
  const ScalarField p = sample_cells(grid, [](const Vec3& x) { return std::sin(kTau * x[0]) * std::cos(kTau * x[1]); });
  for (auto _ : state) benchmark::DoNotOptimize(aniso_flux(grid, A, p));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(grid.cell_count()));
}
BENCHMARK(BM_AnisoFlux)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TransportStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = StaggeredGrid::uniform(n, 1.0, DomainKind::torus3);
  const ScalarField rho = sample_cells(grid, [](const Vec3& x) {
    return 1.0 + std::exp(-(x - Vec3(0.5, 0.5, 0.5)).squaredNorm() / 0.02);
  });
  const VectorField u = sample_faces(grid, [](const Vec3& x) {
    return Vec3(1.0 + 0.5 * std::sin(kTau * x[1]), 0.3 * std::cos(kTau * x[2]), 0.2);
  });
  for (auto _ : state) benchmark::DoNotOptimize(transport_step(grid, rho, u, 1.0 / n));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(grid.cell_count()));
}
BENCHMARK(BM_TransportStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
