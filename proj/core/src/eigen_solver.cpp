#include "homog/eigen_solver.hpp"

#include "krylov.hpp"
#include "scalar_stencil.hpp"

#include <chrono>
#include <cmath>

namespace homog {

EigenResult smallest_eigenvalue(const StaggeredGrid& grid, const Masks& masks, const SolverOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (masks.cell.size() != grid.cell_count()) throw ConfigError("masks do not match the grid");
  EigenResult res;
  res.mode = ScalarField(grid);
  SolveReport& report = res.report;
  report.method = "inverse-power";
  report.preconditioner = options.preconditioner == SolverOptions::Preconditioner::dic ? "mic" : "jacobi";
  report.tolerance = options.tol;
  auto finish = [&] {
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const std::size_t n = grid.cell_count();
  std::size_t active = 0;
  for (auto m : masks.cell) active += m ? 1 : 0;
  if (active == 0) throw ConfigError("no fluid cells");
  if (grid.periodic() && active == n) {
    res.degenerate = true;
    report.converged = true;
    const double c = 1.0 / std::sqrt(grid.domain_volume());
    std::fill(res.mode.values.begin(), res.mode.values.end(), c);
    finish();
    return res;
  }

  const detail::ScalarStencil L(grid, Vec3::Ones(), &masks.cell, true);
  const detail::LinearMap apply = [&](const detail::Vec& x, detail::Vec& y) { L.apply(x.data(), y.data()); };
  const detail::LinearMap precond = [&](const detail::Vec& r, detail::Vec& z) {
    if (options.preconditioner == SolverOptions::Preconditioner::dic)
      L.ic_solve(r.data(), z.data());
    else
      L.jacobi_solve(r.data(), z.data());
  };
  const auto& vol = L.volumes();
  auto vnorm = [&](const detail::Vec& x) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += vol[c] * x[c] * x[c];
    return std::sqrt(s);
  };

  detail::Vec x(n, 0.0), y(n, 0.0), b(n), lx(n);
  for (std::size_t c = 0; c < n; ++c) x[c] = masks.cell[c] ? 1.0 : 0.0;
  {
    const double s = vnorm(x);
    for (double& v : x) v /= s;
  }
  const double inner_tol = std::min(1e-10, 1e-2 * options.tol);
  double lambda = 0.0;
  double residual = 1.0;
  const int max_outer = std::min(options.max_iter, 500);
  for (int it = 1; it <= max_outer; ++it) {
    for (std::size_t c = 0; c < n; ++c) b[c] = masks.cell[c] ? vol[c] * x[c] : 0.0;
    const auto kr = detail::pcg(apply, precond, b, y, inner_tol, options.max_iter);
    report.extra["inner_iterations"] += kr.iterations;
    if (!kr.converged) break;
    const double s = vnorm(y);
    for (std::size_t c = 0; c < n; ++c) x[c] = y[c] / s;
    L.apply(x.data(), lx.data());
    lambda = detail::dot(x, lx);
    double r2 = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      if (masks.cell[c]) {
        const double r = lx[c] - lambda * vol[c] * x[c];
        r2 += r * r / vol[c];
      }
    residual = std::sqrt(r2) / lambda;
    report.iterations = it;
    if (residual <= options.tol) {
      report.converged = true;
      break;
    }
    // Warm start the next solve from the scaled previous iterate.
    for (std::size_t c = 0; c < n; ++c) y[c] = x[c] / lambda;
  }
  report.momentum_residual = residual;
  res.lambda = lambda;
  std::copy(x.begin(), x.end(), res.mode.values.begin());
  finish();
  if (!report.converged) throw SolveFailure("eigenvalue iteration did not converge", report);
  return res;
}

}  // namespace homog
