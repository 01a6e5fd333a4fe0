#include "homog/aniso.hpp"

#include "homog/parallel.hpp"
#include "krylov.hpp"
#include "scalar_stencil.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>

namespace homog {
namespace {

using detail::Vec;

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

bool interior_face(const Axis& ax, int I) { return ax.periodic() || (I > 0 && I < ax.cells()); }

// Two-point gradients on interior faces, zero on wall faces.
VectorField face_gradient(const StaggeredGrid& grid, const std::vector<double>& p) {
  VectorField g(grid);
  for (int d = 0; d < 3; ++d) {
    const Axis& ax = grid.axis(d);
    const auto fd = grid.face_dims(d);
    par::for_slabs(fd[2], [&](int k) {
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          std::array<int, 3> hi{i, j, k};
          const int I = hi[uz(d)];
          if (!interior_face(ax, I)) continue;
          std::array<int, 3> lo = hi;
          lo[uz(d)] = I > 0 ? I - 1 : ax.cells() - 1;
          g[d][grid.face_index(d, i, j, k)] =
              (p[grid.cell_index(hi[0], hi[1], hi[2])] - p[grid.cell_index(lo[0], lo[1], lo[2])]) / ax.gap(I);
        }
    });
  }
  return g;
}

VectorField flux_from_gradient(const StaggeredGrid& grid, const Mat3& A, const VectorField& g) {
  VectorField F(grid);
  for (int d = 0; d < 3; ++d) {
    const Axis& ad = grid.axis(d);
    const auto fd = grid.face_dims(d);
    par::for_slabs(fd[2], [&](int k) {
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          const std::array<int, 3> idx{i, j, k};
          const int Id = idx[uz(d)];
          if (!interior_face(ad, Id)) continue;
          const std::size_t f = grid.face_index(d, i, j, k);
          double flux = A(d, d) * g[d][f];
          for (int e = 0; e < 3; ++e) {
            if (e == d || A(d, e) == 0.0) continue;
            const Axis& ae = grid.axis(e);
            const int ie = idx[uz(e)];
            double sum = 0.0;
            for (int Ie = ie; Ie <= ie + 1; ++Ie) {
              if (!interior_face(ae, Ie)) continue;
              std::array<int, 3> a = idx;
              a[uz(e)] = Ie % ae.cells();
              std::array<int, 3> b = a;
              a[uz(d)] = Id > 0 ? Id - 1 : ad.cells() - 1;
              b[uz(d)] = Id;
              const double G = 0.5 * (g[e][grid.face_index(e, a[0], a[1], a[2])] +
                                      g[e][grid.face_index(e, b[0], b[1], b[2])]);
              sum += ae.gap(Ie) / (2.0 * ae.width(ie)) * G;
            }
            flux += A(d, e) * sum;
          }
          F[d][f] = flux;
        }
    });
  }
  return F;
}

// Integrated divergence; wall faces contribute nothing.
void integrated_divergence(const StaggeredGrid& grid, const VectorField& F, double* out) {
  const auto cd = grid.cell_dims();
  par::for_slabs(cd[2], [&](int k) {
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) {
        const std::array<int, 3> idx{i, j, k};
        const double vol = grid.cell_volume(i, j, k);
        double s = 0.0;
        for (int d = 0; d < 3; ++d) {
          const Axis& ax = grid.axis(d);
          const double area = vol / ax.width(idx[uz(d)]);
          std::array<int, 3> up = idx;
          up[uz(d)] = idx[uz(d)] + 1;
          double fu = 0.0;
          if (up[uz(d)] < ax.cells() || ax.periodic()) {
            up[uz(d)] %= ax.cells();
            if (interior_face(ax, idx[uz(d)] + 1)) fu = F[d][grid.face_index(d, up[0], up[1], up[2])];
          }
          const double fl = interior_face(ax, idx[uz(d)]) ? F[d][grid.face_index(d, i, j, k)] : 0.0;
          s += area * (fu - fl);
        }
        out[grid.cell_index(i, j, k)] = s;
      }
  });
}

void project_mean(Vec& x) {
  const double mean = par::pairwise_sum(x) / static_cast<double>(x.size());
  for (double& v : x) v -= mean;
}

}  // namespace

void require_spd(const Mat3& A, const char* what) {
  const double scale = A.cwiseAbs().maxCoeff();
  if (!A.allFinite() || !(scale > 0.0) || (A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ConfigError(std::string(what) + " not SPD");
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(A);
  if (!(eig.eigenvalues().minCoeff() > 1e-14 * scale)) throw ConfigError(std::string(what) + " not SPD");
}

VectorField face_gradient(const StaggeredGrid& grid, const ScalarField& p) {
  if (!p.matches(grid)) throw ConfigError("pressure field does not match the grid");
  return face_gradient(grid, p.values);
}

VectorField apply_tensor(const StaggeredGrid& grid, const Mat3& A, const VectorField& g) {
  if (!g.matches(grid)) throw ConfigError("face field does not match the grid");
  return flux_from_gradient(grid, A, g);
}

VectorField aniso_flux(const StaggeredGrid& grid, const Mat3& A, const ScalarField& p) {
  if (!p.matches(grid)) throw ConfigError("pressure field does not match the grid");
  return flux_from_gradient(grid, A, face_gradient(grid, p.values));
}

AnisoSolution solve_aniso_neumann(const StaggeredGrid& grid, const Mat3& A, const VectorField& flux_rhs,
                                  const SolverOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  require_spd(A);
  if (!flux_rhs.matches(grid)) throw ConfigError("flux field does not match the grid");

  const std::size_t n = grid.cell_count();
  AnisoSolution sol;
  sol.p = ScalarField(grid);
  SolveReport& report = sol.report;
  report.method = "pcg";
  report.preconditioner = options.preconditioner == SolverOptions::Preconditioner::dic ? "mic" : "jacobi";
  report.tolerance = options.tol;

  Vec b(n);
  integrated_divergence(grid, flux_rhs, b.data());
  for (double& v : b) v = -v;
  double babs = 0.0;
  for (double v : b) babs += std::abs(v);
  const double defect = par::pairwise_sum(b);
  report.extra["compatibility_defect"] = babs > 0.0 ? std::abs(defect) / babs : 0.0;
  project_mean(b);

  const double bnorm = detail::norm(b);
  auto finish = [&] {
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  if (bnorm == 0.0) {
    report.converged = true;
    finish();
    return sol;
  }

  const detail::ScalarStencil pre(grid, A.diagonal(), nullptr, false);
  const detail::LinearMap apply = [&](const Vec& x, Vec& y) {
    const VectorField F = flux_from_gradient(grid, A, face_gradient(grid, x));
    integrated_divergence(grid, F, y.data());
    for (double& v : y) v = -v;
  };
  const detail::LinearMap precond = [&](const Vec& r, Vec& z) {
    if (options.preconditioner == SolverOptions::Preconditioner::dic)
      pre.ic_solve(r.data(), z.data());
    else
      pre.jacobi_solve(r.data(), z.data());
  };

  Vec x(n, 0.0), r(n);
  double rel = 0.0;
  double div_l2 = 0.0;
  double target = options.tol;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const auto kr = detail::pcg(apply, precond, b, x, target, options.max_iter - report.iterations, project_mean);
    report.iterations += kr.iterations;
    apply(x, r);
    for (std::size_t c = 0; c < n; ++c) r[c] = b[c] - r[c];
    rel = detail::norm(r) / bnorm;
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += r[c] * r[c] / pre.volume(c);
    div_l2 = std::sqrt(s);
    if ((rel <= options.tol && div_l2 <= options.tol) || report.iterations >= options.max_iter) break;
    target = std::max(target * 0.1, 1e-15);
  }
  report.divergence_residual = rel;
  report.divergence_l2 = div_l2;
  report.converged = rel <= options.tol;

  std::copy(x.begin(), x.end(), sol.p.values.begin());
  remove_mean(grid, sol.p);
  finish();
  if (!report.converged) throw SolveFailure("anisotropic Poisson solve did not converge", report);
  return sol;
}

}  // namespace homog
