#include "homog/stokes.hpp"

#include "homog/parallel.hpp"
#include "homog/stokes_operator.hpp"
#include "krylov.hpp"

#include <chrono>
#include <cmath>

namespace homog {
namespace {

using detail::Vec;

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

bool is_wall_face(const StaggeredGrid& grid, int d, int id) {
  const Axis& ax = grid.axis(d);
  return !ax.periodic() && (id == 0 || id == ax.cells());
}

// Euclidean projection orthogonal to the constant on fluid cells; returns
// the removed sum.
double project_cells(Vec& p, std::size_t offset, const std::vector<std::uint8_t>& mask) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < mask.size(); ++c)
    if (mask[c]) {
      sum += p[offset + c];
      ++count;
    }
  if (count == 0) return 0.0;
  const double mean = sum / static_cast<double>(count);
  for (std::size_t c = 0; c < mask.size(); ++c)
    if (mask[c]) p[offset + c] -= mean;
  return sum;
}

// Same for each velocity component (used only when constants are in the
// kernel of the velocity block).
void project_faces(Vec& u, const StokesOperator& op) {
  for (int d = 0; d < 3; ++d) {
    const std::size_t lo = op.face_offset(d);
    const std::size_t hi = op.face_offset(d + 1);
    double sum = 0.0;
    for (std::size_t f = lo; f < hi; ++f) sum += u[f];
    const double mean = sum / static_cast<double>(hi - lo);
    for (std::size_t f = lo; f < hi; ++f) u[f] -= mean;
  }
}

double weighted_cell_mean(const StokesOperator& op, const Vec& x, std::size_t offset) {
  const auto& mask = op.masks().cell;
  double s = 0.0;
  double v = 0.0;
  for (std::size_t c = 0; c < mask.size(); ++c)
    if (mask[c]) {
      s += x[offset + c] * op.cell_volume(c);
      v += op.cell_volume(c);
    }
  return v > 0.0 ? s / v : 0.0;
}

// Norm of |D| |u|: the size of the terms that cancel in the divergence.
double divergence_scale(const StokesOperator& op, const Vec& u) {
  const StaggeredGrid& grid = op.grid();
  double s = 0.0;
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    const std::size_t off = op.face_offset(d);
    s += par::sum_slabs(fd[2], [&](int k) {
      double acc = 0.0;
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          const std::array<int, 3> idx{i, j, k};
          const double area = grid.axis((d + 1) % 3).width(idx[uz((d + 1) % 3)]) *
                              grid.axis((d + 2) % 3).width(idx[uz((d + 2) % 3)]);
          const double a = area * u[off + grid.face_index(d, i, j, k)];
          acc += 2.0 * a * a;
        }
      return acc;
    });
  }
  return std::sqrt(s);
}

double segment_norm(const Vec& x, std::size_t lo, std::size_t hi) {
  return par::norm2(std::span<const double>(x.data() + lo, hi - lo));
}

struct Residuals {
  double momentum = 0.0;
  double divergence = 0.0;
};

Residuals true_residuals(const StokesOperator& op, const Vec& b, const Vec& x, const Vec& u_total) {
  const std::size_t F = op.face_total();
  const std::size_t N = op.size();
  Vec kx(N);
  op.apply(x.data(), kx.data());
  Vec r(N);
  for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - kx[i];
  Vec ax(F, 0.0);
  op.laplacian(x.data(), Vec3::Zero(), ax.data());
  Vec gp(F, 0.0);
  op.gradient(x.data() + F, gp.data());
  const double mscale = std::max({segment_norm(b, 0, F), segment_norm(ax, 0, F), segment_norm(gp, 0, F)});
  const double dscale = std::max(segment_norm(b, F, N), divergence_scale(op, u_total));
  Residuals res;
  res.momentum = mscale > 0.0 ? segment_norm(r, 0, F) / mscale : 0.0;
  res.divergence = dscale > 0.0 ? segment_norm(r, F, N) / dscale : 0.0;
  return res;
}

detail::KrylovResult solve_uzawa(const StokesOperator& op, const Vec& b, Vec& x, double tol, int max_iter,
                                 int& inner_total) {
  const std::size_t F = op.face_total();
  const std::size_t C = op.cell_total();
  const auto& cmask = op.masks().cell;
  const double nu = op.viscosity();
  const bool singular = op.velocity_singular();
  const double inner_tol = std::max(tol * 1e-2, 1e-15);

  auto apply_a = [&](const Vec& u, Vec& y) { op.laplacian(u.data(), Vec3::Zero(), y.data()); };
  auto precond_a = [&](const Vec& r, Vec& z) { op.ic_solve(r.data(), z.data()); };
  std::function<void(Vec&)> project_a;
  if (singular) project_a = [&](Vec& v) { project_faces(v, op); };

  auto solve_a = [&](const Vec& rhs, Vec& u) {
    std::fill(u.begin(), u.end(), 0.0);
    const auto r = detail::pcg(apply_a, precond_a, rhs, u, inner_tol, 20000, project_a);
    inner_total += r.iterations;
  };

  Vec bu(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(F));
  Vec bp(b.begin() + static_cast<std::ptrdiff_t>(F), b.end());
  Vec w(F), tmp(F), s_rhs(C);
  // S p = -bp - D A^-1 bu with S = D A^-1 D^T.
  solve_a(bu, w);
  op.divergence(w.data(), s_rhs.data());
  for (std::size_t c = 0; c < C; ++c) s_rhs[c] = cmask[c] ? -bp[c] - s_rhs[c] : 0.0;

  auto apply_s = [&](const Vec& p, Vec& y) {
    op.gradient(p.data(), tmp.data());
    for (double& v : tmp) v = -v;
    Vec a(F);
    solve_a(tmp, a);
    op.divergence(a.data(), y.data());
  };
  auto precond_s = [&](const Vec& r, Vec& z) {
    for (std::size_t c = 0; c < C; ++c) z[c] = cmask[c] ? nu * r[c] / op.cell_volume(c) : 0.0;
  };
  auto project_s = [&](Vec& v) { project_cells(v, 0, cmask); };

  Vec p(C, 0.0);
  const auto outer = detail::pcg(apply_s, precond_s, s_rhs, p, tol, max_iter, project_s);

  // u = A^-1 (bu + D^T p)
  op.gradient(p.data(), tmp.data());
  for (std::size_t f = 0; f < F; ++f) tmp[f] = bu[f] - tmp[f];
  solve_a(tmp, w);
  std::copy(w.begin(), w.end(), x.begin());
  std::copy(p.begin(), p.end(), x.begin() + static_cast<std::ptrdiff_t>(F));
  return outer;
}

}  // namespace

std::vector<double> flatten(const VectorField& u) {
  std::vector<double> out;
  out.reserve(u[0].size() + u[1].size() + u[2].size());
  for (int d = 0; d < 3; ++d) out.insert(out.end(), u[d].begin(), u[d].end());
  return out;
}

void unflatten(const std::vector<double>& flat, VectorField& u) {
  std::size_t off = 0;
  for (int d = 0; d < 3; ++d) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
              flat.begin() + static_cast<std::ptrdiff_t>(off + u[d].size()), u[d].begin());
    off += u[d].size();
  }
}

double gradient_inner(const StaggeredGrid& grid, const Masks& masks, const VectorField& u, const Vec3& wu,
                      const VectorField& v, const Vec3& wv) {
  const StokesOperator op(grid, masks, 1.0);
  const auto fu = flatten(u);
  const auto fv = flatten(v);
  return op.link_form(fu.data(), wu, fv.data(), wv);
}

StokesSolution solve_stokes(const StaggeredGrid& grid, const Masks& masks, double viscosity, const VectorField& force,
                            const SolverOptions& options, const DirichletData* data) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!force.matches(grid)) throw ConfigError("force does not match grid");
  if (data && !data->values[0].empty() && !data->values.matches(grid))
    throw ConfigError("Dirichlet data does not match grid");
  const StokesOperator op(grid, masks, viscosity);
  const int components = op.fluid_components();
  if (components == 0) throw ConfigError("no fluid cells");
  if (components > 1) throw ConfigError("disconnected fluid region");

  const std::size_t F = op.face_total();
  const std::size_t C = op.cell_total();
  const std::size_t N = op.size();
  const Vec3 wall = data ? data->wall_velocity : Vec3::Zero();

  SolveReport report;
  report.method = options.method == SolverOptions::Method::minres ? "minres" : "uzawa-cg";
  report.preconditioner = options.preconditioner == SolverOptions::Preconditioner::dic ? "dic" : "jacobi";
  report.tolerance = options.tol;

  // Known values on solid faces.
  Vec known(F, 0.0);
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    const auto& mask = masks.face[uz(d)];
    const std::size_t off = op.face_offset(d);
    for (int k = 0; k < fd[2]; ++k)
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          const std::size_t f = grid.face_index(d, i, j, k);
          if (mask[f]) continue;
          const std::array<int, 3> idx{i, j, k};
          if (is_wall_face(grid, d, idx[uz(d)]))
            known[off + f] = wall[d];
          else if (data && !data->values[0].empty())
            known[off + f] = data->values[d][f];
        }
  }

  Vec b(N, 0.0);
  Vec3 force_mean = Vec3::Zero();
  for (int d = 0; d < 3; ++d) {
    const std::size_t off = op.face_offset(d);
    const auto& mask = masks.face[uz(d)];
    if (op.velocity_singular()) {
      double s = 0.0;
      double v = 0.0;
      for (std::size_t f = 0; f < mask.size(); ++f) {
        s += force[d][f] * op.face_volume(off + f);
        v += op.face_volume(off + f);
      }
      force_mean[d] = s / v;
    }
    for (std::size_t f = 0; f < mask.size(); ++f)
      if (mask[f]) b[off + f] = op.face_volume(off + f) * (force[d][f] - force_mean[d]);
  }
  {
    Vec lk(F, 0.0);
    op.laplacian(known.data(), wall, lk.data());
    for (std::size_t f = 0; f < F; ++f) b[f] -= lk[f];
    Vec dk(C, 0.0);
    op.divergence(known.data(), dk.data());
    double total = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      b[F + c] = dk[c];
      total += std::abs(dk[c]);
    }
    const double removed = project_cells(b, F, masks.cell);
    report.extra["compatibility_correction"] = total > 0.0 ? std::abs(removed) / total : 0.0;
  }
  report.extra["force_mean_removed"] = force_mean.norm();

  Vec x(N, 0.0);
  const double bnorm = detail::norm(b);
  int inner_total = 0;
  if (bnorm > 0.0) {
    if (options.method == SolverOptions::Method::minres) {
      const double nu = viscosity;
      const bool dic = options.preconditioner == SolverOptions::Preconditioner::dic;
      auto apply = [&](const Vec& in, Vec& out) { op.apply(in.data(), out.data()); };
      auto precond = [&](const Vec& r, Vec& z) {
        if (dic)
          op.ic_solve(r.data(), z.data());
        else
          op.jacobi_solve(r.data(), z.data());
        for (std::size_t c = 0; c < C; ++c) z[F + c] = masks.cell[c] ? nu * r[F + c] / op.cell_volume(c) : 0.0;
      };
      // The preconditioned estimate can stop short of the true residual
      // target; restart with a tighter estimate until both agree.
      double target = 0.3 * options.tol;
      int remaining = options.max_iter;
      for (int attempt = 0; attempt < 6 && remaining > 0; ++attempt) {
        const auto r = detail::minres(apply, precond, b, x, target, remaining);
        report.iterations += r.iterations;
        remaining -= r.iterations;
        Vec u_total = x;
        u_total.resize(F);
        for (std::size_t f = 0; f < F; ++f) u_total[f] += known[f];
        const auto res = true_residuals(op, b, x, u_total);
        report.momentum_residual = res.momentum;
        report.divergence_residual = res.divergence;
        const double worst = std::max(res.momentum, res.divergence);
        if (worst <= options.tol) break;
        target = std::max(target * std::min(0.5, options.tol / worst), 1e-16);
      }
    } else {
      const auto r = solve_uzawa(op, b, x, options.tol, options.max_iter, inner_total);
      report.iterations = r.iterations;
      report.extra["inner_iterations"] = inner_total;
      Vec u_total = x;
      u_total.resize(F);
      for (std::size_t f = 0; f < F; ++f) u_total[f] += known[f];
      const auto res = true_residuals(op, b, x, u_total);
      report.momentum_residual = res.momentum;
      report.divergence_residual = res.divergence;
    }
  }

  // Gauge: mean-zero pressure, and mean-zero velocity when constants are free.
  const double pmean = weighted_cell_mean(op, x, F);
  for (std::size_t c = 0; c < C; ++c) x[F + c] = masks.cell[c] ? x[F + c] - pmean : 0.0;
  if (op.velocity_singular()) {
    for (int d = 0; d < 3; ++d) {
      const std::size_t lo = op.face_offset(d);
      const std::size_t hi = op.face_offset(d + 1);
      double s = 0.0;
      double v = 0.0;
      for (std::size_t f = lo; f < hi; ++f) {
        s += x[f] * op.face_volume(f);
        v += op.face_volume(f);
      }
      for (std::size_t f = lo; f < hi; ++f) x[f] -= s / v;
    }
  }

  StokesSolution sol{VectorField(grid), ScalarField(grid), {}};
  Vec u_total(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(F));
  for (std::size_t f = 0; f < F; ++f) u_total[f] += known[f];
  unflatten(u_total, sol.u);
  std::copy(x.begin() + static_cast<std::ptrdiff_t>(F), x.end(), sol.p.values.begin());

  report.divergence_l2 = divergence_l2(grid, sol.u, &masks.cell);
  report.converged = report.momentum_residual <= options.tol && report.divergence_residual <= options.tol;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  sol.report = report;
  if (!report.converged)
    throw SolveFailure("Stokes solve did not converge (momentum " + std::to_string(report.momentum_residual) +
                           ", divergence " + std::to_string(report.divergence_residual) + ")",
                       report);
  return sol;
}

nlohmann::json SolveReport::to_json() const {
  nlohmann::json j;
  j["method"] = method;
  j["preconditioner"] = preconditioner;
  j["iterations"] = iterations;
  j["momentum_residual"] = momentum_residual;
  j["divergence_residual"] = divergence_residual;
  j["divergence_l2"] = divergence_l2;
  j["tolerance"] = tolerance;
  j["wall_seconds"] = wall_seconds;
  j["converged"] = converged;
  for (const auto& [k, v] : extra) j[k] = v;
  return j;
}

}  // namespace homog
