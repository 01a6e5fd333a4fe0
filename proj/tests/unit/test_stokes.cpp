#include <doctest.h>

#include "support.hpp"

#include "homog/aniso.hpp"
#include "homog/parallel.hpp"
#include "homog/stokes.hpp"
#include "homog/stokes_operator.hpp"

#include <cmath>
#include <numbers>

using namespace homog;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// Taylor-Green type field: divergence free, periodic on the unit torus.
Vec3 tg_velocity(const Vec3& x) {
  return {std::sin(kTau * x[1]) * std::cos(kTau * x[2]), std::sin(kTau * x[2]) * std::cos(kTau * x[0]),
          std::sin(kTau * x[0]) * std::cos(kTau * x[1])};
}

struct MmsError {
  double u = 0.0;
  double p = 0.0;
};

MmsError mms_error(int n, SolverOptions::Method method = SolverOptions::Method::minres) {
  const auto grid = StaggeredGrid::uniform(n, 1.0, DomainKind::torus3);
  const Masks masks = Masks::all_fluid(grid);
  const double nu = 0.7;
  const auto f = sample_faces(grid, [&](const Vec3& x) {
    return Vec3(nu * 2.0 * kTau * kTau * tg_velocity(x) + Vec3(kTau * std::cos(kTau * x[0]), 0.0, 0.0));
  });
  SolverOptions o;
  o.method = method;
  const auto s = solve_stokes(grid, masks, nu, f, o);
  const auto ue = sample_faces(grid, tg_velocity);
  const auto pe = sample_cells(grid, [](const Vec3& x) { return std::sin(kTau * x[0]); });
  return {l2_distance(grid, s.u, ue), l2_distance(grid, s.p, pe)};
}

Masks ball_masks(const StaggeredGrid& grid, double eps, double alpha, double r) {
  PerforationConfig c;
  c.epsilon = eps;
  c.alpha = alpha;
  c.obstacle = Obstacle::ball(r);
  return rasterize(build_perforation(c), grid);
}

}  // namespace

TEST_SUITE("stokes_core") {

TEST_CASE("manufactured solution converges at second order") {
  const MmsError a = mms_error(16);
  const MmsError b = mms_error(32);
  CHECK(std::log2(a.u / b.u) >= 1.7);
  CHECK(std::log2(a.p / b.p) >= 1.7);
  const MmsError c = mms_error(16, SolverOptions::Method::uzawa);
  CHECK(c.u == doctest::Approx(a.u).epsilon(1e-4));
}

TEST_CASE("gradient is minus the transpose of divergence on random fields") {
  auto g = test::rng(10);
  for (auto kind : {DomainKind::torus3, DomainKind::box3}) {
    for (int t = 0; t < 4; ++t) {
      // Random graded axes.
      std::array<Axis, 3> axes;
      for (int d = 0; d < 3; ++d) {
        std::vector<double> faces{0.0};
        const int n = 6 + t;
        for (int i = 0; i < n; ++i) faces.push_back(faces.back() + test::uniform(g, 0.5, 2.0));
        axes[static_cast<std::size_t>(d)] = Axis::from_faces(faces, kind == DomainKind::torus3);
      }
      const StaggeredGrid grid(axes[0], axes[1], axes[2]);
      const Masks masks = rasterize_predicate(grid, [&](const Vec3&) { return test::uniform(g, 0, 1) < 0.15; });
      const StokesOperator op(grid, masks, 1.3);
      std::vector<double> u(op.face_total()), p(op.cell_total()), gp(op.face_total()), du(op.cell_total());
      for (auto& v : u) v = test::uniform(g, -1, 1);
      for (auto& v : p) v = test::uniform(g, -1, 1);
      // Zero the solid faces so only interior fields enter.
      for (int d = 0; d < 3; ++d)
        for (std::size_t f = 0; f < grid.face_count(d); ++f)
          if (!masks.face[static_cast<std::size_t>(d)][f]) u[op.face_offset(d) + f] = 0.0;
      for (std::size_t c = 0; c < p.size(); ++c)
        if (!masks.cell[c]) p[c] = 0.0;
      op.gradient(p.data(), gp.data());
      op.divergence(u.data(), du.data());
      double lhs = 0.0, rhs = 0.0, scale = 0.0;
      for (std::size_t f = 0; f < u.size(); ++f) {
        lhs += gp[f] * u[f];
        scale += std::abs(gp[f] * u[f]);
      }
      for (std::size_t c = 0; c < p.size(); ++c) rhs -= p[c] * du[c];
      CHECK(std::abs(lhs - rhs) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("saddle operator is symmetric") {
  auto g = test::rng(11);
  const auto grid = StaggeredGrid::uniform(8, 1.0, DomainKind::box3);
  const Masks masks = rasterize_predicate(grid, [](const Vec3& x) { return (x - Vec3(0.5, 0.5, 0.5)).norm() < 0.2; });
  const StokesOperator op(grid, masks, 2.0);
  std::vector<double> x(op.size()), y(op.size()), ax(op.size()), ay(op.size());
  // Solid unknowns are Dirichlet data, not part of the operator.
  for (int d = 0; d < 3; ++d)
    for (std::size_t f = 0; f < grid.face_count(d); ++f)
      if (masks.face[static_cast<std::size_t>(d)][f]) {
        x[op.face_offset(d) + f] = test::uniform(g, -1, 1);
        y[op.face_offset(d) + f] = test::uniform(g, -1, 1);
      }
  for (std::size_t c = 0; c < op.cell_total(); ++c)
    if (masks.cell[c]) {
      x[op.face_total() + c] = test::uniform(g, -1, 1);
      y[op.face_total() + c] = test::uniform(g, -1, 1);
    }
  op.apply(x.data(), ax.data());
  op.apply(y.data(), ay.data());
  double a = 0.0, b = 0.0, s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    a += ax[i] * y[i];
    b += ay[i] * x[i];
    s += std::abs(ax[i] * y[i]);
  }
  CHECK(std::abs(a - b) <= 1e-13 * s);
}

TEST_CASE("solve invariants on a perforated torus") {
  const auto grid = StaggeredGrid::uniform(24, 1.0, DomainKind::torus3);
  const Masks masks = ball_masks(grid, 0.5, 1.2, 0.12);
  const auto f = sample_faces(grid, [](const Vec3& x) { return Vec3(1.0 + std::sin(kTau * x[1]), 0.5, std::cos(kTau * x[0])); });
  SolverOptions o;
  const auto s = solve_stokes(grid, masks, 1.0, f, o);
  CHECK(s.report.converged);
  CHECK(s.report.momentum_residual <= o.tol);
  CHECK(s.report.divergence_residual <= o.tol);
  for (int d = 0; d < 3; ++d)
    for (std::size_t i = 0; i < s.u[d].size(); ++i)
      if (!masks.face[static_cast<std::size_t>(d)][i]) CHECK(s.u[d][i] == 0.0);
  double mean = 0.0;
  for (std::size_t c = 0; c < s.p.size(); ++c)
    if (masks.cell[c]) mean += s.p[c];
  CHECK(std::abs(mean) <= 1e-10 * lp_norm(grid, s.p, 1.0));

  // Stationary energy identity: nu ||grad u||^2 = <f, u>.
  const double diss = gradient_inner(grid, masks, s.u, Vec3::Zero(), s.u, Vec3::Zero());
  const double work = inner(grid, f, s.u);
  CHECK(std::abs(diss - work) <= 10.0 * o.tol * work);
}

TEST_CASE("energy identity in a walled box") {
  const auto grid = StaggeredGrid::uniform(16, 1.0, DomainKind::box3);
  const Masks masks = Masks::all_fluid(grid);
  const auto f = sample_faces(grid, [](const Vec3& x) { return Vec3(std::sin(kTau * x[1]), x[0] * x[2], 1.0); });
  const double nu = 0.3;
  const auto s = solve_stokes(grid, masks, nu, f);
  const double diss = nu * gradient_inner(grid, masks, s.u, Vec3::Zero(), s.u, Vec3::Zero());
  CHECK(std::abs(diss - inner(grid, f, s.u)) <= 1e-7 * diss);
  // No normal flow through the walls.
  for (int d = 0; d < 3; ++d) {
    const auto dims = grid.face_dims(d);
    for (int k = 0; k < dims[2]; ++k)
      for (int j = 0; j < dims[1]; ++j)
        for (int i = 0; i < dims[0]; ++i) {
          const std::array<int, 3> idx{i, j, k};
          const int a = idx[static_cast<std::size_t>(d)];
          if (a == 0 || a == 16) CHECK(s.u[d][grid.face_index(d, i, j, k)] == 0.0);
        }
  }
}

TEST_CASE("solves are deterministic") {
  par::set_threads(1);
  const auto grid = StaggeredGrid::uniform(16, 1.0, DomainKind::torus3);
  const Masks masks = ball_masks(grid, 0.5, 1.2, 0.1);
  auto g = test::rng(12);
  const VectorField f = test::random_vector(grid, g);
  const auto a = solve_stokes(grid, masks, 1.0, f);
  const auto b = solve_stokes(grid, masks, 1.0, f);
  CHECK(a.u == b.u);
  CHECK(a.p == b.p);
  CHECK(a.report.iterations == b.report.iterations);
  par::set_threads(0);
  const auto c = solve_stokes(grid, masks, 1.0, f);
  CHECK(l2_distance(grid, a.u, c.u) <= 10.0 * 1e-8 * l2_norm(grid, a.u));
}

TEST_CASE("adding a constant to the pressure potential changes nothing") {
  const auto grid = StaggeredGrid::uniform(16, 1.0, DomainKind::torus3);
  const Masks masks = Masks::all_fluid(grid);
  auto phi = [](const Vec3& x) { return std::sin(kTau * x[0]) * std::cos(kTau * x[2]); };
  auto force = [&](double c) {
    const ScalarField pot = sample_cells(grid, [&](const Vec3& x) { return phi(x) + c; });
    VectorField f = face_gradient(grid, pot);
    const VectorField s = sample_faces(grid, tg_velocity);
    for (int d = 0; d < 3; ++d)
      for (std::size_t i = 0; i < f[d].size(); ++i) f[d][i] += s[d][i];
    return f;
  };
  const auto a = solve_stokes(grid, masks, 1.0, force(0.0));
  const auto b = solve_stokes(grid, masks, 1.0, force(123.0));
  CHECK(l2_distance(grid, a.p, b.p) <= 1e-8 * lp_norm(grid, a.p, 2.0));
  CHECK(l2_distance(grid, a.u, b.u) <= 1e-8 * l2_norm(grid, a.u));
  // The gradient part is absorbed by the pressure exactly.
  ScalarField ref = sample_cells(grid, phi);
  remove_mean(grid, ref);
  CHECK(l2_distance(grid, a.p, ref) <= 1e-7 * lp_norm(grid, ref, 2.0));
}

TEST_CASE("inhomogeneous Dirichlet data on solid faces") {
  // Uniform flow past nothing: data e_x on a solid slab keeps u = e_x.
  const auto grid = StaggeredGrid::uniform(12, 1.0, DomainKind::torus3);
  const Masks masks = rasterize_predicate(grid, [](const Vec3& x) { return std::abs(x[2] - 0.5) < 0.05; });
  DirichletData data;
  data.values = sample_faces(grid, [](const Vec3&) { return Vec3(1.0, 0.0, 0.0); });
  const auto s = solve_stokes(grid, masks, 1.0, VectorField(grid), {}, &data);
  for (std::size_t i = 0; i < s.u[0].size(); ++i) CHECK(s.u[0][i] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("error paths") {
  const auto grid = StaggeredGrid::uniform(8, 1.0, DomainKind::box3);
  const Masks split = rasterize_predicate(grid, [](const Vec3& x) { return std::abs(x[0] - 0.5) < 0.1; });
  CHECK_THROWS_WITH_AS(solve_stokes(grid, split, 1.0, VectorField(grid)), doctest::Contains("disconnected"),
                       ConfigError);
  const auto other = StaggeredGrid::uniform(6, 1.0, DomainKind::box3);
  CHECK_THROWS_AS(solve_stokes(grid, Masks::all_fluid(grid), 1.0, VectorField(other)), ConfigError);
  SolverOptions o;
  o.max_iter = 2;
  const auto f = sample_faces(grid, [](const Vec3& x) { return Vec3(std::sin(kTau * x[1]), 0.0, 0.0); });
  try {
    solve_stokes(grid, Masks::all_fluid(grid), 1.0, f, o);
    FAIL("expected a solve failure");
  } catch (const SolveFailure& e) {
    CHECK_FALSE(e.report().converged);
    CHECK(e.report().iterations == 2);
  }
}

}  // TEST_SUITE
