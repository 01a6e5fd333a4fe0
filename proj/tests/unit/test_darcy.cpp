#include <doctest.h>

#include "support.hpp"

#include "homog/darcy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

using namespace homog;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

Mat3 test_tensor() {
  Mat3 A;
  A << 1.0, 0.2, 0.0, 0.2, 0.7, 0.1, 0.0, 0.1, 1.3;
  return A;
}

ScalarField blob(const StaggeredGrid& grid, double background) {
  return sample_cells(grid, [&](const Vec3& x) {
    return background + std::exp(-(x - Vec3(0.5, 0.5, 0.5)).squaredNorm() / (2.0 * 0.12 * 0.12));
  });
}

// A force that is not a gradient, so the projection leaves a flow.
ForceField swirl() {
  return ForceField::analytic([](double t, const Vec3& x) {
    return Vec3(1.0 + 0.5 * std::sin(kTau * x[1]), 0.3 * std::cos(kTau * x[2] + t), 0.2);
  });
}

double max_of(const ScalarField& f) { return *std::max_element(f.values.begin(), f.values.end()); }
double min_of(const ScalarField& f) { return *std::min_element(f.values.begin(), f.values.end()); }

void check_invariants(const Trajectory& traj, double tol) {
  const auto& L = traj.ledger;
  REQUIRE(L.size() == static_cast<std::size_t>(traj.steps + 1));
  for (std::size_t n = 1; n < L.size(); ++n) {
    CHECK(std::abs(L[n].mass - L[0].mass) <= 1e-10 * std::abs(L[0].mass));
    CHECK(L[n].max <= L[n - 1].max);
    CHECK(L[n].min >= L[n - 1].min);
    CHECK(L[n].min >= 0.0);
  }
  for (const auto& row : L) CHECK(row.div_l2 <= 10.0 * tol);
}

}  // namespace

TEST_SUITE("darcy_solver") {

TEST_CASE("transport invariants on random runs") {
  auto g = test::rng(40);
  for (int trial = 0; trial < 4; ++trial) {
    const DomainKind kind = trial % 2 ? DomainKind::box3 : DomainKind::torus3;
    const auto grid = StaggeredGrid::uniform(12, 1.0, kind);
    ScalarField rho(grid);
    for (auto& v : rho.values) v = test::uniform(g, 0.0, 2.0);
    const Vec3 c(test::uniform(g, -1, 1), test::uniform(g, -1, 1), test::uniform(g, -1, 1));
    const ForceField f = ForceField::analytic([c](double, const Vec3& x) {
      return Vec3(c[0] + std::sin(kTau * x[1]), c[1] * std::cos(kTau * x[0]), c[2] + x[0] * x[1]);
    });
    DarcyOptions o;
    const Trajectory traj = run_darcy(grid, rho, f, test_tensor(), 0.2, 0.05, o);
    check_invariants(traj, o.solver.tol);
  }
}

TEST_CASE("walls carry no normal velocity") {
  const auto grid = StaggeredGrid::uniform(12, 1.0, DomainKind::box3);
  const Trajectory traj = run_darcy(grid, blob(grid, 0.5), swirl(), test_tensor(), 0.1, 0.05);
  for (const auto& s : traj.states)
    for (int d = 0; d < 3; ++d) {
      const auto fd = grid.face_dims(d);
      for (int k = 0; k < fd[2]; ++k)
        for (int j = 0; j < fd[1]; ++j)
          for (int i = 0; i < fd[0]; ++i) {
            const std::array<int, 3> idx{i, j, k};
            const int a = idx[static_cast<std::size_t>(d)];
            if (a == 0 || a == grid.axis(d).cells()) CHECK(s.u[d][grid.face_index(d, i, j, k)] == 0.0);
          }
    }
}

TEST_CASE("velocity is a function of the stored density") {
  const auto grid = StaggeredGrid::uniform(12, 1.0, DomainKind::torus3);
  const ForceField f = swirl();
  const Trajectory traj = run_darcy(grid, blob(grid, 1.0), f, test_tensor(), 0.15, 0.05);
  for (const auto& s : traj.states) {
    const VectorField fs = f.sample(grid, s.t);
    const auto p = pressure_solve(grid, s.rho, fs, test_tensor());
    CHECK(p.p.values == s.p.values);
    CHECK(assemble_velocity(grid, s.rho, fs, p.p, test_tensor()) == s.u);
  }
}

TEST_CASE("timestamps are uniform and end at T") {
  const auto grid = StaggeredGrid::uniform(8, 1.0, DomainKind::torus3);
  DarcyOptions o;
  o.stride = 2;
  const Trajectory traj = run_darcy(grid, ScalarField(grid, 1.0), ForceField::zero(), Mat3::Identity(), 0.1, 0.03, o);
  CHECK(traj.steps == 4);
  CHECK(traj.dt == doctest::Approx(0.025).epsilon(1e-15));
  REQUIRE(traj.states.size() == 3);
  for (std::size_t i = 0; i < traj.states.size(); ++i) CHECK(traj.states[i].t == 2.0 * static_cast<double>(i) * traj.dt);
  CHECK(traj.states.back().t == doctest::Approx(0.1).epsilon(1e-15));
  for (std::size_t n = 0; n < traj.ledger.size(); ++n) CHECK(traj.ledger[n].t == static_cast<double>(n) * traj.dt);
}

TEST_CASE("degenerate densities") {
  const auto grid = StaggeredGrid::uniform(12, 1.0, DomainKind::torus3);
  SUBCASE("vacuum stays frozen") {
    const Trajectory traj = run_darcy(grid, ScalarField(grid, 0.0), swirl(), test_tensor(), 0.1, 0.05);
    for (const auto& s : traj.states) {
      for (double v : s.rho.values) CHECK(v == 0.0);
      CHECK(l2_norm(grid, s.u) == 0.0);
    }
  }
  SUBCASE("constant density stays exactly one") {
    const Trajectory traj = run_darcy(grid, ScalarField(grid, 1.0), swirl(), test_tensor(), 0.2, 0.05);
    for (const auto& s : traj.states)
      for (double v : s.rho.values) CHECK(v == 1.0);
  }
}

TEST_CASE("conservative forces produce no flow") {
  const auto grid = StaggeredGrid::uniform(16, 1.0, DomainKind::torus3);
  const ScalarField phi = sample_cells(grid, [](const Vec3& x) {
    return std::sin(kTau * x[0]) * std::cos(kTau * x[1]) + 0.3 * std::sin(kTau * x[2]);
  });
  const VectorField grad = face_gradient(grid, phi);
  const double c = 2.5;
  const auto p = pressure_solve(grid, ScalarField(grid, c), grad, test_tensor());
  const VectorField u = assemble_velocity(grid, ScalarField(grid, c), grad, p.p, test_tensor());
  CHECK(l2_norm(grid, u) <= 1e-6 * c * l2_norm(grid, grad));
}

TEST_CASE("adding a discrete gradient leaves the velocity unchanged") {
  const auto grid = StaggeredGrid::uniform(16, 1.0, DomainKind::torus3);
  const VectorField f = swirl().sample(grid, 0.3);
  const ScalarField psi = sample_cells(grid, [](const Vec3& x) { return std::cos(kTau * (x[0] + x[2])); });
  const VectorField gpsi = face_gradient(grid, psi);
  VectorField shifted = f;
  for (int d = 0; d < 3; ++d)
    for (std::size_t i = 0; i < f[d].size(); ++i) shifted[d][i] += gpsi[d][i];
  const ScalarField rho(grid, 1.7);
  const auto p1 = pressure_solve(grid, rho, f, test_tensor());
  const auto p2 = pressure_solve(grid, rho, shifted, test_tensor());
  const VectorField u1 = assemble_velocity(grid, rho, f, p1.p, test_tensor());
  const VectorField u2 = assemble_velocity(grid, rho, shifted, p2.p, test_tensor());
  CHECK(l2_distance(grid, u1, u2) <= 1e-6 * l2_norm(grid, u1));
}

TEST_CASE("semi-Lagrangian transport") {
  const auto grid = StaggeredGrid::uniform(16, 1.0, DomainKind::torus3);
  auto g = test::rng(41);
  ScalarField rho(grid);
  for (auto& v : rho.values) v = test::uniform(g, 0.0, 1.0);
  CHECK(transport_step(grid, rho, VectorField(grid), 0.1).values == rho.values);
  // A uniform velocity moving one cell per step is an exact shift.
  const VectorField u = sample_faces(grid, [](const Vec3&) { return Vec3(1.0, 0.0, -1.0); });
  const ScalarField moved = transport_step(grid, rho, u, 1.0 / 16.0);
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i)
        CHECK(moved[grid.cell_index(i, j, k)] == rho[grid.cell_index((i + 15) % 16, j, (k + 1) % 16)]);
  CHECK(cfl_number(grid, u, 1.0 / 16.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(transport_step(grid, rho, u, 1.0), ConfigError);
  VectorField bad = u;
  bad[1][7] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(transport_step(grid, rho, bad, 0.01), SolverError);
}

TEST_CASE("mass fixer keeps bounds") {
  auto g = test::rng(42);
  const auto grid = StaggeredGrid::uniform(10, 1.0, DomainKind::torus3);
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField rho(grid);
    for (auto& v : rho.values) v = test::uniform(g, 0.2, 1.8);
    const double lo = min_of(rho);
    const double hi = max_of(rho);
    const double mass = integrate(grid, rho) * test::uniform(g, 0.98, 1.02);
    const double corr = fix_mass(grid, rho, mass, lo, hi);
    CHECK(corr <= 0.03);
    CHECK(std::abs(integrate(grid, rho) - mass) <= 1e-13 * mass);
    CHECK(min_of(rho) >= lo);
    CHECK(max_of(rho) <= hi);
  }
}

TEST_CASE("force frames") {
  const auto grid = StaggeredGrid::uniform(6, 1.0, DomainKind::torus3);
  const VectorField a = sample_faces(grid, [](const Vec3&) { return Vec3(1.0, 0.0, 0.0); });
  const VectorField b = sample_faces(grid, [](const Vec3&) { return Vec3(3.0, 2.0, 0.0); });
  const ForceField f = ForceField::frames({0.0, 1.0}, {a, b});
  CHECK(f.covers(0.0, 1.0));
  CHECK_FALSE(f.covers(0.0, 1.5));
  const VectorField mid = f.sample(grid, 0.25);
  for (double v : mid[0]) CHECK(v == doctest::Approx(1.5));
  for (double v : mid[1]) CHECK(v == doctest::Approx(0.5));
  CHECK(f.sample(grid, 1.0) == b);
  CHECK_THROWS_AS(f.sample(grid, 1.5), ConfigError);
  CHECK_THROWS_AS(ForceField::frames({0.0, 0.0}, {a, b}), ConfigError);
  CHECK_THROWS_AS(ForceField::frames({0.0}, {a, b}), ConfigError);
  CHECK_THROWS_AS(run_darcy(grid, ScalarField(grid, 1.0), f, Mat3::Identity(), 2.0, 0.5), ConfigError);
  const ForceField nan = ForceField::analytic(
      [](double, const Vec3&) { return Vec3(std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0); });
  CHECK_THROWS_AS(nan.sample(grid, 0.0), ConfigError);
  CHECK(ForceField::zero().is_zero());
}

TEST_CASE("run preconditions and failures") {
  const auto grid = StaggeredGrid::uniform(8, 1.0, DomainKind::torus3);
  const ScalarField rho = blob(grid, 1.0);
  CHECK_THROWS_AS(run_darcy(grid, rho, swirl(), Mat3::Identity(), 0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(run_darcy(grid, rho, swirl(), Mat3::Identity(), 1.0, -0.1), ConfigError);
  CHECK_THROWS_AS(run_darcy(grid, rho, swirl(), -Mat3::Identity(), 1.0, 0.1), ConfigError);
  ScalarField neg = rho;
  neg[3] = -0.1;
  CHECK_THROWS_AS(run_darcy(grid, neg, swirl(), Mat3::Identity(), 1.0, 0.1), ConfigError);
  DarcyOptions o;
  o.solver.max_iter = 1;
  try {
    run_darcy(grid, rho, swirl(), test_tensor(), 0.2, 0.1, o);
    FAIL("expected a run failure");
  } catch (const DarcyRunFailure& e) {
    CHECK(e.partial().failed_step == 0);
    CHECK_FALSE(e.partial().failure.empty());
  }
}

TEST_CASE("Picard iteration keeps the invariants") {
  const auto grid = StaggeredGrid::uniform(12, 1.0, DomainKind::torus3);
  DarcyOptions o;
  o.picard = true;
  o.picard_tol = 1e-9;
  const Trajectory traj = run_darcy(grid, blob(grid, 0.2), swirl(), test_tensor(), 0.1, 0.05, o);
  check_invariants(traj, o.solver.tol);
  for (std::size_t n = 0; n + 1 < traj.ledger.size(); ++n) {
    CHECK(traj.ledger[n].picard_iterations >= 1);
    CHECK(traj.ledger[n].picard_iterations <= o.picard_max);
  }
}

TEST_CASE("conservation report") {
  const auto grid = StaggeredGrid::uniform(12, 1.0, DomainKind::torus3);
  const Trajectory traj = run_darcy(grid, blob(grid, 0.5), swirl(), test_tensor(), 0.1, 0.05);
  const auto rows = conservation_report(traj, {2.0});
  REQUIRE(rows.size() == traj.ledger.size());
  CHECK(rows[0].mass_drift == 0.0);
  CHECK(rows[0].lq_drift[0] == 0.0);
  for (const auto& r : rows) CHECK(std::abs(r.mass_drift) <= 1e-10);
  CHECK_THROWS_AS(conservation_report(traj, {3.0}), ConfigError);
  CHECK_THROWS_AS(conservation_report(Trajectory{}, {2.0}), ConfigError);
}

TEST_CASE("ledger norms") {
  const auto grid = StaggeredGrid::uniform(8, 1.0, DomainKind::torus3);
  const LedgerRow row = measure(grid, ScalarField(grid, 2.0), {2.0, 4.0});
  CHECK(row.mass == doctest::Approx(2.0));
  CHECK(row.l2 == doctest::Approx(2.0));
  CHECK(row.lq[1] == doctest::Approx(2.0));
  CHECK(row.h1 == doctest::Approx(2.0));
  CHECK(h2_norm(grid, ScalarField(grid, 2.0)) == doctest::Approx(2.0));
}

}  // TEST_SUITE
