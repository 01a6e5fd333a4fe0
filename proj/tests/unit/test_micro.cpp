#include <doctest.h>

#include "support.hpp"

#include "homog/aniso.hpp"
#include "homog/microscale.hpp"

#include <cmath>
#include <numbers>

using namespace homog;

namespace {

PerforationConfig micro_config() {
  PerforationConfig c;
  c.epsilon = 0.5;
  c.alpha = 1.5;
  c.obstacle = Obstacle::ball(0.1);
  return c;
}

const MicroSolution& shared_micro() {
  static const MicroSolution s = solve_microscale_steady(micro_config(), default_forcing());
  return s;
}

VectorField random_field(const StaggeredGrid& grid, std::mt19937_64& g) { return test::random_vector(grid, g); }

ScalarField random_density(const StaggeredGrid& grid, std::mt19937_64& g) {
  ScalarField r(grid);
  for (auto& v : r.values) v = test::uniform(g, 0.0, 3.0);
  return r;
}

}  // namespace

TEST_SUITE("microscale_verify") {

TEST_CASE("velocity is the zero extension from the fluid") {
  const MicroSolution& m = shared_micro();
  CHECK(m.report.converged);
  std::size_t fluid = 0;
  for (int d = 0; d < 3; ++d)
    for (std::size_t f = 0; f < m.u[d].size(); ++f) {
      if (m.masks.face[static_cast<std::size_t>(d)][f])
        ++fluid;
      else
        CHECK(m.u[d][f] == 0.0);
    }
  CHECK(fluid > 0);
  const DarcyComparison self = field_errors(m.grid, m.masks, m.u, m.p, m.u, m.p);
  CHECK(self.err_u == 0.0);
  CHECK(self.err_p == 0.0);
  CHECK(self.norm_u == doctest::Approx(l2_norm(m.grid, m.u)).epsilon(1e-14));
}

TEST_CASE("energy identity of the steady proxy") {
  const MicroSolution& m = shared_micro();
  const EnergyBalance e = energy_balance(m);
  CHECK(e.work > 0.0);
  CHECK(e.relative_defect() <= 10.0 * SolverOptions{}.tol);
}

TEST_CASE("Poincare inequality on the perforated torus") {
  const MicroSolution& m = shared_micro();
  const PoincareResult pc = poincare_constant(micro_config());
  REQUIRE_FALSE(pc.degenerate);
  const EnergyBalance e = energy_balance(m);
  const double nu = m.sigma_eps * m.sigma_eps * m.config.mu;
  const double grad = std::sqrt(e.dissipation / nu);
  CHECK(l2_norm(m.grid, m.u) <= 1.1 * pc.sigma_check * grad);
}

TEST_CASE("Poincare cell eigenvalues") {
  PoincareOptions o;
  o.n = 32;
  o.core_cells = 12;
  const PoincareResult small = poincare_cell(Obstacle::ball(0.05), 1.0, o);
  const PoincareResult large = poincare_cell(Obstacle::ball(0.1), 1.0, o);
  CHECK(small.lambda_min > 0.0);
  CHECK(large.lambda_min > small.lambda_min);
  // Capacity asymptotics: lambda ~ 4 pi r for small holes.
  CHECK(std::abs(small.lambda_min / (4.0 * std::numbers::pi * 0.05) - 1.0) <= 0.25);
  const PoincareResult none = poincare_cell(Obstacle::none(), 1.0, o);
  CHECK(none.degenerate);
  CHECK(none.lambda_min == 0.0);
}

TEST_CASE("relative energy") {
  auto g = test::rng(50);
  const auto grid = StaggeredGrid::uniform(8, 1.0, DomainKind::torus3);
  for (int trial = 0; trial < 25; ++trial) {
    const ScalarField rho = random_density(grid, g);
    const ScalarField r = random_density(grid, g);
    const VectorField u = random_field(grid, g);
    const VectorField U = random_field(grid, g);
    const double sigma = test::uniform(g, 0.05, 1.0);
    CHECK(relative_energy(grid, rho, u, rho, u, sigma) == 0.0);
    CHECK(relative_energy(grid, rho, u, r, U, sigma) >= 0.0);
    // Matching velocities leave half the squared density distance.
    ScalarField diff = rho;
    for (std::size_t c = 0; c < diff.size(); ++c) diff[c] -= r[c];
    const double d2 = lp_norm(grid, diff, 2.0);
    CHECK(relative_energy(grid, rho, u, r, u, sigma) == doctest::Approx(0.5 * d2 * d2).epsilon(1e-13));
    // U = 0 with constant density reduces to a kinetic energy.
    const double c0 = test::uniform(g, 0.1, 2.0);
    const auto uc = cell_average(grid, u);
    double kinetic = 0.0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c)
      kinetic += uc[0][c] * uc[0][c] + uc[1][c] * uc[1][c] + uc[2][c] * uc[2][c];
    kinetic *= 0.5 * c0 * std::pow(sigma, 4) / static_cast<double>(grid.cell_count());
    CHECK(relative_energy(grid, ScalarField(grid, c0), u, ScalarField(grid, c0), VectorField(grid), sigma) ==
          doctest::Approx(kinetic).epsilon(1e-13));
  }
  CHECK_THROWS_AS(relative_energy(grid, ScalarField(grid, -1.0), VectorField(grid), ScalarField(grid, 1.0),
                                  VectorField(grid), 0.5),
                  ConfigError);
}

TEST_CASE("microscale preconditions") {
  PerforationConfig box = micro_config();
  box.domain = DomainKind::box3;
  CHECK_THROWS_AS(solve_microscale_steady(box, default_forcing()), ConfigError);
  PerforationConfig odd = micro_config();
  odd.epsilon = 0.3;
  CHECK_THROWS_AS(micro_grid(odd), ConfigError);
  const MicroSolution& m = shared_micro();
  CHECK_THROWS_WITH_AS(compare_to_darcy(m, Mat3::Zero()), doctest::Contains("degenerate resistance"), SolverError);
  Mat3 nan = Mat3::Identity();
  nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(compare_to_darcy(m, nan), SolverError);
  CHECK_THROWS_AS(run_micro_ladder({micro_config()}, Mat3::Identity(), default_forcing()), ConfigError);
}

TEST_CASE("Darcy reference is solenoidal") {
  const MicroSolution& m = shared_micro();
  Mat3 A = Mat3::Identity() * 0.5;
  A(0, 1) = A(1, 0) = 0.05;
  const DarcyComparison c = compare_to_darcy(m, A);
  CHECK(c.report.converged);
  CHECK(divergence_l2(m.grid, c.u_darcy) <= 1e-6 * l2_norm(m.grid, c.u_darcy));
  CHECK(c.err_u > 0.0);
  CHECK(c.norm_u > 0.0);
}

}  // TEST_SUITE
