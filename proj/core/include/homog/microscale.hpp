#pragma once

#include "homog/fields.hpp"
#include "homog/geometry.hpp"
#include "homog/rate_fit.hpp"
#include "homog/solve_report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace homog {

using Forcing = std::function<Vec3(const Vec3&)>;

/// Grid for the perforated torus: every eps-period is graded towards a
/// uniform core around its hole.
struct MicroOptions {
  int cells_per_period = 16;
  int core_cells = 8;
  /// Uniform core width in hole diameters.
  double core_diameters = 1.6;
  int max_cells = 128;
  double min_cells_across = 4.0;
  bool strict = false;
  SolverOptions solver;
};

StaggeredGrid micro_grid(const PerforationConfig& config, const MicroOptions& options = {});

struct MicroSolution {
  PerforationConfig config;
  StaggeredGrid grid;
  Masks masks;
  VectorField g;
  VectorField u;
  ScalarField p;
  double sigma_eps = 0.0;
  SolveReport report;
};

/// Solves sigma^2 mu Lap u - grad p + g = 0, div u = 0 on the perforated
/// torus, u = 0 on the holes. Throws ConfigError for box domains and
/// under-resolved holes in strict mode.
MicroSolution solve_microscale_steady(const PerforationConfig& config, const Forcing& g,
                                      const MicroOptions& options = {});

struct DarcyComparison {
  double err_u = 0.0;
  double err_p = 0.0;
  double norm_u = 0.0;
  double norm_p = 0.0;
  VectorField u_darcy;
  ScalarField p_darcy;
  SolveReport report;
};

/// L2 distances of zero-extended velocities and of mean-zero pressures
/// (pressure over the fluid cells of `masks`).
DarcyComparison field_errors(const StaggeredGrid& grid, const Masks& masks, const VectorField& u,
                             const ScalarField& p, const VectorField& u_ref, const ScalarField& p_ref);

/// Darcy reference on the micro grid without holes: u_D = A (g - grad p_D),
/// div u_D = 0. Throws SolverError("degenerate resistance") when the micro
/// run has no holes or A is not a finite SPD matrix.
DarcyComparison compare_to_darcy(const MicroSolution& micro, const Mat3& A, const SolverOptions& options = {});

/// sigma^2 mu ||grad u||^2 and <g, u>; equal for an exact solve.
struct EnergyBalance {
  double dissipation = 0.0;
  double work = 0.0;
  double relative_defect() const;
};
EnergyBalance energy_balance(const MicroSolution& micro);

struct PoincareOptions {
  int n = 64;
  int core_cells = 16;
  /// Uniform core width in hole radii.
  double core_radii = 3.0;
  SolverOptions solver;
};

struct PoincareResult {
  double eps = 0.0;
  double alpha = 0.0;
  /// Hole size in the unit cell, a_eps / eps.
  double cell_scale = 0.0;
  double lambda_min = 0.0;
  /// eps / sqrt(lambda_min): the Poincare constant of the perforated torus.
  double sigma_check = 0.0;
  double sigma_eps = 0.0;
  bool degenerate = false;
  SolveReport report;
};

/// Smallest Dirichlet-on-hole eigenvalue on the periodic unit cell holding
/// the hole scale * T0.
PoincareResult poincare_cell(const Obstacle& obstacle, double scale, const PoincareOptions& options = {});
PoincareResult poincare_constant(const PerforationConfig& config, const PoincareOptions& options = {});

/// sigma^4 int 1/2 rho |u - U|^2 + int 1/2 (rho - r)^2 over the masked
/// cells (all cells if null), midpoint rule with cell-averaged velocities.
/// Throws ConfigError on mismatched grids or negative rho.
double relative_energy(const StaggeredGrid& grid, const ScalarField& rho, const VectorField& u, const ScalarField& r,
                       const VectorField& U, double sigma_eps, const std::vector<std::uint8_t>* mask = nullptr);

struct MicroRateRow {
  double eps = 0.0;
  double alpha = 0.0;
  double err_u = 0.0;
  double err_p = 0.0;
  double lambda_min = 0.0;
  double sigma_check = 0.0;
};

struct MicroStudy {
  std::vector<MicroRateRow> rows;
  std::vector<SolveReport> reports;
  RateReport fit_u;
  RateReport fit_p;
  /// Increases of err_u as eps decreases, not counting the first step.
  int monotone_violations = 0;
  bool pass = true;
};

/// err_u must decrease along the ladder (one violation allowed at the
/// coarsest step) with log-log slope at least `min_slope`.
MicroStudy run_micro_ladder(const std::vector<PerforationConfig>& configs, const Mat3& A, const Forcing& g,
                            const MicroOptions& options = {}, const PoincareOptions& poincare = {},
                            double min_slope = 0.2);

struct PoincareStudy {
  std::vector<PoincareResult> rows;
  RateReport fit;
  bool pass = true;
};

/// Fits sigma_check against eps; expected slope (3 - alpha) / 2.
PoincareStudy run_poincare_ladder(const std::vector<PerforationConfig>& configs, const PoincareOptions& options = {},
                                  double band = 0.2);

/// Smooth periodic forcing with both solenoidal and gradient parts.
Forcing default_forcing();

}  // namespace homog
