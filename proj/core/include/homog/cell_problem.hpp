#pragma once

#include "homog/fields.hpp"
#include "homog/geometry.hpp"
#include "homog/solve_report.hpp"

#include <json.hpp>

#include <array>
#include <vector>

namespace homog {

/// Grid for the truncated exterior problem on [-R, R]^3: a uniform core of
/// `core_cells` cells on [-core_half, core_half] around the obstacle, then
/// geometric stretching out to the truncation box.
struct CellOptions {
  int n = 96;
  double core_half = 0.16;
  int core_cells = 32;
  /// Minimum number of core cells across the obstacle diameter.
  double min_cells_across = 8.0;
  /// Solve one direction and permute it when the obstacle and the rasterized
  /// masks are invariant under axis permutations.
  bool use_symmetry = true;
  SolverOptions solver;
};

/// Velocities v^i (far field e^i) and pressures q^i of the cell problem on
/// B_R \ T0.
struct CellSolution {
  Obstacle obstacle;
  double R = 0.0;
  int n = 0;
  StaggeredGrid grid;
  Masks masks;
  std::array<VectorField, 3> v;
  std::array<ScalarField, 3> q;
  std::array<SolveReport, 3> reports;
  bool permuted = false;
};

StaggeredGrid cell_grid(double R, const CellOptions& options);

/// Throws ConfigError when R < 2, the obstacle leaves B(0, 1/8), or the core
/// does not resolve it; SolveFailure from the Stokes solves.
CellSolution solve_cell(const Obstacle& obstacle, double R, const CellOptions& options = {});

struct ResistanceMatrix {
  Mat3 M0 = Mat3::Zero();
  Mat3 A = Mat3::Zero();
  double mu = 1.0;
  /// max |M - M^T| / max |M| before symmetrization.
  double asymmetry = 0.0;
  std::string obstacle;
  std::vector<double> R_values;
  std::vector<int> n_values;
  /// Relative RMS residual of the 1/R fit (0 for a single solve).
  double extrapolation_residual = 0.0;
  /// Raw matrices per truncation radius.
  std::vector<Mat3> samples;

  nlohmann::json to_json() const;
  static ResistanceMatrix from_json(const nlohmann::json& j);
};

/// Symmetrizes M, records the asymmetry and attaches A = (mu M)^-1. Throws
/// SolverError("degenerate obstacle") when M is numerically zero or not
/// positive definite.
ResistanceMatrix make_resistance(const Mat3& M, double mu);

/// M_ij = integral of grad v^i : grad v^j over the truncated fluid region.
Mat3 resistance_integral(const CellSolution& sol);
ResistanceMatrix compute_M0(const CellSolution& sol, double mu = 1.0);

/// Least-squares fit M(R) = M_inf + c / R per entry. Needs at least three radii
/// and diagonal entries that do not increase with R.
ResistanceMatrix extrapolate_M0(const std::vector<double>& R_values, const std::vector<Mat3>& samples, double mu);
/// Runs the cell solves for every radius (n_values: one entry, or one per R).
ResistanceMatrix extrapolate_M0(const Obstacle& obstacle, const std::vector<double>& R_values,
                                const std::vector<int>& n_values, double mu, CellOptions options = {});

}  // namespace homog
