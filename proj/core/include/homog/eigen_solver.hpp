#pragma once

#include "homog/fields.hpp"
#include "homog/solve_report.hpp"

namespace homog {

struct EigenResult {
  double lambda = 0.0;
  /// Periodic grid without solid cells: constants are in the kernel.
  bool degenerate = false;
  /// Eigenvector normalized to unit L2 norm, zero on solid cells.
  ScalarField mode;
  SolveReport report;
};

/// Smallest eigenvalue of the discrete -Laplacian with zero values on solid
/// cells (and on the walls of a box grid), by inverse power iteration.
/// Throws SolveFailure when the iteration does not converge.
EigenResult smallest_eigenvalue(const StaggeredGrid& grid, const Masks& masks, const SolverOptions& options = {});

}  // namespace homog
