#pragma once

#include "homog/fields.hpp"
#include "homog/solve_report.hpp"

namespace homog {

/// Throws ConfigError("matrix not SPD") unless A is symmetric positive definite.
void require_spd(const Mat3& A, const char* what = "matrix");

/// Two-point gradient on faces; wall-normal boundary faces carry zero.
VectorField face_gradient(const StaggeredGrid& grid, const ScalarField& p);

/// A applied to a face vector field: component d keeps its own face value on
/// the diagonal and averages the transverse components over the edges that
/// bound the face. Wall-normal boundary faces carry zero.
VectorField apply_tensor(const StaggeredGrid& grid, const Mat3& A, const VectorField& g);

/// Discrete face flux A grad p = apply_tensor(A, face_gradient(p)).
VectorField aniso_flux(const StaggeredGrid& grid, const Mat3& A, const ScalarField& p);

struct AnisoSolution {
  ScalarField p;
  SolveReport report;
};

/// Solves div(A grad p) = div F with (A grad p - F).n = 0 on walls (periodic
/// on a torus grid). p has zero volume-weighted mean. The report records the
/// relative algebraic residual (divergence_residual) and ||div(F - A grad p)||
/// in L2 (divergence_l2).
AnisoSolution solve_aniso_neumann(const StaggeredGrid& grid, const Mat3& A, const VectorField& flux_rhs,
                                  const SolverOptions& options = {});

}  // namespace homog
