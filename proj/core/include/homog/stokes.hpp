#pragma once

#include "homog/fields.hpp"
#include "homog/geometry.hpp"
#include "homog/solve_report.hpp"

namespace homog {

/// Inhomogeneous Dirichlet data. `values` is read at solid faces only (an
/// empty field means zero); box-wall faces and tangential wall ghosts take
/// `wall_velocity`.
struct DirichletData {
  VectorField values;
  Vec3 wall_velocity = Vec3::Zero();
};

struct StokesSolution {
  VectorField u;
  ScalarField p;
  SolveReport report;
};

/// Solves -nu Lap u + grad p = f, div u = 0 on the fluid part of the grid,
/// with u prescribed on solid faces. Periodic or wall conditions follow the
/// grid kind. The returned pressure has zero mean over fluid cells.
///
/// Throws ConfigError for a disconnected fluid region and SolveFailure when
/// the iteration does not reach `options.tol`.
StokesSolution solve_stokes(const StaggeredGrid& grid, const Masks& masks, double viscosity, const VectorField& force,
                            const SolverOptions& options = {}, const DirichletData* data = nullptr);

/// Discrete integral of grad u : grad v over the whole grid (every velocity
/// link, including links to solid data and wall ghosts wu, wv).
double gradient_inner(const StaggeredGrid& grid, const Masks& masks, const VectorField& u, const Vec3& wu,
                      const VectorField& v, const Vec3& wv);

/// Flattens a face field in StokesOperator layout and back.
std::vector<double> flatten(const VectorField& u);
void unflatten(const std::vector<double>& flat, VectorField& u);

}  // namespace homog
