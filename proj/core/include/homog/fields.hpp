#pragma once

#include "homog/geometry.hpp"
#include "homog/grid.hpp"

#include <array>
#include <functional>
#include <vector>

namespace homog {

/// Cell-centred values (pressure, density).
struct ScalarField {
  std::array<int, 3> dims{0, 0, 0};
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const StaggeredGrid& grid, double fill = 0.0)
      : dims(grid.cell_dims()), values(grid.cell_count(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
  bool matches(const StaggeredGrid& grid) const { return dims == grid.cell_dims(); }
  bool operator==(const ScalarField&) const = default;
};

/// Face-centred vector field: component d lives on faces normal to axis d.
struct VectorField {
  std::array<std::array<int, 3>, 3> dims{};
  std::array<std::vector<double>, 3> comp;

  VectorField() = default;
  explicit VectorField(const StaggeredGrid& grid, double fill = 0.0) {
    for (int d = 0; d < 3; ++d) {
      dims[static_cast<std::size_t>(d)] = grid.face_dims(d);
      comp[static_cast<std::size_t>(d)].assign(grid.face_count(d), fill);
    }
  }

  std::vector<double>& operator[](int d) { return comp[static_cast<std::size_t>(d)]; }
  const std::vector<double>& operator[](int d) const { return comp[static_cast<std::size_t>(d)]; }
  bool matches(const StaggeredGrid& grid) const {
    for (int d = 0; d < 3; ++d)
      if (dims[static_cast<std::size_t>(d)] != grid.face_dims(d)) return false;
    return true;
  }
  bool operator==(const VectorField&) const = default;
};

/// Samples f at cell centres.
ScalarField sample_cells(const StaggeredGrid& grid, const std::function<double(const Vec3&)>& f);
/// Samples component d of f at the centres of faces normal to d.
VectorField sample_faces(const StaggeredGrid& grid, const std::function<Vec3(const Vec3&)>& f);

/// Volume-weighted integral over cells where `mask` is set (all cells if empty).
double integrate(const StaggeredGrid& grid, const ScalarField& f, const std::vector<std::uint8_t>* mask = nullptr);
/// (integral |f|^p)^(1/p) over cells; p = infinity gives the max norm.
double lp_norm(const StaggeredGrid& grid, const ScalarField& f, double p, const std::vector<std::uint8_t>* mask = nullptr);
/// Discrete L2 norm of a face field, each component weighted by its control volume.
double l2_norm(const StaggeredGrid& grid, const VectorField& u);
/// L2 norm of a - b.
double l2_distance(const StaggeredGrid& grid, const VectorField& a, const VectorField& b);
double l2_distance(const StaggeredGrid& grid, const ScalarField& a, const ScalarField& b,
                   const std::vector<std::uint8_t>* mask = nullptr);
/// Volume-weighted inner product of two face fields.
double inner(const StaggeredGrid& grid, const VectorField& a, const VectorField& b);
double inner(const StaggeredGrid& grid, const ScalarField& a, const ScalarField& b);

/// Subtracts the volume-weighted mean over masked cells; returns the mean removed.
double remove_mean(const StaggeredGrid& grid, ScalarField& f, const std::vector<std::uint8_t>* mask = nullptr);

/// Cell-centred velocity (average of the two faces along each axis).
std::array<ScalarField, 3> cell_average(const StaggeredGrid& grid, const VectorField& u);

/// Velocity gradient at cell centres, entry 3 * d + e = d u_d / d x_e. Normal
/// derivatives use the two faces of the cell; transverse ones use central
/// differences of the cell averages (one-sided next to walls).
std::array<ScalarField, 9> cell_gradient(const StaggeredGrid& grid, const VectorField& u);

/// Trilinear interpolation of a cell-centred field at x (periodic wrap, or
/// clamping to the outermost centres on wall axes).
double interpolate(const StaggeredGrid& grid, const ScalarField& f, const Vec3& x);
/// Trilinear interpolation of each staggered component at x.
Vec3 interpolate(const StaggeredGrid& grid, const VectorField& u, const Vec3& x);

/// Cell-centred L2 norm of the discrete divergence.
double divergence_l2(const StaggeredGrid& grid, const VectorField& u, const std::vector<std::uint8_t>* mask = nullptr);
/// Discrete divergence at cell centres.
ScalarField divergence(const StaggeredGrid& grid, const VectorField& u);

}  // namespace homog
