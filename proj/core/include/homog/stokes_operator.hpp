#pragma once

#include "homog/geometry.hpp"
#include "homog/grid.hpp"

#include <array>
#include <vector>

namespace homog {

/// Finite-volume MAC operators on a masked staggered grid, acting on flat
/// arrays: velocity components are stored back to back (x, y, z faces), then
/// cell pressures. All operators are volume-integrated, so the gradient is
/// exactly minus the transpose of the divergence.
class StokesOperator {
 public:
  /// `relaxation` blends incomplete Cholesky (0) towards modified incomplete
  /// Cholesky (1) in the velocity preconditioner.
  StokesOperator(const StaggeredGrid& grid, const Masks& masks, double viscosity, double relaxation = 0.95);

  const StaggeredGrid& grid() const { return *grid_; }
  const Masks& masks() const { return *masks_; }
  double viscosity() const { return nu_; }

  std::size_t face_offset(int d) const { return offset_[static_cast<std::size_t>(d)]; }
  std::size_t face_total() const { return offset_[3]; }
  std::size_t cell_total() const { return cells_; }
  std::size_t size() const { return offset_[3] + cells_; }

  /// out = -nu * Laplacian(u), integrated over face control volumes, on fluid
  /// faces (zero elsewhere). Values of u at solid faces are used as Dirichlet
  /// data; tangential wall ghosts carry `wall`.
  void laplacian(const double* u, const Vec3& wall, double* out) const;
  /// Integrated divergence on fluid cells (zero on solid cells).
  void divergence(const double* u, double* out) const;
  /// Integrated gradient on fluid faces (zero elsewhere).
  void gradient(const double* p, double* out) const;
  /// Symmetric saddle operator [A, G; G^T, 0] on the fluid unknowns.
  void apply(const double* x, double* y) const;

  /// Sum over all velocity links of c/nu * (u_a - u_b)(v_a - v_b): the
  /// discrete integral of grad u : grad v. Wall ghosts carry wu and wv.
  double link_form(const double* u, const Vec3& wu, const double* v, const Vec3& wv) const;

  /// Velocity block diagonal (per face, including links to solid data).
  const std::vector<double>& diagonal() const { return diag_; }
  /// Incomplete Cholesky (zero fill) on the fluid faces: z = M^-1 r.
  void ic_solve(const double* r, double* z) const;
  void jacobi_solve(const double* r, double* z) const;

  double cell_volume(std::size_t c) const { return volume_[c]; }
  double face_volume(std::size_t f) const { return face_volume_[f]; }

  /// Number of connected fluid components (cells linked through fluid faces).
  int fluid_components() const;
  /// True when every face is fluid (periodic, no holes): constants are then in
  /// the kernel of the velocity block.
  bool velocity_singular() const { return velocity_singular_; }

 private:
  // Per component d and axis e: control widths W along e and the link
  // factors 1/(W * distance) to the lower and upper neighbour. A link
  // coefficient is nu * V_face * factor.
  struct AxisLinks {
    std::vector<double> width;
    std::vector<double> lower;
    std::vector<double> upper;
    int count = 0;
    bool periodic = false;
    bool ghost = false;  // tangential wall: missing neighbours are wall ghosts
  };

  const StaggeredGrid* grid_;
  const Masks* masks_;
  double nu_;
  std::array<std::size_t, 4> offset_{};
  std::size_t cells_ = 0;
  std::array<std::array<AxisLinks, 3>, 3> links_;
  std::vector<double> diag_;
  std::vector<double> inv_pivot_;
  std::vector<double> volume_;
  std::vector<double> face_volume_;
  bool velocity_singular_ = false;
};

}  // namespace homog
