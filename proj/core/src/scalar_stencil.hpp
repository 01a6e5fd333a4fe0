#pragma once

#include "homog/grid.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace homog::detail {

// Seven-point cell-centred operator sum_e a_e * (-D_e^T D_e), integrated over
// cells. Inactive cells carry homogeneous Dirichlet data at their centres;
// wall axes are either Neumann or Dirichlet at the wall (ghost -x).
class ScalarStencil {
 public:
  ScalarStencil(const StaggeredGrid& grid, const Vec3& coeff, const std::vector<std::uint8_t>* active_mask,
                bool dirichlet_walls, double relaxation = 0.95);

  std::size_t size() const { return diag_.size(); }
  void apply(const double* x, double* y) const;
  void ic_solve(const double* r, double* z) const;
  void jacobi_solve(const double* r, double* z) const;
  bool active(std::size_t c) const { return active_.empty() || active_[c]; }
  double volume(std::size_t c) const { return volume_[c]; }
  const std::vector<double>& volumes() const { return volume_; }

 private:
  const StaggeredGrid* grid_;
  std::vector<std::uint8_t> active_;
  // Link coefficient to the lower neighbour along each axis (wrap included),
  // and to the upper neighbour.
  std::array<std::vector<double>, 3> lower_;
  std::array<std::vector<double>, 3> upper_;
  std::vector<double> diag_;
  std::vector<double> inv_pivot_;
  std::vector<double> volume_;
};

}  // namespace homog::detail
