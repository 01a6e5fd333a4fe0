#include "scalar_stencil.hpp"

#include "homog/parallel.hpp"

#include <algorithm>

namespace homog::detail {

ScalarStencil::ScalarStencil(const StaggeredGrid& grid, const Vec3& coeff, const std::vector<std::uint8_t>* active_mask,
                             bool dirichlet_walls, double relaxation)
    : grid_(&grid) {
  const auto cd = grid.cell_dims();
  const std::size_t n = grid.cell_count();
  if (active_mask) active_ = *active_mask;
  diag_.assign(n, 0.0);
  volume_.assign(n, 0.0);
  for (auto& v : lower_) v.assign(n, 0.0);
  for (auto& v : upper_) v.assign(n, 0.0);
  const std::array<std::size_t, 3> stride{1, static_cast<std::size_t>(cd[0]),
                                          static_cast<std::size_t>(cd[0]) * static_cast<std::size_t>(cd[1])};

  par::for_slabs(cd[2], [&](int k) {
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) {
        const std::size_t c = grid.cell_index(i, j, k);
        const std::array<int, 3> idx{i, j, k};
        volume_[c] = grid.cell_volume(i, j, k);
        if (!active(c)) {
          diag_[c] = 1.0;
          continue;
        }
        double diag = 0.0;
        for (int e = 0; e < 3; ++e) {
          const auto ue = static_cast<std::size_t>(e);
          const Axis& ax = grid.axis(e);
          const int m = ax.cells();
          const double area = volume_[c] / ax.width(idx[ue]);
          const int ie = idx[ue];
          // lower side: face ie
          {
            const double a = coeff[e] * area / ax.gap(ie);
            if (ie > 0 || ax.periodic()) {
              if (m > 1) {
                const std::size_t nb = ie > 0 ? c - stride[ue] : c + static_cast<std::size_t>(m - 1) * stride[ue];
                diag += a;
                if (active(nb)) lower_[ue][c] = a;
              }
            } else if (dirichlet_walls) {
              diag += a;
            }
          }
          // upper side: face ie + 1
          {
            const double a = coeff[e] * area / ax.gap(ie + 1);
            if (ie < m - 1 || ax.periodic()) {
              if (m > 1) {
                const std::size_t nb = ie < m - 1 ? c + stride[ue] : c - static_cast<std::size_t>(m - 1) * stride[ue];
                diag += a;
                if (active(nb)) upper_[ue][c] = a;
              }
            } else if (dirichlet_walls) {
              diag += a;
            }
          }
        }
        diag_[c] = diag;
      }
  });

  // Modified incomplete Cholesky in natural order; wrap links are dropped.
  inv_pivot_.assign(n, 0.0);
  std::vector<double> pivot(n, 0.0);
  for (int k = 0; k < cd[2]; ++k)
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) {
        const std::size_t c = grid.cell_index(i, j, k);
        const std::array<int, 3> idx{i, j, k};
        double d = diag_[c];
        for (int e = 0; e < 3; ++e) {
          const auto ue = static_cast<std::size_t>(e);
          if (idx[ue] == 0) continue;
          const double l = lower_[ue][c];
          if (l == 0.0) continue;
          const std::size_t lo = c - stride[ue];
          double fill = 0.0;
          for (int f = 0; f < 3; ++f) {
            const auto uf = static_cast<std::size_t>(f);
            if (f == e) continue;
            std::array<int, 3> lidx = idx;
            lidx[ue] -= 1;
            if (lidx[uf] < cd[uf] - 1) fill += upper_[uf][lo];
          }
          d -= l / pivot[lo] * (l + relaxation * fill);
        }
        if (!(d >= 0.25 * diag_[c])) d = diag_[c];
        pivot[c] = d;
        inv_pivot_[c] = 1.0 / d;
      }
}

void ScalarStencil::apply(const double* x, double* y) const {
  const auto cd = grid_->cell_dims();
  const std::array<std::size_t, 3> stride{1, static_cast<std::size_t>(cd[0]),
                                          static_cast<std::size_t>(cd[0]) * static_cast<std::size_t>(cd[1])};
  par::for_slabs(cd[2], [&](int k) {
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) {
        const std::size_t c = grid_->cell_index(i, j, k);
        const std::array<int, 3> idx{i, j, k};
        double s = diag_[c] * x[c];
        for (int e = 0; e < 3; ++e) {
          const auto ue = static_cast<std::size_t>(e);
          const std::size_t m = static_cast<std::size_t>(cd[ue]);
          const double l = lower_[ue][c];
          if (l != 0.0) s -= l * x[idx[ue] > 0 ? c - stride[ue] : c + (m - 1) * stride[ue]];
          const double u = upper_[ue][c];
          if (u != 0.0) s -= u * x[static_cast<std::size_t>(idx[ue]) + 1 < m ? c + stride[ue] : c - (m - 1) * stride[ue]];
        }
        y[c] = s;
      }
  });
}

void ScalarStencil::ic_solve(const double* r, double* z) const {
  const auto cd = grid_->cell_dims();
  const std::array<std::size_t, 3> stride{1, static_cast<std::size_t>(cd[0]),
                                          static_cast<std::size_t>(cd[0]) * static_cast<std::size_t>(cd[1])};
  const std::size_t n = diag_.size();
  for (std::size_t c = 0; c < n; ++c) {
    double s = r[c];
    const std::size_t i = c % stride[1];
    const std::size_t j = (c / stride[1]) % static_cast<std::size_t>(cd[1]);
    const std::size_t k = c / stride[2];
    if (i > 0) s += lower_[0][c] * z[c - 1];
    if (j > 0) s += lower_[1][c] * z[c - stride[1]];
    if (k > 0) s += lower_[2][c] * z[c - stride[2]];
    z[c] = s * inv_pivot_[c];
  }
  for (std::size_t c = n; c-- > 0;) {
    double s = 0.0;
    const std::size_t i = c % stride[1];
    const std::size_t j = (c / stride[1]) % static_cast<std::size_t>(cd[1]);
    const std::size_t k = c / stride[2];
    if (i + 1 < static_cast<std::size_t>(cd[0])) s += upper_[0][c] * z[c + 1];
    if (j + 1 < static_cast<std::size_t>(cd[1])) s += upper_[1][c] * z[c + stride[1]];
    if (k + 1 < static_cast<std::size_t>(cd[2])) s += upper_[2][c] * z[c + stride[2]];
    z[c] += s * inv_pivot_[c];
  }
}

void ScalarStencil::jacobi_solve(const double* r, double* z) const {
  const std::size_t n = diag_.size();
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < n; ++c) z[c] = r[c] / diag_[c];
}

}  // namespace homog::detail
