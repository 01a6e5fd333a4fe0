#include "homog/stokes_operator.hpp"

#include "homog/parallel.hpp"

#include <algorithm>
#include <queue>

namespace homog {
namespace {

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

}  // namespace

StokesOperator::StokesOperator(const StaggeredGrid& grid, const Masks& masks, double viscosity, double relaxation)
    : grid_(&grid), masks_(&masks), nu_(viscosity) {
  if (!(viscosity > 0.0)) throw ConfigError("viscosity must be positive");
  if (masks.cell.size() != grid.cell_count()) throw ConfigError("masks do not match grid");
  offset_[0] = 0;
  for (int d = 0; d < 3; ++d) {
    if (masks.face[uz(d)].size() != grid.face_count(d)) throw ConfigError("masks do not match grid");
    offset_[uz(d) + 1] = offset_[uz(d)] + grid.face_count(d);
  }
  cells_ = grid.cell_count();

  const auto cd = grid.cell_dims();
  volume_.resize(cells_);
  par::for_slabs(cd[2], [&](int k) {
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) volume_[grid.cell_index(i, j, k)] = grid.cell_volume(i, j, k);
  });

  for (int d = 0; d < 3; ++d)
    for (int e = 0; e < 3; ++e) {
      const Axis& ax = grid.axis(e);
      const int n = ax.cells();
      AxisLinks& L = links_[uz(d)][uz(e)];
      L.periodic = ax.periodic();
      L.ghost = !ax.periodic() && e != d;
      L.count = e == d ? ax.face_count() : n;
      L.width.resize(uz(L.count));
      L.lower.assign(uz(L.count), 0.0);
      L.upper.assign(uz(L.count), 0.0);
      for (int i = 0; i < L.count; ++i) {
        const std::size_t s = uz(i);
        if (e == d) {
          const double W = ax.gap(i);
          L.width[s] = W;
          if (ax.periodic()) {
            L.lower[s] = 1.0 / (W * ax.width((i + n - 1) % n));
            L.upper[s] = 1.0 / (W * ax.width(i));
          } else {
            if (i > 0) L.lower[s] = 1.0 / (W * ax.width(i - 1));
            if (i < n) L.upper[s] = 1.0 / (W * ax.width(i));
          }
        } else {
          const double W = ax.width(i);
          L.width[s] = W;
          L.lower[s] = 1.0 / (W * ax.gap(i));
          L.upper[s] = 1.0 / (W * (ax.periodic() ? ax.gap((i + 1) % n) : ax.gap(i + 1)));
        }
      }
    }

  diag_.assign(face_total(), 0.0);
  face_volume_.assign(face_total(), 0.0);
  velocity_singular_ = grid.periodic();
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    const auto& mask = masks.face[uz(d)];
    if (std::find(mask.begin(), mask.end(), 0) != mask.end()) velocity_singular_ = false;
    const auto& Lx = links_[uz(d)][0];
    const auto& Ly = links_[uz(d)][1];
    const auto& Lz = links_[uz(d)][2];
    double* dg = diag_.data() + offset_[uz(d)];
    double* fv = face_volume_.data() + offset_[uz(d)];
    par::for_slabs(fd[2], [&](int k) {
      for (int j = 0; j < fd[1]; ++j) {
        const double vyz = Ly.width[uz(j)] * Lz.width[uz(k)];
        const double syz = Ly.lower[uz(j)] + Ly.upper[uz(j)] + Lz.lower[uz(k)] + Lz.upper[uz(k)];
        const std::size_t f0 = grid.face_index(d, 0, j, k);
        for (int i = 0; i < fd[0]; ++i) {
          const double V = Lx.width[uz(i)] * vyz;
          fv[f0 + uz(i)] = V;
          dg[f0 + uz(i)] = nu_ * V * (Lx.lower[uz(i)] + Lx.upper[uz(i)] + syz);
        }
      }
    });
  }

  // (Modified) incomplete Cholesky pivots in lexicographic order. Links that
  // wrap around a periodic axis are left out of the factor.
  inv_pivot_.assign(face_total(), 0.0);
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    const std::array<std::size_t, 3> stride{1, uz(fd[0]), uz(fd[0]) * uz(fd[1])};
    const auto& mask = masks.face[uz(d)];
    const auto& L = links_[uz(d)];
    const std::size_t off = offset_[uz(d)];
    double* ip = inv_pivot_.data() + off;
    const double* dg = diag_.data() + off;
    const double* fv = face_volume_.data() + off;
    // Upper link of face g along axis e, if it stays inside the factor.
    auto upper_link = [&](std::size_t g, const std::array<int, 3>& idx, int e) {
      if (idx[uz(e)] + 1 >= fd[uz(e)] || !mask[g + stride[uz(e)]]) return 0.0;
      return nu_ * fv[g] * L[uz(e)].upper[uz(idx[uz(e)])];
    };
    for (int k = 0; k < fd[2]; ++k)
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          const std::array<int, 3> idx{i, j, k};
          const std::size_t f = grid.face_index(d, i, j, k);
          if (!mask[f]) continue;
          double p = dg[f];
          for (int e = 0; e < 3; ++e) {
            if (idx[uz(e)] == 0) continue;
            const std::size_t nb = f - stride[uz(e)];
            if (!mask[nb]) continue;
            const double c = nu_ * fv[f] * L[uz(e)].lower[uz(idx[uz(e)])];
            std::array<int, 3> nidx = idx;
            --nidx[uz(e)];
            double fill = 0.0;
            for (int e2 = 0; e2 < 3; ++e2)
              if (e2 != e) fill += upper_link(nb, nidx, e2);
            p -= c * (c + relaxation * fill) * ip[nb];
          }
          if (p < 0.25 * dg[f]) p = dg[f];
          ip[f] = 1.0 / p;
        }
  }
}

void StokesOperator::laplacian(const double* u, const Vec3& wall, double* out) const {
  const StaggeredGrid& grid = *grid_;
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    const std::size_t sy = uz(fd[0]);
    const std::size_t sz = uz(fd[0]) * uz(fd[1]);
    const auto& mask = masks_->face[uz(d)];
    const auto& Lx = links_[uz(d)][0];
    const auto& Ly = links_[uz(d)][1];
    const auto& Lz = links_[uz(d)][2];
    const double* ud = u + offset_[uz(d)];
    double* od = out + offset_[uz(d)];
    const double wd = wall[d];
    const int nx = fd[0];
    par::for_slabs(fd[2], [&](int k) {
      for (int j = 0; j < fd[1]; ++j) {
        const std::size_t f0 = grid.face_index(d, 0, j, k);
        const double* row = ud + f0;
        auto neighbour_row = [&](const AxisLinks& L, int idx, std::size_t stride, int dir) -> const double* {
          const int last = L.count - 1;
          if (dir < 0) {
            if (idx > 0) return row - stride;
            return L.periodic ? row + stride * uz(last) : nullptr;
          }
          if (idx < last) return row + stride;
          return L.periodic ? row - stride * uz(last) : nullptr;
        };
        const double* ym = neighbour_row(Ly, j, sy, -1);
        const double* yp = neighbour_row(Ly, j, sy, +1);
        const double* zm = neighbour_row(Lz, k, sz, -1);
        const double* zp = neighbour_row(Lz, k, sz, +1);
        const double ly = Ly.lower[uz(j)], uy = Ly.upper[uz(j)];
        const double lz = Lz.lower[uz(k)], uzz = Lz.upper[uz(k)];
        const double vyz = nu_ * Ly.width[uz(j)] * Lz.width[uz(k)];
        for (int i = 0; i < nx; ++i) {
          const std::size_t f = f0 + uz(i);
          if (!mask[f]) {
            od[f] = 0.0;
            continue;
          }
          const double uf = row[i];
          const double xm = i > 0 ? row[i - 1] : (Lx.periodic ? row[nx - 1] : wd);
          const double xp = i + 1 < nx ? row[i + 1] : (Lx.periodic ? row[0] : wd);
          const double vym = ym ? ym[i] : wd;
          const double vyp = yp ? yp[i] : wd;
          const double vzm = zm ? zm[i] : wd;
          const double vzp = zp ? zp[i] : wd;
          const double s = Lx.lower[uz(i)] * (uf - xm) + Lx.upper[uz(i)] * (uf - xp) + ly * (uf - vym) +
                           uy * (uf - vyp) + lz * (uf - vzm) + uzz * (uf - vzp);
          od[f] = vyz * Lx.width[uz(i)] * s;
        }
      }
    });
  }
}

void StokesOperator::divergence(const double* u, double* out) const {
  const StaggeredGrid& grid = *grid_;
  const auto cd = grid.cell_dims();
  const Axis& ax = grid.axis(0);
  const Axis& ay = grid.axis(1);
  const Axis& az = grid.axis(2);
  const double* ux = u + offset_[0];
  const double* uy = u + offset_[1];
  const double* uzv = u + offset_[2];
  const int nx = cd[0];
  par::for_slabs(cd[2], [&](int k) {
    const int k1 = (az.periodic() && k + 1 == cd[2]) ? 0 : k + 1;
    const double wz = az.width(k);
    for (int j = 0; j < cd[1]; ++j) {
      const int j1 = (ay.periodic() && j + 1 == cd[1]) ? 0 : j + 1;
      const double wy = ay.width(j);
      const std::size_t c0 = grid.cell_index(0, j, k);
      const double* xr = ux + grid.face_index(0, 0, j, k);
      const double* y0 = uy + grid.face_index(1, 0, j, k);
      const double* y1 = uy + grid.face_index(1, 0, j1, k);
      const double* z0 = uzv + grid.face_index(2, 0, j, k);
      const double* z1 = uzv + grid.face_index(2, 0, j, k1);
      for (int i = 0; i < nx; ++i) {
        const std::size_t c = c0 + uz(i);
        if (!masks_->cell[c]) {
          out[c] = 0.0;
          continue;
        }
        const int i1 = (ax.periodic() && i + 1 == nx) ? 0 : i + 1;
        const double wx = ax.width(i);
        out[c] = wy * wz * (xr[i1] - xr[i]) + wx * wz * (y1[i] - y0[i]) + wx * wy * (z1[i] - z0[i]);
      }
    }
  });
}

void StokesOperator::gradient(const double* p, double* out) const {
  const StaggeredGrid& grid = *grid_;
  const auto cd = grid.cell_dims();
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    const auto& mask = masks_->face[uz(d)];
    const Axis& ax = grid.axis(d);
    const auto& Lx = links_[uz(d)][0];
    const auto& Ly = links_[uz(d)][1];
    const auto& Lz = links_[uz(d)][2];
    double* od = out + offset_[uz(d)];
    const std::size_t cy = uz(cd[0]);
    const std::size_t cz = uz(cd[0]) * uz(cd[1]);
    const std::size_t step = d == 0 ? 1 : (d == 1 ? cy : cz);
    const std::size_t wrap = step * uz(ax.cells() - 1);
    par::for_slabs(fd[2], [&](int k) {
      for (int j = 0; j < fd[1]; ++j) {
        const std::size_t f0 = grid.face_index(d, 0, j, k);
        for (int i = 0; i < fd[0]; ++i) {
          const std::size_t f = f0 + uz(i);
          if (!mask[f]) {
            od[f] = 0.0;
            continue;
          }
          const std::array<int, 3> idx{i, j, k};
          std::array<int, 3> hi = idx;
          hi[uz(d)] = idx[uz(d)] % ax.cells();
          const std::size_t chi = grid.cell_index(hi[0], hi[1], hi[2]);
          const std::size_t clo = idx[uz(d)] == 0 ? chi + wrap : chi - step;
          const double area = (d == 0 ? 1.0 : Lx.width[uz(i)]) * (d == 1 ? 1.0 : Ly.width[uz(j)]) *
                              (d == 2 ? 1.0 : Lz.width[uz(k)]);
          od[f] = area * (p[chi] - p[clo]);
        }
      }
    });
  }
}

void StokesOperator::apply(const double* x, double* y) const {
  const std::size_t F = face_total();
  laplacian(x, Vec3::Zero(), y);
  std::vector<double> g(F);
  gradient(x + F, g.data());
#pragma omp parallel for schedule(static)
  for (std::size_t f = 0; f < F; ++f) y[f] += g[f];
  divergence(x, y + F);
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < cells_; ++c) y[F + c] = -y[F + c];
}

void StokesOperator::ic_solve(const double* r, double* z) const {
  const StaggeredGrid& grid = *grid_;
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    const std::size_t sy = uz(fd[0]);
    const std::size_t sz = uz(fd[0]) * uz(fd[1]);
    const auto& mask = masks_->face[uz(d)];
    const auto& Lx = links_[uz(d)][0];
    const auto& Ly = links_[uz(d)][1];
    const auto& Lz = links_[uz(d)][2];
    const std::size_t off = offset_[uz(d)];
    const double* ip = inv_pivot_.data() + off;
    const double* rd = r + off;
    double* zd = z + off;
    const int nx = fd[0];
    // Forward sweep: (P + L) y = r.
    for (int k = 0; k < fd[2]; ++k)
      for (int j = 0; j < fd[1]; ++j) {
        const std::size_t f0 = grid.face_index(d, 0, j, k);
        const double vyz = nu_ * Ly.width[uz(j)] * Lz.width[uz(k)];
        const double ly = j > 0 ? Ly.lower[uz(j)] : 0.0;
        const double lz = k > 0 ? Lz.lower[uz(k)] : 0.0;
        for (int i = 0; i < nx; ++i) {
          const std::size_t f = f0 + uz(i);
          if (!mask[f]) {
            zd[f] = 0.0;
            continue;
          }
          double s = 0.0;
          // Solid entries of z are zero, so no mask test is needed on neighbours.
          if (i > 0) s += Lx.lower[uz(i)] * zd[f - 1];
          if (ly != 0.0) s += ly * zd[f - sy];
          if (lz != 0.0) s += lz * zd[f - sz];
          zd[f] = (rd[f] + vyz * Lx.width[uz(i)] * s) * ip[f];
        }
      }
    // Backward sweep: (P + L^T) z = P y.
    for (int k = fd[2] - 1; k >= 0; --k)
      for (int j = fd[1] - 1; j >= 0; --j) {
        const std::size_t f0 = grid.face_index(d, 0, j, k);
        const double vyz = nu_ * Ly.width[uz(j)] * Lz.width[uz(k)];
        const double uy = j + 1 < fd[1] ? Ly.upper[uz(j)] : 0.0;
        const double uzz = k + 1 < fd[2] ? Lz.upper[uz(k)] : 0.0;
        for (int i = nx - 1; i >= 0; --i) {
          const std::size_t f = f0 + uz(i);
          if (!mask[f]) continue;
          double s = 0.0;
          if (i + 1 < nx) s += Lx.upper[uz(i)] * zd[f + 1];
          if (uy != 0.0) s += uy * zd[f + sy];
          if (uzz != 0.0) s += uzz * zd[f + sz];
          zd[f] += vyz * Lx.width[uz(i)] * s * ip[f];
        }
      }
  }
}

void StokesOperator::jacobi_solve(const double* r, double* z) const {
  for (int d = 0; d < 3; ++d) {
    const auto& mask = masks_->face[uz(d)];
    const std::size_t off = offset_[uz(d)];
    const std::size_t n = mask.size();
#pragma omp parallel for schedule(static)
    for (std::size_t f = 0; f < n; ++f) z[off + f] = mask[f] ? r[off + f] / diag_[off + f] : 0.0;
  }
}

double StokesOperator::link_form(const double* u, const Vec3& wu, const double* v, const Vec3& wv) const {
  const StaggeredGrid& grid = *grid_;
  double total = 0.0;
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    const std::array<std::size_t, 3> stride{1, uz(fd[0]), uz(fd[0]) * uz(fd[1])};
    const auto& L = links_[uz(d)];
    const double* ud = u + offset_[uz(d)];
    const double* vd = v + offset_[uz(d)];
    const double* fv = face_volume_.data() + offset_[uz(d)];
    total += par::sum_slabs(fd[2], [&](int k) {
      double s = 0.0;
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          const std::array<int, 3> idx{i, j, k};
          const std::size_t f = grid.face_index(d, i, j, k);
          for (int e = 0; e < 3; ++e) {
            const AxisLinks& Le = L[uz(e)];
            const int ie = idx[uz(e)];
            const int last = Le.count - 1;
            const std::size_t st = stride[uz(e)];
            // Each link once, from its lower end; wall ghosts on both sides.
            if (ie < last || Le.periodic) {
              const std::size_t nb = ie < last ? f + st : f - st * uz(last);
              s += fv[f] * Le.upper[uz(ie)] * (ud[f] - ud[nb]) * (vd[f] - vd[nb]);
            } else if (Le.ghost) {
              s += fv[f] * Le.upper[uz(ie)] * (ud[f] - wu[d]) * (vd[f] - wv[d]);
            }
            if (ie == 0 && Le.ghost) s += fv[f] * Le.lower[0] * (ud[f] - wu[d]) * (vd[f] - wv[d]);
          }
        }
      return s;
    });
  }
  return total;
}

int StokesOperator::fluid_components() const {
  const StaggeredGrid& grid = *grid_;
  const auto cd = grid.cell_dims();
  std::vector<int> label(cells_, -1);
  int components = 0;
  std::queue<std::array<int, 3>> todo;
  for (int k = 0; k < cd[2]; ++k)
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) {
        const std::size_t c0 = grid.cell_index(i, j, k);
        if (!masks_->cell[c0] || label[c0] >= 0) continue;
        label[c0] = components;
        todo.push({i, j, k});
        while (!todo.empty()) {
          const auto idx = todo.front();
          todo.pop();
          for (int d = 0; d < 3; ++d) {
            const Axis& ax = grid.axis(d);
            const int n = ax.cells();
            const int id = idx[uz(d)];
            for (int side = 0; side < 2; ++side) {
              int face_id = id + side;
              int nb_id = side == 0 ? id - 1 : id + 1;
              if (ax.periodic()) {
                face_id %= n;
                nb_id = (nb_id + n) % n;
              } else if (nb_id < 0 || nb_id >= n) {
                continue;
              }
              std::array<int, 3> fidx = idx;
              fidx[uz(d)] = face_id;
              if (!masks_->face[uz(d)][grid.face_index(d, fidx[0], fidx[1], fidx[2])]) continue;
              std::array<int, 3> nb = idx;
              nb[uz(d)] = nb_id;
              const std::size_t cn = grid.cell_index(nb[0], nb[1], nb[2]);
              if (label[cn] >= 0) continue;
              label[cn] = components;
              todo.push(nb);
            }
          }
        }
        ++components;
      }
  return components;
}

}  // namespace homog
