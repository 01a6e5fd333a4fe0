#include "homog/fields.hpp"

#include "homog/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace homog {
namespace {

struct Bracket {
  int lo;
  int hi;
  double t;
};

// Locates x between two sample positions on one axis. `faces` selects face
// positions (else cell centres).
Bracket bracket(const Axis& ax, bool faces, double x) {
  const int n = ax.cells();
  const double L = ax.length();
  if (ax.periodic()) {
    const double x0 = faces ? ax.face(0) : ax.center(0);
    double r = x - x0;
    r -= L * std::floor(r / L);
    const double xr = x0 + r;  // in [x0, x0 + L)
    auto pos = [&](int i) { return i == n ? x0 + L : (faces ? ax.face(i) : ax.center(i)); };
    int lo = 0;
    int hi = n;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (pos(mid) <= xr ? lo : hi) = mid;
    }
    const double t = std::clamp((xr - pos(lo)) / (pos(lo + 1) - pos(lo)), 0.0, 1.0);
    return {lo, (lo + 1) % n, t};
  }
  const int count = faces ? n + 1 : n;
  auto pos = [&](int i) { return faces ? ax.face(i) : ax.center(i); };
  if (count == 1 || x <= pos(0)) return {0, 0, 0.0};
  if (x >= pos(count - 1)) return {count - 1, count - 1, 0.0};
  int lo = 0;
  int hi = count - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (pos(mid) <= x ? lo : hi) = mid;
  }
  const double t = std::clamp((x - pos(lo)) / (pos(hi) - pos(lo)), 0.0, 1.0);
  return {lo, hi, t};
}

template <class Value>
double trilinear(const std::array<Bracket, 3>& b, Value&& value) {
  auto line = [&](int j, int k) { return std::lerp(value(b[0].lo, j, k), value(b[0].hi, j, k), b[0].t); };
  auto plane = [&](int k) { return std::lerp(line(b[1].lo, k), line(b[1].hi, k), b[1].t); };
  return std::lerp(plane(b[2].lo), plane(b[2].hi), b[2].t);
}

}  // namespace

ScalarField sample_cells(const StaggeredGrid& grid, const std::function<double(const Vec3&)>& f) {
  ScalarField out(grid);
  const auto [nx, ny, nz] = grid.cell_dims();
  par::for_slabs(nz, [&](int k) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) out[grid.cell_index(i, j, k)] = f(grid.cell_center(i, j, k));
  });
  return out;
}

VectorField sample_faces(const StaggeredGrid& grid, const std::function<Vec3(const Vec3&)>& f) {
  VectorField out(grid);
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    par::for_slabs(fd[2], [&](int k) {
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) out[d][grid.face_index(d, i, j, k)] = f(grid.face_center(d, i, j, k))[d];
    });
  }
  return out;
}

double integrate(const StaggeredGrid& grid, const ScalarField& f, const std::vector<std::uint8_t>* mask) {
  const auto [nx, ny, nz] = grid.cell_dims();
  return par::sum_slabs(nz, [&](int k) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const auto c = grid.cell_index(i, j, k);
        if (!mask || (*mask)[c]) s += f[c] * grid.cell_volume(i, j, k);
      }
    return s;
  });
}

double lp_norm(const StaggeredGrid& grid, const ScalarField& f, double p, const std::vector<std::uint8_t>* mask) {
  const auto [nx, ny, nz] = grid.cell_dims();
  if (std::isinf(p)) {
    return par::max_slabs(nz, [&](int k) {
      double m = 0.0;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const auto c = grid.cell_index(i, j, k);
          if (!mask || (*mask)[c]) m = std::max(m, std::abs(f[c]));
        }
      return m;
    });
  }
  const double s = par::sum_slabs(nz, [&](int k) {
    double acc = 0.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const auto c = grid.cell_index(i, j, k);
        if (!mask || (*mask)[c]) acc += std::pow(std::abs(f[c]), p) * grid.cell_volume(i, j, k);
      }
    return acc;
  });
  return std::pow(s, 1.0 / p);
}

double inner(const StaggeredGrid& grid, const VectorField& a, const VectorField& b) {
  double total = 0.0;
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    total += par::sum_slabs(fd[2], [&](int k) {
      double s = 0.0;
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          const auto f = grid.face_index(d, i, j, k);
          s += a[d][f] * b[d][f] * grid.face_volume(d, i, j, k);
        }
      return s;
    });
  }
  return total;
}

double inner(const StaggeredGrid& grid, const ScalarField& a, const ScalarField& b) {
  const auto [nx, ny, nz] = grid.cell_dims();
  return par::sum_slabs(nz, [&](int k) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const auto c = grid.cell_index(i, j, k);
        s += a[c] * b[c] * grid.cell_volume(i, j, k);
      }
    return s;
  });
}

double l2_norm(const StaggeredGrid& grid, const VectorField& u) { return std::sqrt(inner(grid, u, u)); }

double l2_distance(const StaggeredGrid& grid, const VectorField& a, const VectorField& b) {
  VectorField d = a;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < d[c].size(); ++i) d[c][i] -= b[c][i];
  return l2_norm(grid, d);
}

double l2_distance(const StaggeredGrid& grid, const ScalarField& a, const ScalarField& b,
                   const std::vector<std::uint8_t>* mask) {
  ScalarField d = a;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
  return lp_norm(grid, d, 2.0, mask);
}

double remove_mean(const StaggeredGrid& grid, ScalarField& f, const std::vector<std::uint8_t>* mask) {
  ScalarField one(grid, 1.0);
  const double vol = integrate(grid, one, mask);
  if (!(vol > 0.0)) return 0.0;
  const double mean = integrate(grid, f, mask) / vol;
  for (std::size_t c = 0; c < f.size(); ++c)
    if (!mask || (*mask)[c]) f[c] -= mean;
  return mean;
}

std::array<ScalarField, 3> cell_average(const StaggeredGrid& grid, const VectorField& u) {
  std::array<ScalarField, 3> out{ScalarField(grid), ScalarField(grid), ScalarField(grid)};
  const auto [nx, ny, nz] = grid.cell_dims();
  for (int d = 0; d < 3; ++d) {
    const Axis& ax = grid.axis(d);
    par::for_slabs(nz, [&](int k) {
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          std::array<int, 3> lo{i, j, k};
          std::array<int, 3> hi = lo;
          const int id = lo[static_cast<std::size_t>(d)];
          hi[static_cast<std::size_t>(d)] = (ax.periodic() && id + 1 == ax.cells()) ? 0 : id + 1;
          out[static_cast<std::size_t>(d)][grid.cell_index(i, j, k)] =
              0.5 * (u[d][grid.face_index(d, lo[0], lo[1], lo[2])] + u[d][grid.face_index(d, hi[0], hi[1], hi[2])]);
        }
    });
  }
  return out;
}

std::array<ScalarField, 9> cell_gradient(const StaggeredGrid& grid, const VectorField& u) {
  std::array<ScalarField, 9> out;
  for (auto& f : out) f = ScalarField(grid);
  const auto avg = cell_average(grid, u);
  const auto [nx, ny, nz] = grid.cell_dims();
  par::for_slabs(nz, [&](int k) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::array<int, 3> idx{i, j, k};
        const std::size_t c = grid.cell_index(i, j, k);
        for (int e = 0; e < 3; ++e) {
          const auto ue = static_cast<std::size_t>(e);
          const Axis& ax = grid.axis(e);
          const int m = ax.cells();
          const int id = idx[ue];
          std::array<int, 3> lo = idx;
          std::array<int, 3> hi = idx;
          double xl = ax.center(id);
          double xh = xl;
          if (id > 0) {
            lo[ue] = id - 1;
            xl = ax.center(id - 1);
          } else if (ax.periodic()) {
            lo[ue] = m - 1;
            xl = ax.center(m - 1) - ax.length();
          }
          if (id + 1 < m) {
            hi[ue] = id + 1;
            xh = ax.center(id + 1);
          } else if (ax.periodic()) {
            hi[ue] = 0;
            xh = ax.center(0) + ax.length();
          }
          const std::size_t cl = grid.cell_index(lo[0], lo[1], lo[2]);
          const std::size_t ch = grid.cell_index(hi[0], hi[1], hi[2]);
          for (int d = 0; d < 3; ++d) {
            double g = 0.0;
            if (d == e) {
              std::array<int, 3> up = idx;
              up[ue] = (ax.periodic() && id + 1 == m) ? 0 : id + 1;
              g = (u[d][grid.face_index(d, up[0], up[1], up[2])] - u[d][grid.face_index(d, i, j, k)]) / ax.width(id);
            } else if (xh > xl) {
              const auto& a = avg[static_cast<std::size_t>(d)];
              g = (a[ch] - a[cl]) / (xh - xl);
            }
            out[static_cast<std::size_t>(3 * d + e)][c] = g;
          }
        }
      }
  });
  return out;
}

double interpolate(const StaggeredGrid& grid, const ScalarField& f, const Vec3& x) {
  const std::array<Bracket, 3> b{bracket(grid.axis(0), false, x[0]), bracket(grid.axis(1), false, x[1]),
                                 bracket(grid.axis(2), false, x[2])};
  return trilinear(b, [&](int i, int j, int k) { return f[grid.cell_index(i, j, k)]; });
}

Vec3 interpolate(const StaggeredGrid& grid, const VectorField& u, const Vec3& x) {
  Vec3 out;
  for (int d = 0; d < 3; ++d) {
    std::array<Bracket, 3> b{};
    for (int e = 0; e < 3; ++e) b[static_cast<std::size_t>(e)] = bracket(grid.axis(e), e == d, x[e]);
    out[d] = trilinear(b, [&](int i, int j, int k) { return u[d][grid.face_index(d, i, j, k)]; });
  }
  return out;
}

ScalarField divergence(const StaggeredGrid& grid, const VectorField& u) {
  ScalarField out(grid);
  const auto [nx, ny, nz] = grid.cell_dims();
  par::for_slabs(nz, [&](int k) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::array<int, 3> idx{i, j, k};
        double s = 0.0;
        for (int d = 0; d < 3; ++d) {
          const Axis& ax = grid.axis(d);
          std::array<int, 3> hi = idx;
          const int id = idx[static_cast<std::size_t>(d)];
          hi[static_cast<std::size_t>(d)] = (ax.periodic() && id + 1 == ax.cells()) ? 0 : id + 1;
          s += (u[d][grid.face_index(d, hi[0], hi[1], hi[2])] - u[d][grid.face_index(d, i, j, k)]) / ax.width(id);
        }
        out[grid.cell_index(i, j, k)] = s;
      }
  });
  return out;
}

double divergence_l2(const StaggeredGrid& grid, const VectorField& u, const std::vector<std::uint8_t>* mask) {
  return lp_norm(grid, divergence(grid, u), 2.0, mask);
}

}  // namespace homog
