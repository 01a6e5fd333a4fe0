#include "homog/grid.hpp"

#include <algorithm>
#include <numeric>

namespace homog {
namespace {

// Smallest q with h0 * (q + q^2 + ... + q^m) = distance.
double stretch_ratio(double h0, int m, double distance) {
  auto total = [&](double q) {
    double s = 0.0;
    double p = 1.0;
    for (int k = 0; k < m; ++k) {
      p *= q;
      s += p;
    }
    return h0 * s;
  };
  double lo = 1e-3;
  double hi = 1.0;
  while (total(hi) < distance) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < distance ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Cell widths of a geometric run of m cells starting from h0*q, rescaled so
// they sum to `distance` exactly.
std::vector<double> geometric_run(double h0, int m, double distance) {
  std::vector<double> w;
  if (m == 0) return w;
  const double q = stretch_ratio(h0, m, distance);
  double p = h0;
  for (int k = 0; k < m; ++k) {
    p *= q;
    w.push_back(p);
  }
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x *= distance / s;
  return w;
}

}  // namespace

Axis Axis::uniform(int cells, double length, double origin, bool periodic) {
  if (cells < 1 || !(length > 0.0)) throw ConfigError("axis needs at least one cell and positive length");
  Axis a;
  a.periodic_ = periodic;
  a.faces_.resize(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) a.faces_[static_cast<std::size_t>(i)] = origin + length * i / cells;
  a.finalize();
  return a;
}

Axis Axis::from_faces(std::vector<double> faces, bool periodic) {
  if (faces.size() < 2) throw ConfigError("axis needs at least two faces");
  for (std::size_t i = 1; i < faces.size(); ++i)
    if (!(faces[i] > faces[i - 1])) throw ConfigError("axis faces must be strictly increasing");
  Axis a;
  a.periodic_ = periodic;
  a.faces_ = std::move(faces);
  a.finalize();
  return a;
}

Axis Axis::graded_symmetric(int cells, double half_length, double core_half, int core_cells) {
  if (core_cells < 2 || core_cells % 2 != 0) throw ConfigError("graded axis needs an even core cell count");
  if (cells < core_cells || (cells - core_cells) % 2 != 0)
    throw ConfigError("graded axis needs an even number of cells outside the core");
  if (!(core_half > 0.0) || !(half_length > core_half)) throw ConfigError("graded axis core must lie inside the domain");
  const double h0 = 2.0 * core_half / core_cells;
  const int m = (cells - core_cells) / 2;
  const auto run = geometric_run(h0, m, half_length - core_half);
  std::vector<double> right{0.0};
  for (int i = 0; i < core_cells / 2; ++i) right.push_back(right.back() + h0);
  right.back() = core_half;
  for (double w : run) right.push_back(right.back() + w);
  right.back() = half_length;
  std::vector<double> faces;
  for (auto it = right.rbegin(); it != right.rend(); ++it) faces.push_back(-*it);
  faces.pop_back();
  faces.insert(faces.end(), right.begin(), right.end());
  faces.front() = -half_length;
  return from_faces(std::move(faces), false);
}

Axis Axis::graded_tiled(int repeats, double period, int cells_per_period, double core_width, int core_cells) {
  if (repeats < 1) throw ConfigError("tiled axis needs at least one period");
  if (core_cells < 1 || cells_per_period < core_cells || (cells_per_period - core_cells) % 2 != 0)
    throw ConfigError("tiled axis needs an even number of cells outside the core");
  if (!(core_width > 0.0) || !(core_width < period)) throw ConfigError("tiled axis core must lie inside the period");
  const double h0 = core_width / core_cells;
  const int m = (cells_per_period - core_cells) / 2;
  const double side = 0.5 * (period - core_width);
  std::vector<double> seg;
  if (m == 0) {
    if (std::abs(side) > 1e-14 * period) throw ConfigError("tiled axis core must fill the period when no stretched cells remain");
    for (int i = 0; i < core_cells; ++i) seg.push_back(h0);
  } else {
    auto run = geometric_run(h0, m, side);
    seg.assign(run.rbegin(), run.rend());
    for (int i = 0; i < core_cells; ++i) seg.push_back(h0);
    seg.insert(seg.end(), run.begin(), run.end());
  }
  std::vector<double> faces{0.0};
  for (int r = 0; r < repeats; ++r) {
    const double base = r * period;
    double x = base;
    for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
      x += seg[i];
      faces.push_back(x);
    }
    faces.push_back(base + period);
  }
  return from_faces(std::move(faces), true);
}

void Axis::finalize() {
  const int n = static_cast<int>(faces_.size()) - 1;
  centers_.resize(static_cast<std::size_t>(n));
  widths_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    widths_[u] = faces_[u + 1] - faces_[u];
    centers_[u] = 0.5 * (faces_[u] + faces_[u + 1]);
  }
  gaps_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 1; i < n; ++i) gaps_[static_cast<std::size_t>(i)] = 0.5 * (widths_[static_cast<std::size_t>(i) - 1] + widths_[static_cast<std::size_t>(i)]);
  if (periodic_) {
    const double g = 0.5 * (widths_.front() + widths_.back());
    gaps_.front() = g;
    gaps_.back() = g;
  } else {
    gaps_.front() = 0.5 * widths_.front();
    gaps_.back() = 0.5 * widths_.back();
  }
}

double Axis::min_width() const { return *std::min_element(widths_.begin(), widths_.end()); }
double Axis::max_width() const { return *std::max_element(widths_.begin(), widths_.end()); }

bool Axis::is_uniform(double rel_tol) const {
  const double w0 = widths_.front();
  return std::all_of(widths_.begin(), widths_.end(), [&](double w) { return std::abs(w - w0) <= rel_tol * w0; });
}

int Axis::locate(double x) const {
  if (periodic_) {
    const double L = length();
    x = faces_.front() + (x - faces_.front()) - L * std::floor((x - faces_.front()) / L);
  }
  auto it = std::upper_bound(faces_.begin(), faces_.end(), x);
  int i = static_cast<int>(it - faces_.begin()) - 1;
  return std::clamp(i, 0, cells() - 1);
}

StaggeredGrid::StaggeredGrid(Axis x, Axis y, Axis z) : axes_{std::move(x), std::move(y), std::move(z)} {
  const bool p0 = axes_[0].periodic();
  if (axes_[1].periodic() != p0 || axes_[2].periodic() != p0)
    throw ConfigError("all axes must be either periodic or walled");
  kind_ = p0 ? DomainKind::torus3 : DomainKind::box3;
  for (int d = 0; d < 3; ++d) {
    std::array<int, 3> dims{axes_[0].cells(), axes_[1].cells(), axes_[2].cells()};
    dims[static_cast<std::size_t>(d)] = axes_[static_cast<std::size_t>(d)].face_count();
    fdims_[static_cast<std::size_t>(d)] = dims;
  }
  nx_ = axes_[0].cells();
  ny_ = axes_[1].cells();
}

StaggeredGrid StaggeredGrid::uniform(int n, double side, DomainKind kind, Vec3 origin) {
  const bool p = kind == DomainKind::torus3;
  return StaggeredGrid(Axis::uniform(n, side, origin.x(), p), Axis::uniform(n, side, origin.y(), p),
                       Axis::uniform(n, side, origin.z(), p));
}

std::size_t StaggeredGrid::cell_count() const {
  return static_cast<std::size_t>(axes_[0].cells()) * axes_[1].cells() * axes_[2].cells();
}

std::size_t StaggeredGrid::face_count(int d) const {
  const auto& fd = fdims_[static_cast<std::size_t>(d)];
  return static_cast<std::size_t>(fd[0]) * fd[1] * fd[2];
}

Vec3 StaggeredGrid::face_center(int d, int i, int j, int k) const {
  std::array<int, 3> idx{i, j, k};
  Vec3 x;
  for (int e = 0; e < 3; ++e) {
    const auto& ax = axes_[static_cast<std::size_t>(e)];
    const int ie = idx[static_cast<std::size_t>(e)];
    x[e] = (e == d) ? (ie == ax.cells() ? ax.face(ax.cells()) : ax.face(ie)) : ax.center(ie);
  }
  return x;
}

double StaggeredGrid::face_volume(int d, int i, int j, int k) const {
  std::array<int, 3> idx{i, j, k};
  double v = 1.0;
  for (int e = 0; e < 3; ++e) {
    const auto& ax = axes_[static_cast<std::size_t>(e)];
    const int ie = idx[static_cast<std::size_t>(e)];
    v *= (e == d) ? ax.gap(ie) : ax.width(ie);
  }
  return v;
}

double StaggeredGrid::min_spacing() const {
  return std::min({axes_[0].min_width(), axes_[1].min_width(), axes_[2].min_width()});
}

}  // namespace homog
