#include "homog/geometry.hpp"

#include "homog/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

namespace homog {
namespace {

double sdf_value(const SdfSamples& s, const Vec3& y) {
  const double h = 2.0 * s.extent / (s.n - 1);
  std::array<int, 3> i0{};
  std::array<double, 3> t{};
  for (int d = 0; d < 3; ++d) {
    const double u = (y[d] + s.extent) / h;
    if (u < 0.0 || u > s.n - 1) return std::numeric_limits<double>::infinity();
    int i = std::min(static_cast<int>(u), s.n - 2);
    i0[static_cast<std::size_t>(d)] = i;
    t[static_cast<std::size_t>(d)] = u - i;
  }
  auto at = [&](int a, int b, int c) {
    return s.values[static_cast<std::size_t>(a + s.n * (b + s.n * c))];
  };
  double acc = 0.0;
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) {
        const double w = (a ? t[0] : 1 - t[0]) * (b ? t[1] : 1 - t[1]) * (c ? t[2] : 1 - t[2]);
        acc += w * at(i0[0] + a, i0[1] + b, i0[2] + c);
      }
  return acc;
}

template <class F>
void for_sdf_nodes(const SdfSamples& s, F&& f) {
  const double h = 2.0 * s.extent / (s.n - 1);
  for (int c = 0; c < s.n; ++c)
    for (int b = 0; b < s.n; ++b)
      for (int a = 0; a < s.n; ++a) {
        const Vec3 y(-s.extent + a * h, -s.extent + b * h, -s.extent + c * h);
        f(y, s.values[static_cast<std::size_t>(a + s.n * (b + s.n * c))]);
      }
}

}  // namespace

Obstacle Obstacle::parse(const std::string& text) {
  if (text == "none") return none();
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("obstacle must be 'none', 'ball:<r>' or 'cube:<h>': " + text);
  const std::string kind = text.substr(0, colon);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("bad obstacle parameter: " + text);
  }
  if (!(value > 0.0)) throw ConfigError("obstacle size must be positive: " + text);
  if (kind == "ball") return ball(value);
  if (kind == "cube") return cube(value);
  throw ConfigError("unknown obstacle kind: " + kind);
}

bool Obstacle::contains(const Vec3& y) const {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoObstacle>) {
          return false;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return y.squaredNorm() < s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, Cube>) {
          return y.cwiseAbs().maxCoeff() < s.half_width;
        } else {
          return sdf_value(s, y) < 0.0;
        }
      },
      shape_);
}

double Obstacle::bounding_radius() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoObstacle>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return s.radius;
        } else if constexpr (std::is_same_v<T, Cube>) {
          return std::sqrt(3.0) * s.half_width;
        } else {
          double r = 0.0;
          for_sdf_nodes(s, [&](const Vec3& y, double v) {
            if (v <= 0.0) r = std::max(r, y.norm());
          });
          return r;
        }
      },
      shape_);
}

void Obstacle::check_contained() const {
  if (const auto* s = std::get_if<SdfSamples>(&shape_)) {
    if (s->n < 2 || s->values.size() != static_cast<std::size_t>(s->n) * s->n * s->n)
      throw ConfigError("signed-distance samples must form an n^3 lattice");
  }
  if (bounding_radius() > kObstacleBound * (1.0 + 1e-12))
    throw ConfigError("obstacle exceeds B(0,1/8): " + describe());
}

std::optional<double> Obstacle::volume() const {
  if (std::holds_alternative<NoObstacle>(shape_)) return 0.0;
  if (const auto* b = std::get_if<Ball>(&shape_)) return 4.0 / 3.0 * std::numbers::pi * std::pow(b->radius, 3);
  if (const auto* c = std::get_if<Cube>(&shape_)) return std::pow(2.0 * c->half_width, 3);
  return std::nullopt;
}

bool Obstacle::axis_symmetric() const {
  return std::holds_alternative<Ball>(shape_) || std::holds_alternative<Cube>(shape_) ||
         std::holds_alternative<NoObstacle>(shape_);
}

std::string Obstacle::describe() const {
  const auto num = [](double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoObstacle>) {
          os << "none";
        } else if constexpr (std::is_same_v<T, Ball>) {
          os << "ball:" << num(s.radius);
        } else if constexpr (std::is_same_v<T, Cube>) {
          os << "cube:" << num(s.half_width);
        } else {
          os << "sdf:" << s.n;
        }
      },
      shape_);
  return os.str();
}

bool Obstacle::operator==(const Obstacle& other) const {
  if (shape_.index() != other.shape_.index()) return false;
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        const auto& o = std::get<T>(other.shape_);
        if constexpr (std::is_same_v<T, NoObstacle>) {
          return true;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return s.radius == o.radius;
        } else if constexpr (std::is_same_v<T, Cube>) {
          return s.half_width == o.half_width;
        } else {
          return s.n == o.n && s.extent == o.extent && s.values == o.values;
        }
      },
      shape_);
}

void PerforationConfig::validate() const {
  if (!(alpha > 1.0 && alpha < 3.0)) throw ConfigError("alpha out of range (1,3)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0,1)");
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  if (domain == DomainKind::torus3) {
    const double m = 1.0 / (2.0 * epsilon);
    if (std::abs(m - std::round(m)) > 1e-9 * m) throw ConfigError("(2eps)^-1 not integer");
  } else if (!(box_side.minCoeff() > 0.0)) {
    throw ConfigError("box side lengths must be positive");
  }
  obstacle.check_contained();
  const double a = std::pow(epsilon, alpha);
  if (!(a * obstacle.bounding_radius() < epsilon / 4.0)) throw ConfigError("hole does not fit inside the eps/4 ball");
}

Scales derive_scales(const PerforationConfig& config) {
  config.validate();
  return {std::pow(config.epsilon, config.alpha), std::pow(config.epsilon, 0.5 * (3.0 - config.alpha))};
}

HoleSet HoleSet::single(const Obstacle& shape, Vec3 center, double scale) {
  HoleSet h;
  h.shape_ = shape;
  h.scale_ = scale;
  h.epsilon_ = 0.0;
  if (!shape.empty()) h.centers_.push_back(center);
  return h;
}

int HoleSet::nearest(const Vec3& x, Vec3* offset) const {
  if (centers_.empty()) return -1;
  if (lattice_) {
    int flat = 0;
    int stride = 1;
    for (int d = 0; d < 3; ++d) {
      int c = static_cast<int>(std::floor(x[d] / epsilon_));
      const int nc = cells_[static_cast<std::size_t>(d)];
      if (periodic_) {
        c %= nc;
        if (c < 0) c += nc;
      } else if (c < 0 || c >= nc) {
        return -1;
      }
      flat += c * stride;
      stride *= nc;
    }
    const int h = cell_to_hole_[static_cast<std::size_t>(flat)];
    if (h >= 0 && offset) {
      Vec3 y = x - centers_[static_cast<std::size_t>(h)];
      if (periodic_)
        for (int d = 0; d < 3; ++d) y[d] = wrap_delta(y[d], period_[d]);
      *offset = y;
    }
    return h;
  }
  int best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t h = 0; h < centers_.size(); ++h) {
    const double r = (x - centers_[h]).norm();
    if (r < dist) {
      dist = r;
      best = static_cast<int>(h);
    }
  }
  if (offset) *offset = x - centers_[static_cast<std::size_t>(best)];
  return best;
}

int HoleSet::find(const Vec3& x) const {
  Vec3 y;
  const int h = nearest(x, &y);
  if (h < 0) return -1;
  return shape_.contains(y / scale_) ? h : -1;
}

double HoleSet::min_center_distance() const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = centers_.size();
  auto dist = [&](std::size_t a, std::size_t b) {
    Vec3 d = centers_[a] - centers_[b];
    if (periodic_)
      for (int e = 0; e < 3; ++e) d[e] = wrap_delta(d[e], period_[e]);
    return d.norm();
  };
  if (!lattice_ || n <= 512) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) best = std::min(best, dist(a, b));
    return best;
  }
  // Lattice: only the 26 neighbouring cells can hold the nearest centre.
  const auto [nx, ny, nz] = cells_;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int a = cell_to_hole_[static_cast<std::size_t>(i + nx * (j + ny * k))];
        if (a < 0) continue;
        for (int dk = -1; dk <= 1; ++dk)
          for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
              if (!di && !dj && !dk) continue;
              int ii = i + di, jj = j + dj, kk = k + dk;
              if (periodic_) {
                ii = (ii + nx) % nx;
                jj = (jj + ny) % ny;
                kk = (kk + nz) % nz;
              } else if (ii < 0 || jj < 0 || kk < 0 || ii >= nx || jj >= ny || kk >= nz) {
                continue;
              }
              const int b = cell_to_hole_[static_cast<std::size_t>(ii + nx * (jj + ny * kk))];
              if (b >= 0 && b != a) best = std::min(best, dist(static_cast<std::size_t>(a), static_cast<std::size_t>(b)));
            }
      }
  return best;
}

HoleSet build_perforation(const PerforationConfig& config) {
  const Scales s = derive_scales(config);
  HoleSet h;
  h.shape_ = config.obstacle;
  h.scale_ = s.a_eps;
  h.epsilon_ = config.epsilon;
  h.lattice_ = true;
  h.periodic_ = config.domain == DomainKind::torus3;
  const double eps = config.epsilon;
  const Vec3 side = h.periodic_ ? Vec3::Ones() : config.box_side;
  h.period_ = side;
  for (int d = 0; d < 3; ++d)
    h.cells_[static_cast<std::size_t>(d)] = static_cast<int>(std::floor(side[d] / eps + 1e-9));
  const auto [nx, ny, nz] = h.cells_;
  h.cell_to_hole_.assign(static_cast<std::size_t>(nx) * ny * nz, -1);
  if (config.obstacle.empty()) return h;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (!h.periodic_) {
          // Closure of the cell must lie in the open box.
          const std::array<int, 3> idx{i, j, k};
          bool interior = true;
          for (int d = 0; d < 3; ++d) {
            const int c = idx[static_cast<std::size_t>(d)];
            const double lo = eps * c;
            const double hi = eps * (c + 1);
            if (!(lo > 1e-12 * eps && hi < side[d] - 1e-12 * eps)) interior = false;
          }
          if (!interior) continue;
        }
        h.cell_to_hole_[static_cast<std::size_t>(i + nx * (j + ny * k))] = static_cast<int>(h.centers_.size());
        h.centers_.emplace_back(eps * (i + 0.5), eps * (j + 0.5), eps * (k + 0.5));
      }
  return h;
}

Masks Masks::all_fluid(const StaggeredGrid& grid) {
  return rasterize_predicate(grid, [](const Vec3&) { return false; });
}

bool Masks::all_fluid() const {
  auto ones = [](const std::vector<std::uint8_t>& v) { return std::all_of(v.begin(), v.end(), [](auto b) { return b == 1; }); };
  // Wall faces are solid even without holes, so only cells decide here.
  return ones(cell);
}

Masks rasterize_predicate(const StaggeredGrid& grid, const std::function<bool(const Vec3&)>& solid) {
  Masks m;
  const auto [nx, ny, nz] = grid.cell_dims();
  m.cell.assign(grid.cell_count(), 0);
  par::for_slabs(nz, [&](int k) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) m.cell[grid.cell_index(i, j, k)] = solid(grid.cell_center(i, j, k)) ? 0 : 1;
  });
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    const Axis& ax = grid.axis(d);
    auto& face = m.face[static_cast<std::size_t>(d)];
    face.assign(grid.face_count(d), 0);
    par::for_slabs(fd[2], [&](int k) {
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          std::array<int, 3> idx{i, j, k};
          const int id = idx[static_cast<std::size_t>(d)];
          if (!ax.periodic() && (id == 0 || id == ax.cells())) continue;  // wall
          std::array<int, 3> lo = idx;
          lo[static_cast<std::size_t>(d)] = id == 0 ? ax.cells() - 1 : id - 1;
          std::array<int, 3> hi = idx;
          hi[static_cast<std::size_t>(d)] = id % ax.cells();
          const bool fluid = m.cell[grid.cell_index(lo[0], lo[1], lo[2])] && m.cell[grid.cell_index(hi[0], hi[1], hi[2])] &&
                             !solid(grid.face_center(d, i, j, k));
          face[grid.face_index(d, i, j, k)] = fluid ? 1 : 0;
        }
    });
  }
  const double fluid_volume = par::sum_slabs(nz, [&](int k) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (m.cell[grid.cell_index(i, j, k)]) s += grid.cell_volume(i, j, k);
    return s;
  });
  m.fluid_fraction = fluid_volume / grid.domain_volume();
  m.min_cells_across = std::numeric_limits<double>::infinity();
  return m;
}

Masks rasterize(const HoleSet& holes, const StaggeredGrid& grid, const RasterOptions& options) {
  Masks m = rasterize_predicate(grid, [&](const Vec3& x) { return holes.inside(x); });
  const double diameter = 2.0 * holes.shape().bounding_radius() * holes.scale();
  for (const Vec3& c : holes.centers()) {
    double h = 0.0;
    for (int d = 0; d < 3; ++d) h = std::max(h, grid.axis(d).width(grid.axis(d).locate(c[d])));
    m.min_cells_across = std::min(m.min_cells_across, diameter / h);
  }
  if (!holes.centers().empty() && m.min_cells_across < options.min_cells_across) {
    std::ostringstream msg;
    msg << "under-resolved hole: " << m.min_cells_across << " cells across, need " << options.min_cells_across;
    if (options.strict) throw ConfigError(msg.str());
    std::cerr << "warning: " << msg.str() << '\n';
  }
  return m;
}

}  // namespace homog
