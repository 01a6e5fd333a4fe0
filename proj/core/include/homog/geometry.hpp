#pragma once

#include "homog/grid.hpp"
#include "homog/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace homog {

/// Radius of the ball every reference obstacle must fit in.
inline constexpr double kObstacleBound = 0.125;

struct NoObstacle {};
struct Ball {
  double radius = 0.1;
};
/// Axis-aligned cube centred at the origin.
struct Cube {
  double half_width = 0.07;
};
/// Signed distance samples on an n^3 lattice covering [-extent, extent]^3
/// (node-centred, x fastest). Inside where the trilinear interpolant is < 0.
struct SdfSamples {
  int n = 0;
  double extent = kObstacleBound;
  std::vector<double> values;
};

/// Reference obstacle T0 in unit-cell coordinates.
class Obstacle {
 public:
  using Shape = std::variant<NoObstacle, Ball, Cube, SdfSamples>;

  Obstacle() = default;
  explicit Obstacle(Shape shape) : shape_(std::move(shape)) {}
  static Obstacle none() { return Obstacle(NoObstacle{}); }
  static Obstacle ball(double r) { return Obstacle(Ball{r}); }
  static Obstacle cube(double h) { return Obstacle(Cube{h}); }
  /// Parses "none", "ball:<r>", "cube:<half-width>".
  static Obstacle parse(const std::string& text);

  bool empty() const { return std::holds_alternative<NoObstacle>(shape_); }
  bool contains(const Vec3& y) const;
  /// Radius of the smallest origin-centred ball containing the shape.
  double bounding_radius() const;
  /// Throws ConfigError unless the shape lies in the closed ball B(0, 1/8).
  void check_contained() const;
  /// Analytic volume where available (ball, cube); nullopt otherwise.
  std::optional<double> volume() const;
  /// True when the shape is invariant under permutations of the axes.
  bool axis_symmetric() const;
  std::string describe() const;
  const Shape& shape() const { return shape_; }

  bool operator==(const Obstacle& other) const;

 private:
  Shape shape_{NoObstacle{}};
};

struct PerforationConfig {
  double epsilon = 0.25;
  double alpha = 2.0;
  Obstacle obstacle = Obstacle::ball(0.1);
  DomainKind domain = DomainKind::torus3;
  Vec3 box_side = Vec3::Ones();
  double mu = 1.0;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  bool operator==(const PerforationConfig& other) const = default;
};

struct Scales {
  double a_eps = 0.0;
  double sigma_eps = 0.0;
};

/// a_eps = eps^alpha, sigma_eps = eps^((3 - alpha) / 2).
Scales derive_scales(const PerforationConfig& config);

/// Holes x_k + a_eps * T0. Centres sit at the centres of the eps-cells that
/// tile the domain, so cell lookup is O(1).
class HoleSet {
 public:
  HoleSet() = default;
  /// A single hole (used for cell problems): centre c, scale a.
  static HoleSet single(const Obstacle& shape, Vec3 center, double scale);

  const std::vector<Vec3>& centers() const { return centers_; }
  std::size_t size() const { return centers_.size(); }
  double scale() const { return scale_; }
  double epsilon() const { return epsilon_; }
  const Obstacle& shape() const { return shape_; }
  bool periodic() const { return periodic_; }
  /// Hole of the eps-cell containing x (-1 when that cell carries none);
  /// offset receives x - centre (minimal image on the torus).
  int nearest(const Vec3& x, Vec3* offset = nullptr) const;
  /// Index of the hole containing x, or -1.
  int find(const Vec3& x) const;
  bool inside(const Vec3& x) const { return find(x) >= 0; }
  /// Smallest pairwise centre distance (minimal image on the torus).
  double min_center_distance() const;

 private:
  friend HoleSet build_perforation(const PerforationConfig& config);

  std::vector<Vec3> centers_;
  Obstacle shape_;
  double scale_ = 0.0;
  double epsilon_ = 0.0;
  bool periodic_ = false;
  bool lattice_ = false;
  std::array<int, 3> cells_{0, 0, 0};
  Vec3 period_ = Vec3::Ones();
  std::vector<int> cell_to_hole_;
};

HoleSet build_perforation(const PerforationConfig& config);

/// Fluid flags (1 = fluid) for every pressure cell and velocity face.
struct Masks {
  std::vector<std::uint8_t> cell;
  std::array<std::vector<std::uint8_t>, 3> face;
  double fluid_fraction = 1.0;
  /// Smallest number of grid cells across any hole diameter; infinity when no hole.
  double min_cells_across = 0.0;

  static Masks all_fluid(const StaggeredGrid& grid);
  bool all_fluid() const;
  bool operator==(const Masks& other) const { return cell == other.cell && face == other.face; }
};

struct RasterOptions {
  double min_cells_across = 4.0;
  bool strict = false;
};

/// Solid cells: centre inside the solid set. Solid faces: centre inside the
/// solid set, or either adjacent cell solid. Box walls make their boundary
/// faces solid.
Masks rasterize_predicate(const StaggeredGrid& grid, const std::function<bool(const Vec3&)>& solid);

/// Rasterizes the holes; warns (stderr) or throws in strict mode when a hole
/// spans fewer than `min_cells_across` cells.
Masks rasterize(const HoleSet& holes, const StaggeredGrid& grid, const RasterOptions& options = {});

}  // namespace homog
