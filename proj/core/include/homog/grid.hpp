#pragma once

#include "homog/types.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace homog {

/// One coordinate axis of a rectilinear grid. Cells are [face(i), face(i+1)).
/// A periodic axis identifies face(n) with face(0); a wall axis keeps both
/// boundary faces.
class Axis {
 public:
  Axis() = default;
  static Axis uniform(int cells, double length, double origin = 0.0, bool periodic = false);
  static Axis from_faces(std::vector<double> faces, bool periodic);

  /// Uniform core of `core_cells` cells on [-core_half, core_half], then
  /// geometric stretching out to [-half_length, half_length]. `cells` is the
  /// total count and must leave an even number outside the core.
  static Axis graded_symmetric(int cells, double half_length, double core_half, int core_cells);

  /// `repeats` copies of a graded segment of length `period`, each with a
  /// uniform core of `core_cells` cells of width `core_width` centred in the
  /// segment. Always periodic.
  static Axis graded_tiled(int repeats, double period, int cells_per_period, double core_width,
                           int core_cells);

  int cells() const { return static_cast<int>(widths_.size()); }
  int face_count() const { return periodic_ ? cells() : cells() + 1; }
  bool periodic() const { return periodic_; }
  double origin() const { return faces_.front(); }
  double length() const { return faces_.back() - faces_.front(); }
  double face(int i) const { return faces_[static_cast<std::size_t>(i)]; }
  double center(int i) const { return centers_[static_cast<std::size_t>(i)]; }
  double width(int i) const { return widths_[static_cast<std::size_t>(i)]; }
  /// Distance between the centres of the two cells sharing face i; for the
  /// boundary faces of a wall axis, the half width of the adjacent cell.
  double gap(int i) const { return gaps_[static_cast<std::size_t>(i)]; }
  double min_width() const;
  double max_width() const;
  bool is_uniform(double rel_tol = 1e-12) const;
  /// Index of the cell containing x (wrapped on periodic axes, clamped on walls).
  int locate(double x) const;
  const std::vector<double>& faces() const { return faces_; }

  bool operator==(const Axis& other) const {
    return periodic_ == other.periodic_ && faces_ == other.faces_;
  }

 private:
  void finalize();

  std::vector<double> faces_;
  std::vector<double> centers_;
  std::vector<double> widths_;
  std::vector<double> gaps_;
  bool periodic_ = false;
};

enum class DomainKind { torus3, box3 };

/// MAC staggered grid: pressure at cell centres, velocity component d at the
/// centres of faces normal to axis d.
class StaggeredGrid {
 public:
  StaggeredGrid() = default;
  StaggeredGrid(Axis x, Axis y, Axis z);
  /// n^3 uniform cells on [origin, origin + side)^3.
  static StaggeredGrid uniform(int n, double side, DomainKind kind, Vec3 origin = Vec3::Zero());

  const Axis& axis(int d) const { return axes_[static_cast<std::size_t>(d)]; }
  DomainKind kind() const { return kind_; }
  bool periodic() const { return kind_ == DomainKind::torus3; }

  std::array<int, 3> cell_dims() const { return {axes_[0].cells(), axes_[1].cells(), axes_[2].cells()}; }
  std::array<int, 3> face_dims(int d) const {
    auto dims = cell_dims();
    dims[static_cast<std::size_t>(d)] = axes_[static_cast<std::size_t>(d)].face_count();
    return dims;
  }
  std::size_t cell_count() const;
  std::size_t face_count(int d) const;

  std::size_t cell_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(nx_) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny_) * k);
  }
  std::size_t face_index(int d, int i, int j, int k) const {
    const auto& fd = fdims_[static_cast<std::size_t>(d)];
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(fd[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(fd[1]) * k);
  }

  Vec3 cell_center(int i, int j, int k) const {
    return {axes_[0].center(i), axes_[1].center(j), axes_[2].center(k)};
  }
  Vec3 face_center(int d, int i, int j, int k) const;
  double cell_volume(int i, int j, int k) const {
    return axes_[0].width(i) * axes_[1].width(j) * axes_[2].width(k);
  }
  /// Control volume of a velocity unknown (half cells at wall boundaries).
  double face_volume(int d, int i, int j, int k) const;
  double domain_volume() const { return axes_[0].length() * axes_[1].length() * axes_[2].length(); }
  double min_spacing() const;

  bool operator==(const StaggeredGrid& other) const { return axes_ == other.axes_; }

 private:
  std::array<Axis, 3> axes_;
  std::array<std::array<int, 3>, 3> fdims_{};
  DomainKind kind_ = DomainKind::torus3;
  int nx_ = 0;
  int ny_ = 0;
};

/// Minimal-image difference a - b on a periodic axis of length L.
inline double wrap_delta(double delta, double length) {
  if (length <= 0.0) return delta;
  delta -= length * std::floor(delta / length + 0.5);
  return delta;
}

}  // namespace homog
