#pragma once

#include "homog/fields.hpp"
#include "homog/geometry.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace homog {

/// Configuration file keys: epsilon, alpha, obstacle{kind, param},
/// domain{kind, side}, mu. Obstacle kinds: none, ball (param = radius),
/// cube (param = half width), sdf (n, extent, values).
nlohmann::json to_json(const Obstacle& obstacle);
Obstacle obstacle_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PerforationConfig& config);
/// Missing keys keep their defaults; throws ConfigError on malformed input.
PerforationConfig config_from_json(const nlohmann::json& j);

/// Parses a JSON file; throws ConfigError when it cannot be read or parsed.
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Shortest round-trip decimal form ('.' separator, no locale).
std::string format_number(double v);

/// Header row, comma separated, LF line endings.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

/// Legacy VTK: STRUCTURED_POINTS on uniform grids, RECTILINEAR_GRID
/// otherwise, cell data only. Vector fields are written as cell averages.
void write_vtk(const std::filesystem::path& path, const StaggeredGrid& grid, const std::string& name,
               const ScalarField& f);
void write_vtk(const std::filesystem::path& path, const StaggeredGrid& grid, const std::string& name,
               const VectorField& u);
void write_vtk_mask(const std::filesystem::path& path, const StaggeredGrid& grid, const Masks& masks);

/// Raw little-endian float64 plus `<path>.json` holding dims, axes faces,
/// dtype and byte order. Returns the sidecar path.
std::filesystem::path write_binary(const std::filesystem::path& path, const StaggeredGrid& grid,
                                   const std::string& name, const ScalarField& f);
/// Components in order x, y, z, each over its own face dims.
std::filesystem::path write_binary(const std::filesystem::path& path, const StaggeredGrid& grid,
                                   const std::string& name, const VectorField& u);
/// Throws ConfigError when the sidecar does not describe a field on `grid`.
ScalarField read_binary_scalar(const std::filesystem::path& path, const StaggeredGrid& grid);
VectorField read_binary_vector(const std::filesystem::path& path, const StaggeredGrid& grid);

}  // namespace homog
