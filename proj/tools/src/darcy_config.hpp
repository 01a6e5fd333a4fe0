#pragma once

#include "homog/darcy.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace homog::cli {

/// darcy-run configuration:
///   grid    {n, domain: torus3 | box3, side}
///   A       [[..],[..],[..]] | {"diag": [..]} | {"file": "resistance.json"}
///   rho0    {kind: constant, value} | {kind: gaussian, center, width,
///           amplitude, background} | {kind: file, path}
///   force   {kind: zero} | {kind: constant, value} | {kind: potential,
///           amplitude} | {kind: shear, amplitude} | {kind: rotating,
///           amplitude, omega} | {kind: frames, times, paths}
///   T, dt, stride, q (list), picard, cfl_max, dump: none | vtk | binary | both
struct DarcyRunConfig {
  nlohmann::json raw;
  StaggeredGrid grid;
  Mat3 A = Mat3::Identity();
  ScalarField rho0;
  ForceField force;
  double T = 0.0;
  double dt = 0.0;
  DarcyOptions options;
  std::string dump = "vtk";
  /// Files read while resolving the configuration (A, rho0, frames).
  std::vector<std::filesystem::path> inputs;
};

/// Relative paths resolve against `base`. Throws ConfigError.
DarcyRunConfig parse_darcy_config(const nlohmann::json& j, const std::filesystem::path& base);

ForceField force_from_json(const nlohmann::json& j, const StaggeredGrid& grid, const std::filesystem::path& base,
                           std::vector<std::filesystem::path>* inputs = nullptr);
ScalarField density_from_json(const nlohmann::json& j, const StaggeredGrid& grid, const std::filesystem::path& base,
                              std::vector<std::filesystem::path>* inputs = nullptr);
Mat3 matrix_from_json(const nlohmann::json& j, const std::filesystem::path& base,
                      std::vector<std::filesystem::path>* inputs = nullptr);

}  // namespace homog::cli
