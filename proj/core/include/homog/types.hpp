#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace homog {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Invalid input: bad configuration, violated precondition, mismatched grids.
/// The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (non-convergence, degenerate data).
/// The CLI maps this to exit code 2.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace homog
