#pragma once

#include "homog/types.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace homog {

/// Outcome of an iterative solve. Residuals are relative and measured on the
/// true (unpreconditioned) system after the iteration stops.
struct SolveReport {
  std::string method;
  std::string preconditioner;
  int iterations = 0;
  double momentum_residual = 0.0;
  double divergence_residual = 0.0;
  /// Cell-centred L2 norm of div u in physical units (Stokes solves only).
  double divergence_l2 = 0.0;
  double tolerance = 0.0;
  double wall_seconds = 0.0;
  bool converged = false;
  /// Solver-specific extras (removed force mean, compatibility correction, ...).
  std::map<std::string, double> extra;

  nlohmann::json to_json() const;
};

/// Non-convergence; carries the report of the failed solve.
class SolveFailure : public SolverError {
 public:
  SolveFailure(const std::string& what, SolveReport report) : SolverError(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

struct SolverOptions {
  enum class Method { minres, uzawa };
  enum class Preconditioner { dic, jacobi };

  double tol = 1e-8;
  int max_iter = 10000;
  Method method = Method::minres;
  Preconditioner preconditioner = Preconditioner::dic;
};

}  // namespace homog
