#pragma once

#include "homog/aniso.hpp"
#include "homog/fields.hpp"
#include "homog/solve_report.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace homog {

struct DarcyState {
  double t = 0.0;
  ScalarField rho;
  VectorField u;
  ScalarField p;
};

/// External force f(t, x): an analytic function or sampled frames, linear in
/// time between frames.
class ForceField {
 public:
  using Function = std::function<Vec3(double, const Vec3&)>;

  ForceField() = default;
  static ForceField analytic(Function f, nlohmann::json descriptor = {});
  static ForceField frames(std::vector<double> times, std::vector<VectorField> frames);

  /// Throws ConfigError on non-finite values or t outside the frames.
  VectorField sample(const StaggeredGrid& grid, double t) const;
  bool covers(double t0, double t1) const;
  bool is_zero() const { return zero_; }
  const nlohmann::json& descriptor() const { return descriptor_; }

  static ForceField zero();

 private:
  Function fn_;
  std::vector<double> times_;
  std::vector<VectorField> frames_;
  nlohmann::json descriptor_;
  bool zero_ = false;
};

/// Flux rho (A f) at faces; rho is averaged from the two adjacent cells and
/// the transverse components of f are interpolated. Wall faces carry zero.
VectorField density_flux(const StaggeredGrid& grid, const ScalarField& rho, const VectorField& f, const Mat3& A);

/// div(A grad p) = div(rho A f) with no normal flux on walls. Throws
/// ConfigError for negative density or a non-SPD A.
AnisoSolution pressure_solve(const StaggeredGrid& grid, const ScalarField& rho, const VectorField& f, const Mat3& A,
                             const SolverOptions& options = {});

/// u = rho A f - A grad p; wall-normal faces are exactly zero.
VectorField assemble_velocity(const StaggeredGrid& grid, const ScalarField& rho, const VectorField& f,
                              const ScalarField& p, const Mat3& A);

struct TransportOptions {
  double cfl_max = 5.0;
};

/// Largest |u| dt / h over faces.
double cfl_number(const StaggeredGrid& grid, const VectorField& u, double dt);

/// Semi-Lagrangian step: backward RK2 characteristic from every cell centre,
/// clipped to the domain on wall axes, trilinear interpolation of rho at the
/// foot. Throws SolverError on non-finite velocity and ConfigError when the
/// CFL number exceeds the limit.
ScalarField transport_step(const StaggeredGrid& grid, const ScalarField& rho, const VectorField& u, double dt,
                           const TransportOptions& options = {});

/// Restores the integral `mass` by moving every cell towards lo or hi in
/// proportion to its room; values stay within [lo, hi]. Returns the relative
/// correction applied.
double fix_mass(const StaggeredGrid& grid, ScalarField& rho, double mass, double lo, double hi);

struct LedgerRow {
  int step = 0;
  double t = 0.0;
  double mass = 0.0;
  double l2 = 0.0;
  /// ||rho||_q for the configured q values.
  std::vector<double> lq;
  double min = 0.0;
  double max = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  /// Velocity of this level: ||div u||_2, CFL number, pressure solve.
  double div_l2 = 0.0;
  double cfl = 0.0;
  int pressure_iterations = 0;
  /// ||p||_2 / (max rho * ||f||_2).
  double pressure_ratio = 0.0;
  double mass_correction = 0.0;
  int picard_iterations = 0;
};

struct DarcyOptions {
  SolverOptions solver;
  TransportOptions transport;
  /// Keep every `stride`-th state (the last state is always kept).
  int stride = 1;
  std::vector<double> q_list{2.0, 4.0};
  bool mass_fix = true;
  /// Iterate each step with the velocity of (rho^n + rho^(n+1)) / 2 until the
  /// update changes by less than picard_tol.
  bool picard = false;
  double picard_tol = 1e-10;
  int picard_max = 20;
};

struct Trajectory {
  StaggeredGrid grid;
  Mat3 A = Mat3::Identity();
  double dt = 0.0;
  int steps = 0;
  std::vector<double> q_list;
  std::vector<DarcyState> states;
  std::vector<LedgerRow> ledger;
  /// Step at which a solve failed (-1 when the run completed).
  int failed_step = -1;
  std::string failure;
};

/// Failure inside the time loop; carries the partial trajectory.
class DarcyRunFailure : public SolverError {
 public:
  DarcyRunFailure(const std::string& what, std::shared_ptr<Trajectory> partial)
      : SolverError(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return *partial_; }

 private:
  std::shared_ptr<Trajectory> partial_;
};

/// Time loop: per level pressure_solve, assemble_velocity, transport_step.
/// T / dt is rounded up to whole steps of equal length.
Trajectory run_darcy(const StaggeredGrid& grid, const ScalarField& rho0, const ForceField& force, const Mat3& A,
                     double T, double dt, const DarcyOptions& options = {});

/// Discrete norms used by the ledger.
double h1_norm(const StaggeredGrid& grid, const ScalarField& rho);
double h2_norm(const StaggeredGrid& grid, const ScalarField& rho);
LedgerRow measure(const StaggeredGrid& grid, const ScalarField& rho, const std::vector<double>& q_list);

struct ConservationRow {
  int step = 0;
  double t = 0.0;
  double mass_drift = 0.0;
  /// Relative drift of integral rho^q per requested q.
  std::vector<double> lq_drift;
  double min = 0.0;
  double max = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

/// Drifts relative to step 0. Each q must be one the run recorded.
std::vector<ConservationRow> conservation_report(const Trajectory& traj, const std::vector<double>& q_list);

}  // namespace homog
