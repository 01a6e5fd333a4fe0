#pragma once

#include "homog/cell_problem.hpp"
#include "homog/fields.hpp"
#include "homog/geometry.hpp"
#include "homog/rate_fit.hpp"
#include "homog/solve_report.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace homog {

struct CorrectorOptions {
  /// Cells per eps across the annulus box [-eps/2, eps/2]^3.
  int annulus_cells = 32;
  SolverOptions solver;
};

/// Glued corrector (W_eps, q_eps) for one configuration. Column i of W is
/// v^i_eps. Around each hole x_k, with xi = (x - x_k) / eps:
///   |xi| >= 1/2          W = Id, q = 0
///   1/4 <= |xi| < 1/2    annulus Stokes solution (one solve, translated)
///   |xi| < 1/4           W = v((x - x_k) / a), q = q((x - x_k) / a) / a
///   inside the hole      W = 0, q = 0
/// Cells without a hole (box walls) carry W = Id, q = 0.
class CorrectorField {
 public:
  CorrectorField(PerforationConfig config, std::shared_ptr<const CellSolution> cell,
                 const CorrectorOptions& options = {});

  Mat3 W(const Vec3& x) const;
  Vec3 q(const Vec3& x) const;

  const PerforationConfig& config() const { return config_; }
  const HoleSet& holes() const { return holes_; }
  const CellSolution& cell() const { return *cell_; }
  double a_eps() const { return a_; }
  /// eps / a_eps: maps annulus coordinates xi to cell coordinates y.
  double cell_scale() const { return s_; }
  const StaggeredGrid& annulus_grid() const { return grid_; }
  const Masks& annulus_masks() const { return masks_; }
  const VectorField& annulus_velocity(int i) const { return w_[static_cast<std::size_t>(i)]; }
  const ScalarField& annulus_pressure(int i) const { return r_[static_cast<std::size_t>(i)]; }
  const std::array<SolveReport, 3>& reports() const { return reports_; }

 private:
  PerforationConfig config_;
  HoleSet holes_;
  std::shared_ptr<const CellSolution> cell_;
  double a_ = 0.0;
  double s_ = 0.0;
  StaggeredGrid grid_;
  Masks masks_;
  std::array<VectorField, 3> w_;
  std::array<ScalarField, 3> r_;
  std::array<SolveReport, 3> reports_;
};

/// Throws ConfigError("cell truncation insufficient for this ε") when the
/// cell box does not reach radius eps^(1-alpha)/4, and SolveFailure from the
/// annulus solves.
CorrectorField build_corrector(const PerforationConfig& config, std::shared_ptr<const CellSolution> cell,
                               const CorrectorOptions& options = {});

/// W and q sampled at the cell centres of `grid`; W entry 3 * d + i is W_di.
struct SampledCorrector {
  std::array<ScalarField, 9> W;
  std::array<ScalarField, 3> q;
};
SampledCorrector sample_corrector(const CorrectorField& corrector, const StaggeredGrid& grid);

/// L^p norms over the whole domain (p = infinity allowed), by exact zone
/// integration on the native grids: the cell grid for |xi| < 1/4 and the
/// annulus grid for the shell. Norms of matrices are Frobenius norms.
struct CorrectorNorms {
  double p = 2.0;
  double w_minus_id = 0.0;
  std::array<double, 3> grad_v{};
  std::array<double, 3> q{};
};
CorrectorNorms corrector_norms(const CorrectorField& corrector, double p);

/// Largest relative divergence residual of the native solves (cell and annulus).
double corrector_divergence_residual(const CorrectorField& corrector);

struct CorrectorRateOptions {
  CellOptions cell;
  /// Cell truncation radius; 0 picks max(2, truncation_factor * rho_max)
  /// with rho_max = eps^(1-alpha)/4 the largest inner-zone radius in cell
  /// coordinates. The Dirichlet box pulls v towards e^i near |y| = R, so the
  /// inner zone must stay well inside it.
  double R = 0.0;
  double truncation_factor = 4.0;
  CorrectorOptions corrector;
  double band = 0.3;
  double band_inf = 0.2;
};

struct CorrectorRateRow {
  double eps = 0.0;
  double alpha = 0.0;
  double p = 2.0;
  std::string norm_kind;
  double value = 0.0;
};

struct CorrectorStudy {
  std::vector<CorrectorRateRow> rows;
  std::vector<RateReport> fits;
  bool pass = true;
  double R = 0.0;
};

/// Builds the corrector for every configuration (one cell solve shared by
/// all) and fits log-log slopes of ||W - Id||_p, ||grad v^i||_p and ||q^i||_p.
/// Bands: min(1, 3/p)(alpha - 1) for W - Id, (3/p)(alpha - 1) - alpha for the
/// gradient; q slopes are reported without a band.
CorrectorStudy verify_corrector_estimates(const std::vector<PerforationConfig>& configs,
                                          const std::vector<double>& p_list,
                                          const CorrectorRateOptions& options = {});

}  // namespace homog
