#include "homog/microscale.hpp"

#include "homog/aniso.hpp"
#include "homog/eigen_solver.hpp"
#include "homog/parallel.hpp"
#include "homog/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace homog {
namespace {

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

}  // namespace

StaggeredGrid micro_grid(const PerforationConfig& config, const MicroOptions& options) {
  config.validate();
  if (config.domain != DomainKind::torus3) throw ConfigError("microscale runs need a torus domain");
  const double repeats_d = 1.0 / config.epsilon;
  const int repeats = static_cast<int>(std::lround(repeats_d));
  if (std::abs(repeats - repeats_d) > 1e-9 * repeats_d) throw ConfigError("1/eps not integer");
  if (repeats * options.cells_per_period > options.max_cells)
    throw ConfigError("grid exceeds " + std::to_string(options.max_cells) + " cells per axis");
  const double diameter = 2.0 * config.obstacle.bounding_radius() * derive_scales(config).a_eps;
  if (config.obstacle.empty() || options.core_cells == options.cells_per_period) {
    const Axis ax = Axis::uniform(repeats * options.cells_per_period, 1.0, 0.0, true);
    return StaggeredGrid(ax, ax, ax);
  }
  const double core = std::min(options.core_diameters * diameter, 0.5 * config.epsilon);
  const Axis ax = Axis::graded_tiled(repeats, config.epsilon, options.cells_per_period, core, options.core_cells);
  return StaggeredGrid(ax, ax, ax);
}

MicroSolution solve_microscale_steady(const PerforationConfig& config, const Forcing& g, const MicroOptions& options) {
  MicroSolution sol;
  sol.config = config;
  sol.grid = micro_grid(config, options);
  const HoleSet holes = build_perforation(config);
  sol.masks = rasterize(holes, sol.grid, {options.min_cells_across, options.strict});
  sol.sigma_eps = derive_scales(config).sigma_eps;
  sol.g = sample_faces(sol.grid, g);
  for (int d = 0; d < 3; ++d)
    for (double v : sol.g[d])
      if (!std::isfinite(v)) throw ConfigError("forcing is not finite");
  const double nu = sol.sigma_eps * sol.sigma_eps * config.mu;
  auto st = solve_stokes(sol.grid, sol.masks, nu, sol.g, options.solver);
  sol.u = std::move(st.u);
  sol.p = std::move(st.p);
  sol.report = std::move(st.report);
  return sol;
}

DarcyComparison field_errors(const StaggeredGrid& grid, const Masks& masks, const VectorField& u, const ScalarField& p,
                             const VectorField& u_ref, const ScalarField& p_ref) {
  if (!u.matches(grid) || !u_ref.matches(grid) || !p.matches(grid) || !p_ref.matches(grid))
    throw ConfigError("fields do not match the grid");
  DarcyComparison c;
  const auto* fluid = masks.cell.empty() ? nullptr : &masks.cell;
  ScalarField a = p;
  ScalarField b = p_ref;
  remove_mean(grid, a, fluid);
  remove_mean(grid, b, fluid);
  c.err_u = l2_distance(grid, u, u_ref);
  c.err_p = l2_distance(grid, a, b, fluid);
  c.norm_u = l2_norm(grid, u_ref);
  c.norm_p = lp_norm(grid, b, 2.0, fluid);
  return c;
}

DarcyComparison compare_to_darcy(const MicroSolution& micro, const Mat3& A, const SolverOptions& options) {
  if (micro.config.obstacle.empty() || micro.masks.all_fluid() || !A.allFinite())
    throw SolverError("degenerate resistance");
  try {
    require_spd(A, "permeability");
  } catch (const ConfigError&) {
    throw SolverError("degenerate resistance");
  }
  const StaggeredGrid& grid = micro.grid;
  if (!micro.g.matches(grid)) throw ConfigError("forcing does not match the grid");

  const VectorField flux = apply_tensor(grid, A, micro.g);
  auto sol = solve_aniso_neumann(grid, A, flux, options);
  const VectorField Fp = aniso_flux(grid, A, sol.p);
  VectorField uD(grid);
  for (int d = 0; d < 3; ++d)
    for (std::size_t f = 0; f < uD[d].size(); ++f) uD[d][f] = flux[d][f] - Fp[d][f];

  DarcyComparison c = field_errors(grid, micro.masks, micro.u, micro.p, uD, sol.p);
  c.u_darcy = std::move(uD);
  c.p_darcy = std::move(sol.p);
  c.report = std::move(sol.report);
  return c;
}

double EnergyBalance::relative_defect() const {
  const double scale = std::max(std::abs(dissipation), std::abs(work));
  return scale > 0.0 ? std::abs(dissipation - work) / scale : 0.0;
}

EnergyBalance energy_balance(const MicroSolution& micro) {
  EnergyBalance e;
  const double nu = micro.sigma_eps * micro.sigma_eps * micro.config.mu;
  e.dissipation = nu * gradient_inner(micro.grid, micro.masks, micro.u, Vec3::Zero(), micro.u, Vec3::Zero());
  VectorField g = micro.g;
  for (int d = 0; d < 3; ++d)
    for (std::size_t f = 0; f < g[d].size(); ++f)
      if (!micro.masks.face[uz(d)][f]) g[d][f] = 0.0;
  e.work = inner(micro.grid, g, micro.u);
  return e;
}

PoincareResult poincare_cell(const Obstacle& obstacle, double scale, const PoincareOptions& options) {
  PoincareResult res;
  res.cell_scale = scale;
  StaggeredGrid grid;
  Masks masks;
  if (obstacle.empty() || !(scale > 0.0)) {
    grid = StaggeredGrid::uniform(options.n, 1.0, DomainKind::torus3);
    masks = Masks::all_fluid(grid);
  } else {
    const double radius = obstacle.bounding_radius() * scale;
    if (!(radius < 0.25)) throw ConfigError("hole does not fit inside the eps/4 ball");
    const Axis ax = Axis::graded_tiled(1, 1.0, options.n, std::min(options.core_radii * radius, 0.75),
                                       options.core_cells);
    grid = StaggeredGrid(ax, ax, ax);
    const Vec3 c = Vec3::Constant(0.5);
    masks = rasterize_predicate(grid, [&](const Vec3& x) { return obstacle.contains((x - c) / scale); });
  }
  const auto eig = smallest_eigenvalue(grid, masks, options.solver);
  res.lambda_min = eig.lambda;
  res.degenerate = eig.degenerate;
  res.report = eig.report;
  return res;
}

PoincareResult poincare_constant(const PerforationConfig& config, const PoincareOptions& options) {
  config.validate();
  const Scales s = derive_scales(config);
  PoincareResult res = poincare_cell(config.obstacle, s.a_eps / config.epsilon, options);
  res.eps = config.epsilon;
  res.alpha = config.alpha;
  res.sigma_eps = s.sigma_eps;
  res.sigma_check =
      res.degenerate || !(res.lambda_min > 0.0) ? std::numeric_limits<double>::infinity()
                                                : config.epsilon / std::sqrt(res.lambda_min);
  return res;
}

double relative_energy(const StaggeredGrid& grid, const ScalarField& rho, const VectorField& u, const ScalarField& r,
                       const VectorField& U, double sigma_eps, const std::vector<std::uint8_t>* mask) {
  if (!rho.matches(grid) || !r.matches(grid) || !u.matches(grid) || !U.matches(grid))
    throw ConfigError("fields do not match the grid");
  if (mask && mask->size() != grid.cell_count()) throw ConfigError("mask does not match the grid");
  for (double v : rho.values)
    if (!(v >= 0.0)) throw ConfigError("density must be non-negative");
  const auto uc = cell_average(grid, u);
  const auto Uc = cell_average(grid, U);
  const double s4 = std::pow(sigma_eps, 4);
  const auto cd = grid.cell_dims();
  return par::sum_slabs(cd[2], [&](int k) {
    double s = 0.0;
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) {
        const std::size_t c = grid.cell_index(i, j, k);
        if (mask && !(*mask)[c]) continue;
        double w2 = 0.0;
        for (std::size_t d = 0; d < 3; ++d) {
          const double w = uc[d][c] - Uc[d][c];
          w2 += w * w;
        }
        const double dr = rho[c] - r[c];
        s += grid.cell_volume(i, j, k) * (0.5 * s4 * rho[c] * w2 + 0.5 * dr * dr);
      }
    return s;
  });
}

MicroStudy run_micro_ladder(const std::vector<PerforationConfig>& configs, const Mat3& A, const Forcing& g,
                            const MicroOptions& options, const PoincareOptions& poincare, double min_slope) {
  if (configs.size() < 3) throw ConfigError("need ≥ 3 points");
  std::vector<PerforationConfig> sorted = configs;
  std::sort(sorted.begin(), sorted.end(),
            [](const PerforationConfig& a, const PerforationConfig& b) { return a.epsilon > b.epsilon; });
  MicroStudy study;
  std::vector<RateRow> ru, rp;
  for (const auto& cfg : sorted) {
    const MicroSolution micro = solve_microscale_steady(cfg, g, options);
    const DarcyComparison cmp = compare_to_darcy(micro, A, options.solver);
    const PoincareResult pc = poincare_constant(cfg, poincare);
    study.rows.push_back({cfg.epsilon, cfg.alpha, cmp.err_u, cmp.err_p, pc.lambda_min, pc.sigma_check});
    study.reports.push_back(micro.report);
    ru.push_back({cfg.epsilon, cmp.err_u});
    rp.push_back({cfg.epsilon, cmp.err_p});
  }
  for (std::size_t i = 2; i < study.rows.size(); ++i)
    if (!(study.rows[i].err_u < study.rows[i - 1].err_u)) ++study.monotone_violations;
  study.fit_u = fit_rate(ru, "err_u");
  study.fit_u.require_min(min_slope);
  study.fit_p = fit_rate(rp, "err_p");
  study.pass = study.monotone_violations == 0 && study.fit_u.pass;
  return study;
}

PoincareStudy run_poincare_ladder(const std::vector<PerforationConfig>& configs, const PoincareOptions& options,
                                  double band) {
  if (configs.size() < 3) throw ConfigError("need ≥ 3 points");
  PoincareStudy study;
  std::vector<RateRow> rows;
  for (const auto& cfg : configs) {
    study.rows.push_back(poincare_constant(cfg, options));
    if (study.rows.back().degenerate) throw SolverError("degenerate Poincare cell: no hole");
    rows.push_back({cfg.epsilon, study.rows.back().sigma_check});
  }
  study.fit = fit_rate(rows, "sigma_check");
  study.fit.require_band(0.5 * (3.0 - configs.front().alpha), band);
  study.pass = study.fit.pass;
  return study;
}

Forcing default_forcing() {
  return [](const Vec3& x) {
    constexpr double tau = 2.0 * std::numbers::pi;
    const double sx = std::sin(tau * x[0]), sy = std::sin(tau * x[1]), sz = std::sin(tau * x[2]);
    const double cx = std::cos(tau * x[0]), cy = std::cos(tau * x[1]), cz = std::cos(tau * x[2]);
    // curl-free part: grad of cos(tau x) cos(tau y) cos(tau z) / tau
    return Vec3(sy + 0.5 * (-sx * cy * cz), sz + 0.5 * (-cx * sy * cz), sx + 0.5 * (-cx * cy * sz));
  };
}

}  // namespace homog
