#include "homog/corrector.hpp"

#include "homog/parallel.hpp"
#include "homog/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace homog {
namespace {

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

// Accumulates integral |f|^p (or max |f| for p = infinity) with weights.
struct PNorm {
  double p;
  double acc = 0.0;
  void add(double weight, double value) {
    const double a = std::abs(value);
    if (std::isinf(p))
      acc = std::max(acc, a);
    else
      acc += weight * std::pow(a, p);
  }
  void merge_scaled(const PNorm& other, double factor) {
    if (std::isinf(p))
      acc = std::max(acc, other.acc);
    else
      acc += factor * other.acc;
  }
  double value() const { return std::isinf(p) ? acc : std::pow(acc, 1.0 / p); }
};

double frobenius(const std::array<ScalarField, 9>& g, std::size_t c) {
  double s = 0.0;
  for (const auto& f : g) s += f[c] * f[c];
  return std::sqrt(s);
}

// Per-zone integrals of one native grid, in native coordinates. `inside`
// selects the cells of the zone; W-values are cell averages.
struct ZoneSums {
  PNorm w;
  std::array<PNorm, 3> grad;
  std::array<PNorm, 3> q;
  explicit ZoneSums(double p) : w{p}, grad{PNorm{p}, PNorm{p}, PNorm{p}}, q{PNorm{p}, PNorm{p}, PNorm{p}} {}
};

ZoneSums zone_integrals(const StaggeredGrid& grid, const Masks& masks, const std::array<VectorField, 3>& v,
                        const std::array<ScalarField, 3>& q, double p, double grad_scale, double q_scale,
                        const std::function<bool(const Vec3&)>& inside) {
  ZoneSums z(p);
  std::array<std::array<ScalarField, 3>, 3> avg;
  std::array<std::array<ScalarField, 9>, 3> grad;
  for (int i = 0; i < 3; ++i) {
    avg[uz(i)] = cell_average(grid, v[uz(i)]);
    grad[uz(i)] = cell_gradient(grid, v[uz(i)]);
  }
  const auto cd = grid.cell_dims();
  for (int k = 0; k < cd[2]; ++k)
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) {
        const Vec3 y = grid.cell_center(i, j, k);
        if (!inside(y)) continue;
        const std::size_t c = grid.cell_index(i, j, k);
        const double vol = grid.cell_volume(i, j, k);
        const bool fluid = masks.cell[c] != 0;
        double w2 = 0.0;
        for (int col = 0; col < 3; ++col)
          for (int d = 0; d < 3; ++d) {
            const double wd = fluid ? avg[uz(col)][uz(d)][c] : 0.0;
            const double diff = wd - (d == col ? 1.0 : 0.0);
            w2 += diff * diff;
          }
        z.w.add(vol, std::sqrt(w2));
        for (int col = 0; col < 3; ++col) {
          z.grad[uz(col)].add(vol, fluid ? grad_scale * frobenius(grad[uz(col)], c) : 0.0);
          z.q[uz(col)].add(vol, fluid ? q_scale * q[uz(col)][c] : 0.0);
        }
      }
  return z;
}

}  // namespace

CorrectorField::CorrectorField(PerforationConfig config, std::shared_ptr<const CellSolution> cell,
                               const CorrectorOptions& options)
    : config_(std::move(config)), cell_(std::move(cell)) {
  config_.validate();
  if (!cell_) throw ConfigError("corrector needs a cell solution");
  if (!(config_.obstacle == cell_->obstacle)) throw ConfigError("cell solution was computed for another obstacle");
  if (options.annulus_cells < 32) throw ConfigError("annulus grid needs at least 32 cells per eps");
  holes_ = build_perforation(config_);
  const Scales sc = derive_scales(config_);
  a_ = sc.a_eps;
  s_ = config_.epsilon / a_;
  if (cell_->R < 0.25 * s_) throw ConfigError("cell truncation insufficient for this ε");

  grid_ = StaggeredGrid::uniform(options.annulus_cells, 1.0, DomainKind::box3, Vec3::Constant(-0.5));
  auto solid = [](const Vec3& xi) {
    const double r = xi.norm();
    return r < 0.25 || r >= 0.5;
  };
  masks_ = rasterize_predicate(grid_, solid);

  const VectorField zero(grid_);
  for (int i = 0; i < 3; ++i) {
    DirichletData data;
    data.wall_velocity = Vec3::Unit(i);
    data.values = VectorField(grid_);
    for (int d = 0; d < 3; ++d) {
      const auto fd = grid_.face_dims(d);
      for (int k = 0; k < fd[2]; ++k)
        for (int j = 0; j < fd[1]; ++j)
          for (int l = 0; l < fd[0]; ++l) {
            const std::size_t f = grid_.face_index(d, l, j, k);
            if (masks_.face[uz(d)][f]) continue;
            const Vec3 xi = grid_.face_center(d, l, j, k);
            data.values[d][f] = xi.norm() >= 0.375 ? (d == i ? 1.0 : 0.0)
                                                   : interpolate(cell_->grid, cell_->v[uz(i)], Vec3(xi * s_))[d];
          }
    }
    auto s = solve_stokes(grid_, masks_, 1.0, zero, options.solver, &data);
    w_[uz(i)] = std::move(s.u);
    r_[uz(i)] = std::move(s.p);
    reports_[uz(i)] = s.report;
  }
}

CorrectorField build_corrector(const PerforationConfig& config, std::shared_ptr<const CellSolution> cell,
                               const CorrectorOptions& options) {
  return CorrectorField(config, std::move(cell), options);
}

Mat3 CorrectorField::W(const Vec3& x) const {
  Vec3 off;
  const int h = holes_.nearest(x, &off);
  if (h < 0) return Mat3::Identity();
  const Vec3 xi = off / config_.epsilon;
  const double r = xi.norm();
  if (r >= 0.5) return Mat3::Identity();
  if (config_.obstacle.contains(off / a_)) return Mat3::Zero();
  Mat3 W;
  for (int i = 0; i < 3; ++i)
    W.col(i) = r < 0.25 ? interpolate(cell_->grid, cell_->v[uz(i)], Vec3(off / a_)) : interpolate(grid_, w_[uz(i)], xi);
  return W;
}

Vec3 CorrectorField::q(const Vec3& x) const {
  Vec3 off;
  const int h = holes_.nearest(x, &off);
  if (h < 0) return Vec3::Zero();
  const Vec3 xi = off / config_.epsilon;
  const double r = xi.norm();
  if (r >= 0.5 || config_.obstacle.contains(off / a_)) return Vec3::Zero();
  Vec3 q;
  for (int i = 0; i < 3; ++i)
    q[i] = r < 0.25 ? interpolate(cell_->grid, cell_->q[uz(i)], Vec3(off / a_)) / a_
                    : interpolate(grid_, r_[uz(i)], xi) / config_.epsilon;
  return q;
}

SampledCorrector sample_corrector(const CorrectorField& corrector, const StaggeredGrid& grid) {
  SampledCorrector out;
  for (auto& f : out.W) f = ScalarField(grid);
  for (auto& f : out.q) f = ScalarField(grid);
  const auto cd = grid.cell_dims();
  par::for_slabs(cd[2], [&](int k) {
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) {
        const Vec3 x = grid.cell_center(i, j, k);
        const std::size_t c = grid.cell_index(i, j, k);
        const Mat3 W = corrector.W(x);
        const Vec3 q = corrector.q(x);
        for (int d = 0; d < 3; ++d) {
          for (int e = 0; e < 3; ++e) out.W[uz(3 * d + e)][c] = W(d, e);
          out.q[uz(d)][c] = q[d];
        }
      }
  });
  return out;
}

CorrectorNorms corrector_norms(const CorrectorField& corrector, double p) {
  if (!(p >= 1.0)) throw ConfigError("norm exponent must be at least 1");
  const double eps = corrector.config().epsilon;
  const double a = corrector.a_eps();
  const double rho = 0.25 * corrector.cell_scale();
  const CellSolution& cell = corrector.cell();

  // Inner zone in cell coordinates y: dx = a^3 dy, grad_x = grad_y / a.
  const ZoneSums inner = zone_integrals(cell.grid, cell.masks, cell.v, cell.q, p, 1.0 / a, 1.0 / a,
                                        [&](const Vec3& y) { return y.norm() < rho; });
  // Shell in annulus coordinates xi: dx = eps^3 dxi, grad_x = grad_xi / eps.
  std::array<VectorField, 3> w;
  std::array<ScalarField, 3> r;
  for (int i = 0; i < 3; ++i) {
    w[uz(i)] = corrector.annulus_velocity(i);
    r[uz(i)] = corrector.annulus_pressure(i);
  }
  const ZoneSums shell = zone_integrals(corrector.annulus_grid(), corrector.annulus_masks(), w, r, p, 1.0 / eps,
                                        1.0 / eps, [](const Vec3& xi) {
                                          const double n = xi.norm();
                                          return n >= 0.25 && n < 0.5;
                                        });

  const double holes = static_cast<double>(corrector.holes().size());
  auto combine = [&](const PNorm& in, const PNorm& sh) {
    PNorm t{p};
    t.merge_scaled(in, holes * a * a * a);
    t.merge_scaled(sh, holes * eps * eps * eps);
    return t.value();
  };
  CorrectorNorms n;
  n.p = p;
  n.w_minus_id = combine(inner.w, shell.w);
  for (int i = 0; i < 3; ++i) {
    n.grad_v[uz(i)] = combine(inner.grad[uz(i)], shell.grad[uz(i)]);
    n.q[uz(i)] = combine(inner.q[uz(i)], shell.q[uz(i)]);
  }
  return n;
}

double corrector_divergence_residual(const CorrectorField& corrector) {
  double worst = 0.0;
  for (const auto& r : corrector.reports()) worst = std::max(worst, r.divergence_residual);
  for (const auto& r : corrector.cell().reports) worst = std::max(worst, r.divergence_residual);
  return worst;
}

CorrectorStudy verify_corrector_estimates(const std::vector<PerforationConfig>& configs,
                                          const std::vector<double>& p_list, const CorrectorRateOptions& options) {
  if (configs.size() < 3) throw ConfigError("need ≥ 3 points");
  if (p_list.empty()) throw ConfigError("no norm exponents given");
  for (double p : p_list)
    if (!(p > 1.5)) throw ConfigError("norm exponents must exceed 3/2");
  const double alpha = configs.front().alpha;
  for (const auto& c : configs) {
    c.validate();
    if (c.alpha != alpha) throw ConfigError("corrector study needs a fixed alpha");
    if (!(c.obstacle == configs.front().obstacle)) throw ConfigError("corrector study needs a fixed obstacle");
  }
  double need = 0.0;
  for (const auto& c : configs) need = std::max(need, 0.25 * c.epsilon / derive_scales(c).a_eps);
  CorrectorStudy study;
  study.R = options.R > 0.0 ? options.R : std::max(2.0, options.truncation_factor * need);
  const auto cell = std::make_shared<const CellSolution>(solve_cell(configs.front().obstacle, study.R, options.cell));

  std::vector<CorrectorNorms> norms;
  std::vector<double> eps;
  for (const auto& c : configs) {
    const CorrectorField field = build_corrector(c, cell, options.corrector);
    for (double p : p_list) {
      const CorrectorNorms n = corrector_norms(field, p);
      norms.push_back(n);
      study.rows.push_back({c.epsilon, alpha, p, "W-Id", n.w_minus_id});
      for (int i = 0; i < 3; ++i)
        study.rows.push_back({c.epsilon, alpha, p, "grad_v" + std::to_string(i + 1), n.grad_v[uz(i)]});
      for (int i = 0; i < 3; ++i) study.rows.push_back({c.epsilon, alpha, p, "q" + std::to_string(i + 1), n.q[uz(i)]});
    }
    eps.push_back(c.epsilon);
  }

  for (double p : p_list) {
    const std::string tag = std::isinf(p) ? "inf" : std::to_string(static_cast<int>(p));
    const double w_rate = (std::isinf(p) ? 0.0 : std::min(1.0, 3.0 / p)) * (alpha - 1.0);
    const double g_rate = (std::isinf(p) ? 0.0 : 3.0 / p) * (alpha - 1.0) - alpha;
    const double band = std::isinf(p) ? options.band_inf : options.band;
    auto series = [&](const std::string& kind) {
      std::vector<RateRow> rows;
      for (const auto& r : study.rows)
        if (r.p == p && r.norm_kind == kind) rows.push_back({r.eps, r.value});
      return rows;
    };
    RateReport w = fit_rate(series("W-Id"), "W-Id L" + tag);
    w.require_band(w_rate, band);
    study.pass = study.pass && w.pass;
    study.fits.push_back(w);
    for (int i = 1; i <= 3; ++i) {
      RateReport g = fit_rate(series("grad_v" + std::to_string(i)), "grad_v" + std::to_string(i) + " L" + tag);
      g.require_band(g_rate, options.band);
      study.pass = study.pass && g.pass;
      study.fits.push_back(g);
    }
    for (int i = 1; i <= 3; ++i) {
      auto rows = series("q" + std::to_string(i));
      const bool positive = std::all_of(rows.begin(), rows.end(), [](const RateRow& r) { return r.value > 0.0; });
      if (!positive) continue;
      RateReport q = fit_rate(rows, "q" + std::to_string(i) + " L" + tag);
      q.expected = g_rate;
      study.fits.push_back(q);
    }
  }
  return study;
}

}  // namespace homog
