#include "homog/darcy.hpp"

#include "homog/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace homog {
namespace {

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

bool interior_face(const Axis& ax, int I) { return ax.periodic() || (I > 0 && I < ax.cells()); }

void require_density(const StaggeredGrid& grid, const ScalarField& rho) {
  if (!rho.matches(grid)) throw ConfigError("density does not match the grid");
  for (double v : rho.values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("density must be finite and non-negative");
}

double vector_l2(const StaggeredGrid& grid, const VectorField& f) { return l2_norm(grid, f); }

double field_max(const ScalarField& f) { return *std::max_element(f.values.begin(), f.values.end()); }
double field_min(const ScalarField& f) { return *std::min_element(f.values.begin(), f.values.end()); }

}  // namespace

ForceField ForceField::analytic(Function f, nlohmann::json descriptor) {
  ForceField out;
  out.fn_ = std::move(f);
  out.descriptor_ = std::move(descriptor);
  return out;
}

ForceField ForceField::zero() {
  ForceField out = analytic([](double, const Vec3&) { return Vec3::Zero().eval(); }, {{"kind", "zero"}});
  out.zero_ = true;
  return out;
}

ForceField ForceField::frames(std::vector<double> times, std::vector<VectorField> frames) {
  if (times.empty() || times.size() != frames.size()) throw ConfigError("force frames need one time per frame");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ConfigError("force frame times must increase");
  ForceField out;
  out.times_ = std::move(times);
  out.frames_ = std::move(frames);
  out.descriptor_ = {{"kind", "frames"}, {"times", out.times_}};
  return out;
}

bool ForceField::covers(double t0, double t1) const {
  if (fn_) return true;
  if (times_.empty()) return false;
  const double slack = 1e-12 * std::max(1.0, std::abs(t1));
  return times_.front() <= t0 + slack && times_.back() >= t1 - slack;
}

VectorField ForceField::sample(const StaggeredGrid& grid, double t) const {
  VectorField out;
  if (fn_) {
    out = sample_faces(grid, [&](const Vec3& x) { return fn_(t, x); });
  } else {
    if (!covers(t, t)) throw ConfigError("force frames do not cover t = " + std::to_string(t));
    for (const auto& fr : frames_)
      if (!fr.matches(grid)) throw ConfigError("force frame does not match the grid");
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin() || it == times_.end()) {
      out = it == times_.begin() ? frames_.front() : frames_.back();
    } else {
      const std::size_t i = static_cast<std::size_t>(it - times_.begin());
      const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
      out = frames_[i - 1];
      for (int d = 0; d < 3; ++d)
        for (std::size_t f = 0; f < out[d].size(); ++f) out[d][f] = std::lerp(out[d][f], frames_[i][d][f], w);
    }
  }
  for (int d = 0; d < 3; ++d)
    for (double v : out[d])
      if (!std::isfinite(v)) throw ConfigError("force is not finite");
  return out;
}

VectorField density_flux(const StaggeredGrid& grid, const ScalarField& rho, const VectorField& f, const Mat3& A) {
  if (!rho.matches(grid) || !f.matches(grid)) throw ConfigError("fields do not match the grid");
  VectorField F = apply_tensor(grid, A, f);
  for (int d = 0; d < 3; ++d) {
    const Axis& ax = grid.axis(d);
    const auto fd = grid.face_dims(d);
    par::for_slabs(fd[2], [&](int k) {
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          std::array<int, 3> hi{i, j, k};
          const int I = hi[uz(d)];
          const std::size_t face = grid.face_index(d, i, j, k);
          if (!interior_face(ax, I)) {
            F[d][face] = 0.0;
            continue;
          }
          std::array<int, 3> lo = hi;
          lo[uz(d)] = I > 0 ? I - 1 : ax.cells() - 1;
          const double r = 0.5 * (rho[grid.cell_index(lo[0], lo[1], lo[2])] + rho[grid.cell_index(hi[0], hi[1], hi[2])]);
          F[d][face] *= r;
        }
    });
  }
  return F;
}

AnisoSolution pressure_solve(const StaggeredGrid& grid, const ScalarField& rho, const VectorField& f, const Mat3& A,
                             const SolverOptions& options) {
  require_density(grid, rho);
  require_spd(A);
  return solve_aniso_neumann(grid, A, density_flux(grid, rho, f, A), options);
}

VectorField assemble_velocity(const StaggeredGrid& grid, const ScalarField& rho, const VectorField& f,
                              const ScalarField& p, const Mat3& A) {
  if (!p.matches(grid)) throw ConfigError("pressure does not match the grid");
  VectorField u = density_flux(grid, rho, f, A);
  const VectorField Fp = aniso_flux(grid, A, p);
  for (int d = 0; d < 3; ++d)
    for (std::size_t i = 0; i < u[d].size(); ++i) u[d][i] -= Fp[d][i];
  return u;
}

double cfl_number(const StaggeredGrid& grid, const VectorField& u, double dt) {
  double c = 0.0;
  for (int d = 0; d < 3; ++d) {
    const Axis& ax = grid.axis(d);
    const auto fd = grid.face_dims(d);
    c = std::max(c, par::max_slabs(fd[2], [&](int k) {
      double m = 0.0;
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          const std::array<int, 3> idx{i, j, k};
          const int I = idx[uz(d)];
          const double h = interior_face(ax, I) ? ax.gap(I) : ax.width(I > 0 ? I - 1 : 0);
          m = std::max(m, std::abs(u[d][grid.face_index(d, i, j, k)]) * dt / h);
        }
      return m;
    }));
  }
  return c;
}

ScalarField transport_step(const StaggeredGrid& grid, const ScalarField& rho, const VectorField& u, double dt,
                           const TransportOptions& options) {
  if (!rho.matches(grid) || !u.matches(grid)) throw ConfigError("fields do not match the grid");
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be non-negative");
  for (int d = 0; d < 3; ++d)
    for (double v : u[d])
      if (!std::isfinite(v)) throw SolverError("non-finite velocity");
  if (cfl_number(grid, u, dt) > options.cfl_max) throw ConfigError("CFL number exceeds the limit");

  std::array<double, 3> lo{}, hi{};
  for (int d = 0; d < 3; ++d) {
    lo[uz(d)] = grid.axis(d).face(0);
    hi[uz(d)] = lo[uz(d)] + grid.axis(d).length();
  }
  auto clip = [&](Vec3 x) {
    for (int d = 0; d < 3; ++d)
      if (!grid.axis(d).periodic()) x[d] = std::clamp(x[d], lo[uz(d)], hi[uz(d)]);
    return x;
  };

  ScalarField out(grid);
  const auto cd = grid.cell_dims();
  par::for_slabs(cd[2], [&](int k) {
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) {
        const Vec3 x = grid.cell_center(i, j, k);
        const Vec3 mid = clip(x - 0.5 * dt * interpolate(grid, u, x));
        const Vec3 foot = clip(x - dt * interpolate(grid, u, mid));
        out[grid.cell_index(i, j, k)] = interpolate(grid, rho, foot);
      }
  });
  return out;
}

double fix_mass(const StaggeredGrid& grid, ScalarField& rho, double mass, double lo, double hi) {
  const double scale = std::abs(mass) > 0.0 ? std::abs(mass) : 1.0;
  double applied = 0.0;
  const auto cd = grid.cell_dims();
  for (int pass = 0; pass < 3; ++pass) {
    const double delta = mass - integrate(grid, rho);
    if (delta == 0.0 || std::abs(delta) <= 1e-15 * scale) break;
    const double target = delta > 0.0 ? hi : lo;
    const double room = par::sum_slabs(cd[2], [&](int k) {
      double s = 0.0;
      for (int j = 0; j < cd[1]; ++j)
        for (int i = 0; i < cd[0]; ++i) s += grid.cell_volume(i, j, k) * std::abs(target - rho[grid.cell_index(i, j, k)]);
      return s;
    });
    if (!(room > 0.0)) break;
    const double theta = std::min(1.0, std::abs(delta) / room);
    for (double& v : rho.values) v = std::lerp(v, target, theta);
    applied += std::abs(delta) / scale;
  }
  return applied;
}

double h1_norm(const StaggeredGrid& grid, const ScalarField& rho) {
  const VectorField g = face_gradient(grid, rho);
  const double l2 = lp_norm(grid, rho, 2.0);
  const double g2 = l2_norm(grid, g);
  return std::sqrt(l2 * l2 + g2 * g2);
}

double h2_norm(const StaggeredGrid& grid, const ScalarField& rho) {
  const VectorField g = face_gradient(grid, rho);
  const double h1 = h1_norm(grid, rho);
  double s = 0.0;
  for (int d = 0; d < 3; ++d) {
    const Axis& ad = grid.axis(d);
    const auto fd = grid.face_dims(d);
    for (int e = 0; e < 3; ++e) {
      const Axis& ae = grid.axis(e);
      s += par::sum_slabs(fd[2], [&](int k) {
        double acc = 0.0;
        for (int j = 0; j < fd[1]; ++j)
          for (int i = 0; i < fd[0]; ++i) {
            const std::array<int, 3> idx{i, j, k};
            const int Id = idx[uz(d)];
            if (!interior_face(ad, Id)) continue;
            const std::size_t f = grid.face_index(d, i, j, k);
            // Difference of g_d towards the next face along e (a cell for
            // e == d, an edge otherwise).
            std::array<int, 3> nb = idx;
            double h = 0.0;
            double vol = 1.0;
            if (e == d) {
              if (!ad.periodic() && Id + 1 >= ad.cells()) continue;
              nb[uz(d)] = (Id + 1) % ad.cells();
              h = ad.width(Id);
              vol = h;
            } else {
              const int ie = idx[uz(e)];
              if (!ae.periodic() && ie + 1 >= ae.cells()) continue;
              nb[uz(e)] = (ie + 1) % ae.cells();
              h = ae.gap(ie + 1);
              vol = ad.gap(Id) * h;
            }
            const double dd = (g[d][grid.face_index(d, nb[0], nb[1], nb[2])] - g[d][f]) / h;
            for (int o = 0; o < 3; ++o)
              if (o != d && o != e) vol *= grid.axis(o).width(idx[uz(o)]);
            acc += vol * dd * dd;
          }
        return acc;
      });
    }
  }
  return std::sqrt(h1 * h1 + s);
}

LedgerRow measure(const StaggeredGrid& grid, const ScalarField& rho, const std::vector<double>& q_list) {
  LedgerRow row;
  row.mass = integrate(grid, rho);
  row.l2 = lp_norm(grid, rho, 2.0);
  for (double q : q_list) row.lq.push_back(lp_norm(grid, rho, q));
  row.min = field_min(rho);
  row.max = field_max(rho);
  row.h1 = h1_norm(grid, rho);
  row.h2 = h2_norm(grid, rho);
  return row;
}

Trajectory run_darcy(const StaggeredGrid& grid, const ScalarField& rho0, const ForceField& force, const Mat3& A,
                     double T, double dt, const DarcyOptions& options) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (options.stride < 1) throw ConfigError("stride must be positive");
  for (double q : options.q_list)
    if (!(q >= 1.0)) throw ConfigError("q must be at least 1");
  require_density(grid, rho0);
  require_spd(A);
  if (!force.covers(0.0, T)) throw ConfigError("force frames do not cover [0, T]");

  auto traj = std::make_shared<Trajectory>();
  traj->grid = grid;
  traj->A = A;
  traj->steps = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
  traj->dt = T / traj->steps;
  traj->q_list = options.q_list;
  const double step_dt = traj->dt;

  struct Level {
    VectorField f;
    AnisoSolution pressure;
    VectorField u;
  };
  auto solve_level = [&](const ScalarField& rho, double t) {
    Level lv;
    lv.f = force.sample(grid, t);
    lv.pressure = pressure_solve(grid, rho, lv.f, A, options.solver);
    lv.u = assemble_velocity(grid, rho, lv.f, lv.pressure.p, A);
    return lv;
  };

  ScalarField rho = rho0;
  int n = 0;
  try {
    for (n = 0; n <= traj->steps; ++n) {
      const double t = n * step_dt;
      Level lv = solve_level(rho, t);
      LedgerRow row = measure(grid, rho, options.q_list);
      row.step = n;
      row.t = t;
      row.div_l2 = divergence_l2(grid, lv.u);
      row.cfl = cfl_number(grid, lv.u, step_dt);
      row.pressure_iterations = lv.pressure.report.iterations;
      const double fnorm = vector_l2(grid, lv.f);
      row.pressure_ratio = row.max > 0.0 && fnorm > 0.0 ? lp_norm(grid, lv.pressure.p, 2.0) / (row.max * fnorm) : 0.0;

      if (n < traj->steps) {
        ScalarField next = transport_step(grid, rho, lv.u, step_dt, options.transport);
        if (options.picard) {
          int it = 0;
          for (it = 1; it <= options.picard_max; ++it) {
            ScalarField half(grid);
            for (std::size_t c = 0; c < half.size(); ++c) half[c] = 0.5 * (rho[c] + next[c]);
            const Level mid = solve_level(half, t + 0.5 * step_dt);
            ScalarField trial = transport_step(grid, rho, mid.u, step_dt, options.transport);
            const double change = l2_distance(grid, trial, next);
            next = std::move(trial);
            if (change < options.picard_tol) break;
          }
          row.picard_iterations = std::min(it, options.picard_max);
        }
        if (options.mass_fix) row.mass_correction = fix_mass(grid, next, row.mass, row.min, row.max);
        if (n % options.stride == 0) traj->states.push_back({t, rho, std::move(lv.u), std::move(lv.pressure.p)});
        rho = std::move(next);
      } else {
        traj->states.push_back({t, rho, std::move(lv.u), std::move(lv.pressure.p)});
      }
      traj->ledger.push_back(std::move(row));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const SolverError& e) {
    traj->failed_step = n;
    traj->failure = e.what();
    throw DarcyRunFailure(std::string(e.what()) + " at step " + std::to_string(n), traj);
  }
  return std::move(*traj);
}

std::vector<ConservationRow> conservation_report(const Trajectory& traj, const std::vector<double>& q_list) {
  if (traj.ledger.empty()) throw ConfigError("empty trajectory");
  std::vector<std::size_t> slot;
  for (double q : q_list) {
    const auto it = std::find(traj.q_list.begin(), traj.q_list.end(), q);
    if (it == traj.q_list.end()) throw ConfigError("q = " + std::to_string(q) + " was not recorded");
    slot.push_back(static_cast<std::size_t>(it - traj.q_list.begin()));
  }
  const LedgerRow& first = traj.ledger.front();
  auto drift = [](double v, double v0) { return v0 != 0.0 ? (v - v0) / std::abs(v0) : v - v0; };
  std::vector<ConservationRow> rows;
  for (const auto& r : traj.ledger) {
    ConservationRow c;
    c.step = r.step;
    c.t = r.t;
    c.mass_drift = drift(r.mass, first.mass);
    for (std::size_t i = 0; i < q_list.size(); ++i) {
      const double q = q_list[i];
      c.lq_drift.push_back(drift(std::pow(r.lq[slot[i]], q), std::pow(first.lq[slot[i]], q)));
    }
    c.min = r.min;
    c.max = r.max;
    c.h1 = r.h1;
    c.h2 = r.h2;
    rows.push_back(std::move(c));
  }
  return rows;
}

}  // namespace homog
