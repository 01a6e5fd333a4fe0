#include "homog/cell_problem.hpp"

#include "homog/stokes.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace homog {
namespace {

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

// Cyclic axis permutation: returns w with w[d+1](idx) = u[d](idx shifted), i.e.
// the field x -> Q u(Q^T x) for Q e_d = e_{d+1}.
VectorField rotate(const StaggeredGrid& grid, const VectorField& u) {
  VectorField out(grid);
  for (int d = 0; d < 3; ++d) {
    const int to = (d + 1) % 3;
    const auto fd = grid.face_dims(to);
    for (int k = 0; k < fd[2]; ++k)
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i) {
          // (Q^T x)_a = x_{a+1}
          out[to][grid.face_index(to, i, j, k)] = u[d][grid.face_index(d, j, k, i)];
        }
  }
  return out;
}

ScalarField rotate(const StaggeredGrid& grid, const ScalarField& p) {
  ScalarField out(grid);
  const auto cd = grid.cell_dims();
  for (int k = 0; k < cd[2]; ++k)
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i) out[grid.cell_index(i, j, k)] = p[grid.cell_index(j, k, i)];
  return out;
}

bool masks_rotation_invariant(const StaggeredGrid& grid, const Masks& m) {
  const auto cd = grid.cell_dims();
  for (int k = 0; k < cd[2]; ++k)
    for (int j = 0; j < cd[1]; ++j)
      for (int i = 0; i < cd[0]; ++i)
        if (m.cell[grid.cell_index(i, j, k)] != m.cell[grid.cell_index(j, k, i)]) return false;
  for (int d = 0; d < 3; ++d) {
    const int to = (d + 1) % 3;
    const auto fd = grid.face_dims(to);
    for (int k = 0; k < fd[2]; ++k)
      for (int j = 0; j < fd[1]; ++j)
        for (int i = 0; i < fd[0]; ++i)
          if (m.face[uz(to)][grid.face_index(to, i, j, k)] != m.face[uz(d)][grid.face_index(d, j, k, i)]) return false;
  }
  return true;
}

}  // namespace

StaggeredGrid cell_grid(double R, const CellOptions& options) {
  const Axis ax = Axis::graded_symmetric(options.n, R, options.core_half, options.core_cells);
  return StaggeredGrid(ax, ax, ax);
}

CellSolution solve_cell(const Obstacle& obstacle, double R, const CellOptions& options) {
  obstacle.check_contained();
  if (!(R >= 2.0)) throw ConfigError("truncation too small: R must be at least 2");
  if (!(options.core_half > obstacle.bounding_radius()))
    throw ConfigError("cell grid core does not contain the obstacle");
  const double h = 2.0 * options.core_half / options.core_cells;
  if (!obstacle.empty() && 2.0 * obstacle.bounding_radius() / h < options.min_cells_across)
    throw ConfigError("under-resolved obstacle: fewer than " + std::to_string(options.min_cells_across) +
                      " cells across");

  CellSolution sol;
  sol.obstacle = obstacle;
  sol.R = R;
  sol.n = options.n;
  sol.grid = cell_grid(R, options);
  sol.masks = rasterize_predicate(sol.grid, [&](const Vec3& y) { return obstacle.contains(y); });
  const StaggeredGrid& grid = sol.grid;

  if (obstacle.empty()) {
    // The constant field e^i solves the problem exactly.
    for (int i = 0; i < 3; ++i) {
      sol.v[uz(i)] = VectorField(grid);
      std::fill(sol.v[uz(i)][i].begin(), sol.v[uz(i)][i].end(), 1.0);
      sol.q[uz(i)] = ScalarField(grid);
      sol.reports[uz(i)].method = "exact";
      sol.reports[uz(i)].converged = true;
      sol.reports[uz(i)].tolerance = options.solver.tol;
    }
    return sol;
  }

  const VectorField zero(grid);
  const bool permute = options.use_symmetry && obstacle.axis_symmetric() && masks_rotation_invariant(grid, sol.masks);
  for (int i = 0; i < 3; ++i) {
    if (permute && i > 0) {
      sol.v[uz(i)] = rotate(grid, sol.v[uz(i - 1)]);
      sol.q[uz(i)] = rotate(grid, sol.q[uz(i - 1)]);
      sol.reports[uz(i)] = sol.reports[0];
      sol.reports[uz(i)].method += "+permuted";
      continue;
    }
    DirichletData data;
    data.wall_velocity = Vec3::Unit(i);
    auto s = solve_stokes(grid, sol.masks, 1.0, zero, options.solver, &data);
    sol.v[uz(i)] = std::move(s.u);
    sol.q[uz(i)] = std::move(s.p);
    sol.reports[uz(i)] = s.report;
  }
  sol.permuted = permute;
  return sol;
}

Mat3 resistance_integral(const CellSolution& sol) {
  Mat3 M;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      M(i, j) = gradient_inner(sol.grid, sol.masks, sol.v[uz(i)], Vec3::Unit(i), sol.v[uz(j)], Vec3::Unit(j));
      M(j, i) = gradient_inner(sol.grid, sol.masks, sol.v[uz(j)], Vec3::Unit(j), sol.v[uz(i)], Vec3::Unit(i));
    }
  return M;
}

ResistanceMatrix make_resistance(const Mat3& M, double mu) {
  if (!(mu > 0.0)) throw ConfigError("viscosity must be positive");
  ResistanceMatrix r;
  r.mu = mu;
  const double scale = M.cwiseAbs().maxCoeff();
  r.asymmetry = scale > 0.0 ? (M - M.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
  r.M0 = 0.5 * (M + M.transpose());
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(r.M0);
  const Vec3 ev = eig.eigenvalues();
  if (ev.cwiseAbs().maxCoeff() < 1e-12) throw SolverError("degenerate obstacle: resistance matrix vanishes");
  if (!(ev.minCoeff() > 0.0)) throw SolverError("degenerate obstacle: resistance matrix not positive definite");
  r.A = (mu * r.M0).inverse();
  return r;
}

ResistanceMatrix compute_M0(const CellSolution& sol, double mu) {
  const Mat3 M = resistance_integral(sol);
  ResistanceMatrix r = make_resistance(M, mu);
  r.obstacle = sol.obstacle.describe();
  r.R_values = {sol.R};
  r.n_values = {sol.n};
  r.samples = {M};
  return r;
}

ResistanceMatrix extrapolate_M0(const std::vector<double>& R_values, const std::vector<Mat3>& samples, double mu) {
  if (R_values.size() < 3) throw ConfigError("need ≥ 3 truncation radii");
  if (samples.size() != R_values.size()) throw ConfigError("one resistance sample per truncation radius required");
  std::vector<std::size_t> order(R_values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return R_values[a] < R_values[b]; });
  for (std::size_t s = 1; s < order.size(); ++s) {
    const Mat3& prev = samples[order[s - 1]];
    const Mat3& next = samples[order[s]];
    if (!(R_values[order[s]] > R_values[order[s - 1]])) throw ConfigError("truncation radii must be distinct");
    for (int d = 0; d < 3; ++d)
      if (next(d, d) > prev(d, d) * (1.0 + 1e-6))
        throw SolverError("truncation study inconsistent: diagonal grows with R");
  }
  // Least squares on [1, 1/R] per entry.
  const auto m = static_cast<Eigen::Index>(R_values.size());
  Eigen::MatrixXd X(m, 2);
  for (Eigen::Index r = 0; r < m; ++r) {
    X(r, 0) = 1.0;
    X(r, 1) = 1.0 / R_values[static_cast<std::size_t>(r)];
  }
  const auto qr = X.colPivHouseholderQr();
  Mat3 Minf;
  double res2 = 0.0;
  double ref2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd y(m);
      for (Eigen::Index r = 0; r < m; ++r) y(r) = samples[static_cast<std::size_t>(r)](i, j);
      const Eigen::Vector2d c = qr.solve(y);
      Minf(i, j) = c(0);
      res2 += (X * c - y).squaredNorm();
      ref2 += y.squaredNorm();
    }
  ResistanceMatrix r = make_resistance(Minf, mu);
  r.R_values = R_values;
  r.samples = samples;
  r.extrapolation_residual = ref2 > 0.0 ? std::sqrt(res2 / ref2) : 0.0;
  return r;
}

ResistanceMatrix extrapolate_M0(const Obstacle& obstacle, const std::vector<double>& R_values,
                                const std::vector<int>& n_values, double mu, CellOptions options) {
  if (R_values.size() < 3) throw ConfigError("need ≥ 3 truncation radii");
  if (n_values.size() != 1 && n_values.size() != R_values.size())
    throw ConfigError("give one resolution or one per truncation radius");
  obstacle.check_contained();
  std::vector<Mat3> samples;
  std::vector<int> ns;
  for (std::size_t s = 0; s < R_values.size(); ++s) {
    options.n = n_values.size() == 1 ? n_values[0] : n_values[s];
    const CellSolution sol = solve_cell(obstacle, R_values[s], options);
    samples.push_back(resistance_integral(sol));
    ns.push_back(options.n);
  }
  ResistanceMatrix r = extrapolate_M0(R_values, samples, mu);
  r.obstacle = obstacle.describe();
  r.n_values = ns;
  return r;
}

nlohmann::json ResistanceMatrix::to_json() const {
  auto mat = [](const Mat3& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return rows;
  };
  nlohmann::json j;
  j["M0"] = mat(M0);
  j["A"] = mat(A);
  j["mu"] = mu;
  j["asymmetry"] = asymmetry;
  j["provenance"] = {{"obstacle", obstacle},
                     {"R", R_values},
                     {"n", n_values},
                     {"extrapolation_residual", extrapolation_residual}};
  nlohmann::json raw = nlohmann::json::array();
  for (const auto& s : samples) raw.push_back(mat(s));
  j["provenance"]["samples"] = raw;
  return j;
}

ResistanceMatrix ResistanceMatrix::from_json(const nlohmann::json& j) {
  auto mat = [](const nlohmann::json& rows) {
    if (!rows.is_array() || rows.size() != 3) throw ConfigError("expected a 3x3 matrix");
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
      const auto& row = rows.at(uz(i));
      if (!row.is_array() || row.size() != 3) throw ConfigError("expected a 3x3 matrix");
      for (int k = 0; k < 3; ++k) m(i, k) = row.at(uz(k)).get<double>();
    }
    return m;
  };
  try {
    const double mu = j.value("mu", 1.0);
    ResistanceMatrix r = make_resistance(mat(j.at("M0")), mu);
    if (j.contains("provenance")) {
      const auto& p = j["provenance"];
      r.obstacle = p.value("obstacle", "");
      r.R_values = p.value("R", std::vector<double>{});
      r.n_values = p.value("n", std::vector<int>{});
      r.extrapolation_residual = p.value("extrapolation_residual", 0.0);
      if (p.contains("samples"))
        for (const auto& s : p["samples"]) r.samples.push_back(mat(s));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed resistance file: ") + e.what());
  }
}

}  // namespace homog
