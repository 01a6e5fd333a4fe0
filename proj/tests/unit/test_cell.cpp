#include <doctest.h>

#include "support.hpp"

#include "homog/cell_problem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>

using namespace homog;

namespace {

CellOptions small_options(bool symmetry = true) {
  CellOptions o;
  o.n = 48;
  o.use_symmetry = symmetry;
  return o;
}

// Solves are shared between cases; each costs several seconds.
const CellSolution& cached(const Obstacle& ob, double R, bool symmetry = true) {
  static std::map<std::string, std::unique_ptr<CellSolution>> cache;
  const std::string key = ob.describe() + "/" + std::to_string(R) + (symmetry ? "s" : "f");
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<CellSolution>(solve_cell(ob, R, small_options(symmetry)));
  return *slot;
}

bool spd(const Mat3& M) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(M);
  return es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

TEST_SUITE("cell_problem") {

TEST_CASE("cell solution invariants") {
  const CellSolution& s = cached(Obstacle::ball(0.1), 3.0);
  const auto& grid = s.grid;
  for (int i = 0; i < 3; ++i) {
    CHECK(s.reports[static_cast<std::size_t>(i)].divergence_residual <= 1e-8);
    for (int d = 0; d < 3; ++d) {
      const auto dims = grid.face_dims(d);
      for (int k = 0; k < dims[2]; ++k)
        for (int j = 0; j < dims[1]; ++j)
          for (int l = 0; l < dims[0]; ++l) {
            const std::size_t f = grid.face_index(d, l, j, k);
            const std::array<int, 3> idx{l, j, k};
            const int a = idx[static_cast<std::size_t>(d)];
            const double v = s.v[static_cast<std::size_t>(i)][d][f];
            if (a == 0 || a == grid.axis(d).cells())
              CHECK(v == (d == i ? 1.0 : 0.0));
            else if (!s.masks.face[static_cast<std::size_t>(d)][f])
              CHECK(v == 0.0);
          }
    }
  }
}

TEST_CASE("resistance matrix is symmetric positive definite and inverts") {
  for (const Obstacle& ob : {Obstacle::ball(0.1), Obstacle::cube(0.06)}) {
    const ResistanceMatrix r = compute_M0(cached(ob, 3.0), 1.7);
    CHECK(r.asymmetry <= 1e-8);
    CHECK(spd(r.M0));
    CHECK((r.A * (1.7 * r.M0) - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("reflection and rotation symmetry") {
  // A ball is rotation invariant, so M0 is a multiple of the identity.
  const Mat3 ball = compute_M0(cached(Obstacle::ball(0.1), 3.0, false)).M0;
  const double db = ball.diagonal().mean();
  CHECK((ball - db * Mat3::Identity()).cwiseAbs().maxCoeff() <= 0.01 * db);
  // The cube is invariant under each coordinate reflection S, so M0 = S M0 S.
  const Mat3 cube = compute_M0(cached(Obstacle::cube(0.06), 3.0, false)).M0;
  for (int d = 0; d < 3; ++d) {
    Mat3 S = Mat3::Identity();
    S(d, d) = -1.0;
    CHECK((S * cube * S - cube).cwiseAbs().maxCoeff() <= 0.01 * cube.diagonal().minCoeff());
  }
  // The symmetry shortcut agrees with three full solves.
  const Mat3 fast = compute_M0(cached(Obstacle::ball(0.1), 3.0, true)).M0;
  CHECK((fast - ball).cwiseAbs().maxCoeff() <= 1e-6 * db);
}

TEST_CASE("drag grows with obstacle size, about linearly") {
  std::vector<Mat3> M;
  for (double r : {0.05, 0.075, 0.1}) M.push_back(compute_M0(cached(Obstacle::ball(r), 3.0)).M0);
  for (int i = 0; i < 3; ++i) {
    CHECK(M[0](i, i) < M[1](i, i));
    CHECK(M[1](i, i) < M[2](i, i));
  }
  CHECK(spd(M[1] - M[0]));
  CHECK(spd(M[2] - M[1]));
  const double ratio = (M[2](0, 0) / 0.1) / (M[0](0, 0) / 0.05);
  CHECK(std::abs(ratio - 1.0) <= 0.15);
}

TEST_CASE("1/R extrapolation recovers the limit of exact data") {
  Mat3 inf;
  inf << 2.0, 0.1, 0.0, 0.1, 2.5, -0.2, 0.0, -0.2, 1.8;
  Mat3 c;
  c << 0.9, 0.0, 0.05, 0.0, 1.1, 0.0, 0.05, 0.0, 0.7;
  const std::vector<double> R{2.0, 3.0, 4.0, 6.0};
  std::vector<Mat3> samples;
  for (double r : R) samples.push_back(inf + c / r);
  const ResistanceMatrix e = extrapolate_M0(R, samples, 2.0);
  CHECK((e.M0 - inf).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(e.extrapolation_residual <= 1e-12);
  CHECK((e.A - (2.0 * inf).inverse()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_WITH_AS(extrapolate_M0({2.0, 3.0}, {inf, inf}, 1.0), doctest::Contains("need ≥ 3"), ConfigError);
  CHECK_THROWS_AS(extrapolate_M0({2.0, 2.0, 3.0}, {inf, inf, inf}, 1.0), ConfigError);
  // Drag growing with R contradicts the 1/R model.
  CHECK_THROWS_AS(extrapolate_M0(R, {inf, inf + c, inf + 2 * c, inf + 3 * c}, 1.0), SolverError);
}

TEST_CASE("cell problem preconditions") {
  CHECK_THROWS_AS(solve_cell(Obstacle::ball(0.1), 1.5, small_options()), ConfigError);
  CHECK_THROWS_AS(solve_cell(Obstacle::ball(0.3), 3.0, small_options()), ConfigError);
  CellOptions coarse = small_options();
  coarse.n = 16;
  coarse.core_cells = 8;
  CHECK_THROWS_WITH_AS(solve_cell(Obstacle::ball(0.05), 3.0, coarse), doctest::Contains("under-resolved"), ConfigError);
  CHECK_THROWS_WITH_AS(make_resistance(Mat3::Zero(), 1.0), doctest::Contains("degenerate obstacle"), SolverError);
  CHECK_THROWS_AS(make_resistance(-Mat3::Identity(), 1.0), SolverError);
  CHECK_THROWS_AS(make_resistance(Mat3::Identity(), 0.0), ConfigError);
}

TEST_CASE("resistance json round trip") {
  Mat3 M;
  M << 2.0, 0.01, 0.0, 0.01, 2.1, 0.0, 0.0, 0.0, 1.9;
  ResistanceMatrix r = make_resistance(M, 1.3);
  r.obstacle = "ball:0.1";
  r.R_values = {2.0, 3.0, 4.0};
  r.n_values = {32};
  const ResistanceMatrix back = ResistanceMatrix::from_json(r.to_json());
  CHECK(back.M0 == r.M0);
  CHECK(back.A == r.A);
  CHECK(back.mu == r.mu);
  CHECK(back.obstacle == r.obstacle);
  CHECK(back.R_values == r.R_values);
  CHECK_THROWS_AS(ResistanceMatrix::from_json(nlohmann::json{{"M0", {1, 2}}}), ConfigError);
}

}  // TEST_SUITE
