#include <doctest.h>

#include "support.hpp"

#include "homog/cell_problem.hpp"
#include "homog/io.hpp"
#include "homog/rate_fit.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

using namespace homog;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("homog_io_" + std::to_string(test::base_seed()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("cli_reporting") {

TEST_CASE("configuration json round trip") {
  auto g = test::rng(60);
  for (int trial = 0; trial < 200; ++trial) {
    PerforationConfig c = test::random_config(g);
    if (trial % 3 == 0) {
      c.domain = DomainKind::box3;
      c.box_side = Vec3(test::uniform(g, 0.5, 3.0), test::uniform(g, 0.5, 3.0), test::uniform(g, 0.5, 3.0));
    }
    const nlohmann::json j = to_json(c);
    CHECK(config_from_json(j) == c);
    CHECK(config_from_json(nlohmann::json::parse(j.dump())) == c);
  }
  CHECK(obstacle_from_json(to_json(Obstacle::none())) == Obstacle::none());
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"obstacle", {{"kind", "torus"}, {"param", 0.1}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"obstacle", {{"kind", "ball"}, {"param", -0.1}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"epsilon", "small"}}), ConfigError);
}

TEST_CASE("number formatting round trips") {
  auto g = test::rng(61);
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  for (int trial = 0; trial < 500; ++trial) {
    const double v = std::ldexp(test::uniform(g, -1.0, 1.0), std::uniform_int_distribution<int>(-300, 300)(g));
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("csv layout") {
  TempDir dir;
  const fs::path p = dir.path / "t.csv";
  {
    CsvWriter w(p, {"epsilon", "kind", "n"});
    w.row({0.25, std::string("W-Id"), 3LL});
    w.row({1e-20, std::string("q1"), -1LL});
    CHECK_THROWS_AS(w.row({1.0}), ConfigError);
  }
  const std::string text = slurp(p);
  CHECK(text == "epsilon,kind,n\n0.25,W-Id,3\n1e-20,q1,-1\n");
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("binary dumps round trip") {
  TempDir dir;
  auto g = test::rng(62);
  const auto grid = StaggeredGrid(Axis::graded_symmetric(12, 2.0, 0.5, 6), Axis::uniform(8, 1.0),
                                  Axis::uniform(6, 2.0, -1.0));
  ScalarField f(grid);
  for (auto& v : f.values) v = test::uniform(g, -1.0, 1.0);
  const VectorField u = test::random_vector(grid, g);
  const fs::path sidecar = write_binary(dir.path / "f.bin", grid, "f", f);
  CHECK(fs::exists(sidecar));
  const nlohmann::json meta = read_json(sidecar);
  CHECK(meta.dump().find("little") != std::string::npos);
  CHECK(read_binary_scalar(dir.path / "f.bin", grid) == f);
  write_binary(dir.path / "u.bin", grid, "u", u);
  CHECK(read_binary_vector(dir.path / "u.bin", grid) == u);
  CHECK(fs::file_size(dir.path / "f.bin") == 8 * grid.cell_count());
  const auto other = StaggeredGrid::uniform(4, 1.0, DomainKind::torus3);
  CHECK_THROWS_AS(read_binary_scalar(dir.path / "f.bin", other), ConfigError);
  CHECK_THROWS_AS(read_binary_scalar(dir.path / "missing.bin", grid), ConfigError);
}

TEST_CASE("vtk headers") {
  TempDir dir;
  const auto uniform = StaggeredGrid::uniform(4, 1.0, DomainKind::torus3);
  write_vtk(dir.path / "a.vtk", uniform, "rho", ScalarField(uniform, 1.0));
  const std::string a = slurp(dir.path / "a.vtk");
  CHECK(a.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(a.find("STRUCTURED_POINTS") != std::string::npos);
  CHECK(a.find("CELL_DATA 64") != std::string::npos);
  const Axis graded = Axis::graded_symmetric(8, 2.0, 0.5, 4);
  const StaggeredGrid rect(graded, graded, graded);
  write_vtk(dir.path / "b.vtk", rect, "u", VectorField(rect));
  const std::string b = slurp(dir.path / "b.vtk");
  CHECK(b.find("RECTILINEAR_GRID") != std::string::npos);
  CHECK(b.find("VECTORS u") != std::string::npos);
}

TEST_CASE("rate fits") {
  auto g = test::rng(63);
  for (int trial = 0; trial < 100; ++trial) {
    const double slope = test::uniform(g, -2.0, 3.0);
    const double c = test::uniform(g, 0.1, 10.0);
    std::vector<RateRow> rows;
    for (double eps : {0.5, 0.25, 0.125, 0.0625}) rows.push_back({eps, c * std::pow(eps, slope)});
    const RateReport r = fit_rate(rows, "x");
    CHECK(r.slope == doctest::Approx(slope).epsilon(1e-12));
    CHECK(std::exp(r.intercept) == doctest::Approx(c).epsilon(1e-10));
    CHECK(r.r2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  RateReport flat = fit_rate({{0.5, 2.0}, {0.25, 2.0}, {0.125, 2.0}});
  CHECK(flat.zero_variance);
  CHECK(flat.slope == 0.0);
  flat.require_band(0.0, 0.2);
  CHECK(flat.pass);
  flat.require_min(0.1);
  CHECK_FALSE(flat.pass);
  CHECK(flat.to_json()["pass"] == false);
  CHECK_THROWS_WITH_AS(fit_rate({{0.5, 1.0}, {0.25, 1.0}}), doctest::Contains("need ≥ 3 points"), ConfigError);
  CHECK_THROWS_AS(fit_rate({{0.5, 1.0}, {0.25, 0.0}, {0.125, 1.0}}), ConfigError);
  CHECK_THROWS_AS(fit_rate({{0.5, 1.0}, {0.5, 2.0}, {0.5, 3.0}}), ConfigError);
}

TEST_CASE("resistance files") {
  TempDir dir;
  Mat3 M;
  M << 1.9, 0.0, 0.01, 0.0, 1.8, 0.0, 0.01, 0.0, 2.0;
  ResistanceMatrix r = make_resistance(M, 0.7);
  r.R_values = {2.0, 3.0, 4.0, 6.0};
  r.n_values = {96};
  r.samples = {M, M, M, M};
  write_json(dir.path / "resistance.json", r.to_json());
  const ResistanceMatrix back = ResistanceMatrix::from_json(read_json(dir.path / "resistance.json"));
  CHECK(back.M0 == r.M0);
  CHECK(back.A == r.A);
  CHECK(back.n_values == r.n_values);
  std::ofstream(dir.path / "bad.json") << "{not json";
  CHECK_THROWS_AS(read_json(dir.path / "bad.json"), ConfigError);
}

}  // TEST_SUITE
