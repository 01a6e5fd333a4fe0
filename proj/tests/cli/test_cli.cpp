#include <doctest.h>

#include "support.hpp"

#include "commands.hpp"
#include "homog/cell_problem.hpp"
#include "homog/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

using namespace homog;
namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / ("homog_cli_" + std::to_string(test::base_seed()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int homog_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "homog");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string out_dir(const std::string& name) { return (scratch() / name).string(); }

std::set<std::string> files_on_disk(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out.insert(fs::relative(e.path(), dir).generic_string());
  return out;
}

std::set<std::string> manifest_outputs(const fs::path& dir) {
  const nlohmann::json m = read_json(dir / "manifest.json");
  std::set<std::string> out;
  for (const auto& f : m.at("outputs")) out.insert(f.get<std::string>());
  return out;
}

void check_manifest(const fs::path& dir) {
  REQUIRE(fs::exists(dir / "manifest.json"));
  CHECK(files_on_disk(dir) == manifest_outputs(dir));
}

fs::path write_config(const std::string& name, const nlohmann::json& j) {
  const fs::path p = scratch() / name;
  write_json(p, j);
  return p;
}

nlohmann::json darcy_smoke(double rho) {
  return {{"grid", {{"n", 8}, {"domain", "torus"}}},
          {"A", {{"diag", {1.0, 0.5, 2.0}}}},
          {"rho0", {{"kind", "constant"}, {"value", rho}}},
          {"force", {{"kind", "shear"}, {"amplitude", 1.0}}},
          {"T", 0.2},
          {"dt", 0.05}};
}

}  // namespace

TEST_SUITE("cli_reporting") {

TEST_CASE("cell command exit codes") {
  CHECK(homog_cli({"cell", "--obstacle", "ball:0.3", "--out", out_dir("cell_big")}) == cli::kConfigError);
  CHECK(homog_cli({"cell", "--obstacle", "none", "--out", out_dir("cell_none")}) == cli::kSolverError);
  CHECK(homog_cli({"cell", "--R", "1.5", "--out", out_dir("cell_short")}) == cli::kConfigError);
  const fs::path dir = out_dir("cell_ok");
  REQUIRE(homog_cli({"cell", "--R", "2,3,4", "--n", "32", "--core-cells", "16", "--out", dir.string()}) ==
          cli::kSuccess);
  const ResistanceMatrix r = ResistanceMatrix::from_json(read_json(dir / "resistance.json"));
  CHECK(r.R_values == std::vector<double>{2.0, 3.0, 4.0});
  CHECK(r.M0(0, 0) > 0.0);
  check_manifest(dir);
  // Failed runs still leave a manifest describing themselves.
  check_manifest(out_dir("cell_big"));
  CHECK(read_json(fs::path(out_dir("cell_none")) / "manifest.json").at("exit_code") == cli::kSolverError);
}

TEST_CASE("corrector-rates exit codes") {
  CHECK(homog_cli({"corrector-rates", "--eps", "0.25", "--out", out_dir("cor_single")}) == cli::kConfigError);
  const fs::path dir = out_dir("cor_band");
  CHECK(homog_cli({"corrector-rates", "--alpha", "1.5", "--n", "48", "--p", "2", "--band", "0", "--out",
                   dir.string()}) == cli::kPropertyFailure);
  CHECK(fs::exists(dir / "corrector_rates.csv"));
  CHECK(read_json(dir / "rate_report.json").at("pass") == false);
  check_manifest(dir);
}

TEST_CASE("darcy-run exit codes and ledger") {
  const fs::path dir = out_dir("darcy_const");
  const fs::path cfg = write_config("darcy_const.json", darcy_smoke(1.0));
  REQUIRE(homog_cli({"darcy-run", "--config", cfg.string(), "--out", dir.string()}) == cli::kSuccess);
  std::ifstream ledger(dir / "ledger.csv");
  std::string header;
  std::getline(ledger, header);
  CHECK(header.rfind("step,t,mass", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(ledger, line);) ++rows;
  CHECK(rows == 5);
  const nlohmann::json report = read_json(dir / "run_report.json");
  CHECK(report.at("pass") == true);
  check_manifest(dir);

  nlohmann::json bad = darcy_smoke(1.0);
  bad["dt"] = -0.1;
  CHECK(homog_cli({"darcy-run", "--config", write_config("darcy_bad.json", bad).string(), "--out",
                   out_dir("darcy_bad")}) == cli::kConfigError);
  CHECK(homog_cli({"darcy-run", "--out", out_dir("darcy_none")}) == cli::kConfigError);
  CHECK(homog_cli({"darcy-run", "--config", (scratch() / "missing.json").string(), "--out",
                   out_dir("darcy_missing")}) == cli::kConfigError);
}

TEST_CASE("binary dumps are listed in the manifest") {
  nlohmann::json cfg = darcy_smoke(1.0);
  cfg["rho0"] = {{"kind", "gaussian"}, {"width", 0.2}, {"background", 0.5}};
  cfg["dump"] = "both";
  cfg["stride"] = 2;
  const fs::path dir = out_dir("darcy_dump");
  REQUIRE(homog_cli({"darcy-run", "--config", write_config("darcy_dump.json", cfg).string(), "--out",
                     dir.string()}) == cli::kSuccess);
  check_manifest(dir);
  bool sidecar = false;
  for (const auto& f : manifest_outputs(dir)) sidecar = sidecar || f.find(".bin.json") != std::string::npos;
  CHECK(sidecar);
}

TEST_CASE("micro-compare and poincare") {
  CHECK(homog_cli({"micro-compare", "--obstacle", "none", "--out", out_dir("micro_none")}) == cli::kSolverError);
  CHECK(homog_cli({"micro-compare", "--eps", "0.5", "--out", out_dir("micro_single")}) == cli::kConfigError);
  const fs::path dir = out_dir("poincare");
  REQUIRE(homog_cli({"poincare", "--n", "32", "--radius", "0", "--out", dir.string()}) == cli::kSuccess);
  CHECK(fs::exists(dir / "poincare_rates.csv"));
  check_manifest(dir);
  CHECK(homog_cli({"poincare", "--n", "32", "--radius", "0", "--band", "0", "--out", out_dir("poincare_zero")}) ==
        cli::kPropertyFailure);
}

TEST_CASE("report aggregates run directories") {
  const fs::path src = out_dir("poincare_for_report");
  REQUIRE(homog_cli({"poincare", "--n", "32", "--radius", "0", "--out", src.string()}) == cli::kSuccess);
  const fs::path dir = out_dir("report");
  CHECK(homog_cli({"report", src.string(), "--out", dir.string()}) == cli::kSuccess);
  const nlohmann::json summary = read_json(dir / "summary.json");
  CHECK(summary.dump().find("rate_report.json") != std::string::npos);
  check_manifest(dir);
}

TEST_CASE("usage errors and version") {
  CHECK(homog_cli({}) == cli::kConfigError);
  CHECK(homog_cli({"bogus"}) == cli::kConfigError);
  CHECK(homog_cli({"cell", "--no-such-flag"}) == cli::kConfigError);
  CHECK(homog_cli({"cell", "--tol", "2", "--out", out_dir("cell_tol")}) == cli::kConfigError);
  CHECK(homog_cli({"--version"}) == cli::kSuccess);
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = out_dir("env_out");
  ::setenv("HOMOG_OUT_DIR", dir.c_str(), 1);
  const int code = homog_cli({"poincare", "--n", "32", "--radius", "0"});
  ::unsetenv("HOMOG_OUT_DIR");
  CHECK(code == cli::kSuccess);
  check_manifest(dir);
  // An explicit --out wins over the environment.
  ::setenv("HOMOG_OUT_DIR", out_dir("env_ignored").c_str(), 1);
  CHECK(homog_cli({"poincare", "--n", "32", "--radius", "0", "--out", out_dir("env_explicit")}) == cli::kSuccess);
  ::unsetenv("HOMOG_OUT_DIR");
  CHECK_FALSE(fs::exists(out_dir("env_ignored")));
}

}  // TEST_SUITE
