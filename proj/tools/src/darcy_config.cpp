#include "darcy_config.hpp"

#include "homog/cell_problem.hpp"
#include "homog/io.hpp"

#include <cmath>
#include <numbers>

namespace homog::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

Vec3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must have three entries");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    const json& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw ConfigError(std::string(what) + " must be numeric");
    v[i] = e.get<double>();
  }
  return v;
}

double num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j[key].get<double>();
}

std::string kind_of(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError(std::string(what) + " needs a string 'kind'");
  return j["kind"].get<std::string>();
}

}  // namespace

Mat3 matrix_from_json(const json& j, const fs::path& base, std::vector<fs::path>* inputs) {
  if (j.is_array()) {
    if (j.size() != 3) throw ConfigError("A must be a 3x3 matrix");
    Mat3 A;
    for (int i = 0; i < 3; ++i) A.row(i) = vec3(j[static_cast<std::size_t>(i)], "row of A").transpose();
    return A;
  }
  if (j.is_object() && j.contains("diag")) return vec3(j["diag"], "A.diag").asDiagonal();
  if (j.is_object() && j.contains("file")) {
    const fs::path p = resolve(base, j["file"].get<std::string>());
    if (inputs) inputs->push_back(p);
    try {
      return ResistanceMatrix::from_json(read_json(p)).A;
    } catch (const json::exception& e) {
      throw ConfigError("malformed resistance file " + p.string() + ": " + e.what());
    }
  }
  throw ConfigError("A must be a matrix, {\"diag\": [...]} or {\"file\": ...}");
}

ScalarField density_from_json(const json& j, const StaggeredGrid& grid, const fs::path& base,
                              std::vector<fs::path>* inputs) {
  const std::string kind = kind_of(j, "rho0");
  if (kind == "constant") return ScalarField(grid, num(j, "value", 1.0));
  if (kind == "gaussian") {
    const Vec3 c = j.contains("center") ? vec3(j["center"], "rho0.center") : Vec3::Constant(0.5);
    const double w = num(j, "width", 0.1);
    const double amp = num(j, "amplitude", 1.0);
    const double bg = num(j, "background", 0.0);
    if (!(w > 0.0)) throw ConfigError("rho0.width must be positive");
    return sample_cells(grid, [&](const Vec3& x) {
      double r2 = 0.0;
      for (int d = 0; d < 3; ++d) {
        double dx = x[d] - c[d];
        if (grid.axis(d).periodic()) dx = wrap_delta(dx, grid.axis(d).length());
        r2 += dx * dx;
      }
      return bg + amp * std::exp(-r2 / (2.0 * w * w));
    });
  }
  if (kind == "file") {
    const fs::path p = resolve(base, j.at("path").get<std::string>());
    if (inputs) inputs->push_back(p);
    return read_binary_scalar(p, grid);
  }
  throw ConfigError("unknown rho0 kind: " + kind);
}

ForceField force_from_json(const json& j, const StaggeredGrid& grid, const fs::path& base,
                           std::vector<fs::path>* inputs) {
  const std::string kind = kind_of(j, "force");
  if (kind == "zero") return ForceField::zero();
  if (kind == "constant") {
    const Vec3 v = vec3(j.at("value"), "force.value");
    return ForceField::analytic([v](double, const Vec3&) { return v; }, j);
  }
  if (kind == "potential") {
    // f = grad of a sin(tau x) sin(tau y) sin(tau z) / tau
    const double a = num(j, "amplitude", 1.0);
    return ForceField::analytic(
        [a](double, const Vec3& x) {
          const double sx = std::sin(kTau * x[0]), sy = std::sin(kTau * x[1]), sz = std::sin(kTau * x[2]);
          const double cx = std::cos(kTau * x[0]), cy = std::cos(kTau * x[1]), cz = std::cos(kTau * x[2]);
          return Vec3(a * cx * sy * sz, a * sx * cy * sz, a * sx * sy * cz);
        },
        j);
  }
  if (kind == "shear") {
    const double a = num(j, "amplitude", 1.0);
    return ForceField::analytic(
        [a](double, const Vec3& x) {
          return Vec3(a * std::sin(kTau * x[1]), a * std::sin(kTau * x[2]), a * std::sin(kTau * x[0]));
        },
        j);
  }
  if (kind == "rotating") {
    const double a = num(j, "amplitude", 1.0);
    const double w = num(j, "omega", kTau);
    return ForceField::analytic([a, w](double t, const Vec3&) { return Vec3(a * std::cos(w * t), a * std::sin(w * t), 0.0); },
                                j);
  }
  if (kind == "frames") {
    const auto times = j.at("times").get<std::vector<double>>();
    const auto paths = j.at("paths").get<std::vector<std::string>>();
    if (times.size() != paths.size()) throw ConfigError("force frames need one path per time");
    std::vector<VectorField> frames;
    for (const auto& s : paths) {
      const fs::path p = resolve(base, s);
      if (inputs) inputs->push_back(p);
      frames.push_back(read_binary_vector(p, grid));
    }
    return ForceField::frames(times, std::move(frames));
  }
  throw ConfigError("unknown force kind: " + kind);
}

DarcyRunConfig parse_darcy_config(const json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("darcy-run configuration must be a JSON object");
  DarcyRunConfig cfg;
  cfg.raw = j;
  try {
    const json g = j.value("grid", json::object());
    const int n = g.value("n", 32);
    const std::string domain = g.value("domain", "torus3");
    const double side = g.value("side", 1.0);
    if (n < 4) throw ConfigError("grid.n must be at least 4");
    if (!(side > 0.0)) throw ConfigError("grid.side must be positive");
    DomainKind kind;
    if (domain == "torus3" || domain == "torus")
      kind = DomainKind::torus3;
    else if (domain == "box3" || domain == "box")
      kind = DomainKind::box3;
    else
      throw ConfigError("unknown grid.domain: " + domain);
    cfg.grid = StaggeredGrid::uniform(n, side, kind);

    cfg.A = j.contains("A") ? matrix_from_json(j["A"], base, &cfg.inputs) : Mat3::Identity();
    require_spd(cfg.A, "A");
    cfg.rho0 = density_from_json(j.value("rho0", json{{"kind", "constant"}, {"value", 1.0}}), cfg.grid, base,
                                 &cfg.inputs);
    cfg.force = force_from_json(j.value("force", json{{"kind", "zero"}}), cfg.grid, base, &cfg.inputs);
    if (!j.contains("T") || !j.contains("dt")) throw ConfigError("darcy-run needs T and dt");
    cfg.T = num(j, "T", 0.0);
    cfg.dt = num(j, "dt", 0.0);
    if (!(cfg.T > 0.0)) throw ConfigError("T must be positive");
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    cfg.options.stride = j.value("stride", 1);
    if (j.contains("q")) cfg.options.q_list = j["q"].get<std::vector<double>>();
    cfg.options.picard = j.value("picard", false);
    cfg.options.transport.cfl_max = num(j, "cfl_max", 5.0);
    cfg.dump = j.value("dump", "vtk");
    if (cfg.dump != "none" && cfg.dump != "vtk" && cfg.dump != "binary" && cfg.dump != "both")
      throw ConfigError("dump must be none, vtk, binary or both");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed darcy-run configuration: ") + e.what());
  }
  return cfg;
}

}  // namespace homog::cli
