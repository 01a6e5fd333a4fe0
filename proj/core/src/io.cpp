#include "homog/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>

namespace homog {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double number(const json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string("expected a number for ") + key);
  return j.get<double>();
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

bool uniform_grid(const StaggeredGrid& grid) {
  for (int d = 0; d < 3; ++d)
    if (!grid.axis(d).is_uniform()) return false;
  return true;
}

void vtk_header(std::ofstream& out, const StaggeredGrid& grid, const std::string& title) {
  const auto cd = grid.cell_dims();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n";
  if (uniform_grid(grid)) {
    out << "DATASET STRUCTURED_POINTS\nDIMENSIONS " << cd[0] + 1 << ' ' << cd[1] + 1 << ' ' << cd[2] + 1 << '\n';
    out << "ORIGIN " << format_number(grid.axis(0).origin()) << ' ' << format_number(grid.axis(1).origin()) << ' '
        << format_number(grid.axis(2).origin()) << '\n';
    out << "SPACING " << format_number(grid.axis(0).width(0)) << ' ' << format_number(grid.axis(1).width(0)) << ' '
        << format_number(grid.axis(2).width(0)) << '\n';
  } else {
    out << "DATASET RECTILINEAR_GRID\nDIMENSIONS " << cd[0] + 1 << ' ' << cd[1] + 1 << ' ' << cd[2] + 1 << '\n';
    const char* names[3] = {"X_COORDINATES", "Y_COORDINATES", "Z_COORDINATES"};
    for (int d = 0; d < 3; ++d) {
      const Axis& ax = grid.axis(d);
      out << names[d] << ' ' << ax.cells() + 1 << " double\n";
      for (int i = 0; i < ax.cells(); ++i) out << format_number(ax.face(i)) << ' ';
      out << format_number(ax.origin() + ax.length()) << '\n';
    }
  }
  out << "CELL_DATA " << grid.cell_count() << '\n';
}

json grid_json(const StaggeredGrid& grid) {
  json axes = json::array();
  for (int d = 0; d < 3; ++d) {
    const Axis& ax = grid.axis(d);
    axes.push_back({{"faces", ax.faces()}, {"periodic", ax.periodic()}});
  }
  return axes;
}

void check_grid(const json& side, const StaggeredGrid& grid, const fs::path& path) {
  if (!side.contains("axes") || side["axes"] != grid_json(grid))
    throw ConfigError("binary dump " + path.string() + " was written on a different grid");
  if (side.value("dtype", "") != "float64" || side.value("byte_order", "") != "little")
    throw ConfigError("binary dump " + path.string() + " is not little-endian float64");
}

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  } else {
    for (double x : v) {
      auto bits = __builtin_bswap64(std::bit_cast<std::uint64_t>(x));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
}

void read_doubles(std::ifstream& in, std::vector<double>& v) {
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if constexpr (std::endian::native != std::endian::little)
    for (double& x : v) x = std::bit_cast<double>(__builtin_bswap64(std::bit_cast<std::uint64_t>(x)));
}

fs::path sidecar(const fs::path& path) { return fs::path(path.string() + ".json"); }

}  // namespace

json to_json(const Obstacle& obstacle) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoObstacle>) {
          return {{"kind", "none"}};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return {{"kind", "ball"}, {"param", s.radius}};
        } else if constexpr (std::is_same_v<T, Cube>) {
          return {{"kind", "cube"}, {"param", s.half_width}};
        } else {
          return {{"kind", "sdf"}, {"n", s.n}, {"extent", s.extent}, {"values", s.values}};
        }
      },
      obstacle.shape());
}

Obstacle obstacle_from_json(const json& j) {
  if (j.is_string()) return Obstacle::parse(j.get<std::string>());
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("obstacle needs a string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "none") return Obstacle::none();
  if (kind == "ball" || kind == "cube") {
    if (!j.contains("param")) throw ConfigError("obstacle '" + kind + "' needs 'param'");
    const double v = number(j["param"], "obstacle.param");
    if (!(v > 0.0)) throw ConfigError("obstacle size must be positive");
    return kind == "ball" ? Obstacle::ball(v) : Obstacle::cube(v);
  }
  if (kind == "sdf") {
    SdfSamples s;
    s.n = j.at("n").get<int>();
    s.extent = j.value("extent", kObstacleBound);
    s.values = j.at("values").get<std::vector<double>>();
    if (s.n < 2 || s.values.size() != static_cast<std::size_t>(s.n) * s.n * s.n)
      throw ConfigError("sdf obstacle needs n^3 values");
    return Obstacle(std::move(s));
  }
  throw ConfigError("unknown obstacle kind: " + kind);
}

json to_json(const PerforationConfig& c) {
  return {{"epsilon", c.epsilon},
          {"alpha", c.alpha},
          {"obstacle", to_json(c.obstacle)},
          {"domain",
           {{"kind", c.domain == DomainKind::torus3 ? "torus3" : "box3"},
            {"side", {c.box_side[0], c.box_side[1], c.box_side[2]}}}},
          {"mu", c.mu}};
}

PerforationConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  PerforationConfig c;
  try {
    if (j.contains("epsilon")) c.epsilon = number(j["epsilon"], "epsilon");
    if (j.contains("alpha")) c.alpha = number(j["alpha"], "alpha");
    if (j.contains("mu")) c.mu = number(j["mu"], "mu");
    if (j.contains("obstacle")) c.obstacle = obstacle_from_json(j["obstacle"]);
    if (j.contains("domain")) {
      const json& d = j["domain"];
      const std::string kind = d.value("kind", "torus3");
      if (kind == "torus3" || kind == "torus")
        c.domain = DomainKind::torus3;
      else if (kind == "box3" || kind == "box")
        c.domain = DomainKind::box3;
      else
        throw ConfigError("unknown domain kind: " + kind);
      if (d.contains("side")) {
        const json& s = d["side"];
        if (s.is_number()) {
          c.box_side = Vec3::Constant(s.get<double>());
        } else if (s.is_array() && s.size() == 3) {
          for (int i = 0; i < 3; ++i) c.box_side[i] = number(s[static_cast<std::size_t>(i)], "domain.side");
        } else {
          throw ConfigError("domain.side must be a number or three numbers");
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  return c;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string format_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : out_(open_out(path, std::ios::out | std::ios::binary)), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw ConfigError("CSV row has the wrong number of columns");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>)
            out_ << format_number(v);
          else
            out_ << v;
        },
        cells[i]);
  }
  out_ << '\n';
  out_.flush();
}

void write_vtk(const fs::path& path, const StaggeredGrid& grid, const std::string& name, const ScalarField& f) {
  if (!f.matches(grid)) throw ConfigError("field does not match the grid");
  auto out = open_out(path, std::ios::out | std::ios::binary);
  vtk_header(out, grid, name);
  out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (double v : f.values) out << format_number(v) << '\n';
}

void write_vtk(const fs::path& path, const StaggeredGrid& grid, const std::string& name, const VectorField& u) {
  if (!u.matches(grid)) throw ConfigError("field does not match the grid");
  const auto avg = cell_average(grid, u);
  auto out = open_out(path, std::ios::out | std::ios::binary);
  vtk_header(out, grid, name);
  out << "VECTORS " << name << " double\n";
  for (std::size_t c = 0; c < grid.cell_count(); ++c)
    out << format_number(avg[0][c]) << ' ' << format_number(avg[1][c]) << ' ' << format_number(avg[2][c]) << '\n';
}

void write_vtk_mask(const fs::path& path, const StaggeredGrid& grid, const Masks& masks) {
  if (masks.cell.size() != grid.cell_count()) throw ConfigError("masks do not match the grid");
  auto out = open_out(path, std::ios::out | std::ios::binary);
  vtk_header(out, grid, "fluid");
  out << "SCALARS fluid unsigned_char 1\nLOOKUP_TABLE default\n";
  for (auto m : masks.cell) out << static_cast<int>(m) << '\n';
}

fs::path write_binary(const fs::path& path, const StaggeredGrid& grid, const std::string& name, const ScalarField& f) {
  if (!f.matches(grid)) throw ConfigError("field does not match the grid");
  {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    write_doubles(out, f.values);
  }
  const auto cd = grid.cell_dims();
  const fs::path side = sidecar(path);
  write_json(side, {{"name", name},
                    {"location", "cell"},
                    {"dims", {cd[0], cd[1], cd[2]}},
                    {"axes", grid_json(grid)},
                    {"dtype", "float64"},
                    {"byte_order", "little"}});
  return side;
}

fs::path write_binary(const fs::path& path, const StaggeredGrid& grid, const std::string& name, const VectorField& u) {
  if (!u.matches(grid)) throw ConfigError("field does not match the grid");
  {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    for (int d = 0; d < 3; ++d) write_doubles(out, u[d]);
  }
  json dims = json::array();
  for (int d = 0; d < 3; ++d) {
    const auto fd = grid.face_dims(d);
    dims.push_back({fd[0], fd[1], fd[2]});
  }
  const fs::path side = sidecar(path);
  write_json(side, {{"name", name},
                    {"location", "face"},
                    {"dims", dims},
                    {"axes", grid_json(grid)},
                    {"dtype", "float64"},
                    {"byte_order", "little"}});
  return side;
}

ScalarField read_binary_scalar(const fs::path& path, const StaggeredGrid& grid) {
  const json side = read_json(sidecar(path));
  check_grid(side, grid, path);
  if (side.value("location", "") != "cell") throw ConfigError(path.string() + " is not a cell field");
  ScalarField f(grid);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  read_doubles(in, f.values);
  if (!in) throw ConfigError(path.string() + " is truncated");
  return f;
}

VectorField read_binary_vector(const fs::path& path, const StaggeredGrid& grid) {
  const json side = read_json(sidecar(path));
  check_grid(side, grid, path);
  if (side.value("location", "") != "face") throw ConfigError(path.string() + " is not a face field");
  VectorField u(grid);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  for (int d = 0; d < 3; ++d) read_doubles(in, u[d]);
  if (!in) throw ConfigError(path.string() + " is truncated");
  return u;
}

}  // namespace homog
