#include "commands.hpp"

#include "darcy_config.hpp"

#include "homog/cell_problem.hpp"
#include "homog/corrector.hpp"
#include "homog/darcy.hpp"
#include "homog/io.hpp"
#include "homog/microscale.hpp"
#include "homog/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numbers>

namespace homog::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class Body>
int with_context(const std::string& name, const GlobalOptions& g, Body&& body) {
  if (g.threads > 0) par::set_threads(g.threads);
  RunContext ctx(name, g);
  try {
    const int code = body(ctx);
    ctx.finish(code);
    return code;
  } catch (const ConfigError& e) {
    ctx.finish(kConfigError, e.what());
    throw;
  } catch (const SolverError& e) {
    ctx.finish(kSolverError, e.what());
    throw;
  }
}

SolverOptions solver_options(const GlobalOptions& g) {
  if (!(g.tol > 0.0) || !(g.tol < 1.0)) throw ConfigError("--tol must lie in (0, 1)");
  SolverOptions s;
  s.tol = g.tol;
  return s;
}

/// Configuration file (if any) with command-line overrides applied.
PerforationConfig base_config(const GlobalOptions& g, RunContext& ctx, const std::string& obstacle,
                              bool obstacle_given, double alpha, bool alpha_given) {
  PerforationConfig c;
  c.alpha = alpha;
  c.obstacle = Obstacle::parse(obstacle);
  if (!g.config.empty()) {
    ctx.add_input(g.config);
    c = config_from_json(read_json(g.config));
    if (obstacle_given) c.obstacle = Obstacle::parse(obstacle);
    if (alpha_given) c.alpha = alpha;
  }
  return c;
}

std::vector<PerforationConfig> ladder(const PerforationConfig& base, const std::vector<double>& eps) {
  if (eps.size() < 3) throw ConfigError("need ≥ 3 points");
  std::vector<PerforationConfig> out;
  for (double e : eps) {
    PerforationConfig c = base;
    c.epsilon = e;
    c.domain = DomainKind::torus3;
    c.validate();
    out.push_back(c);
  }
  return out;
}

double parse_p(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad norm exponent: " + s);
  }
}

json matrix_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

void print_matrix(const char* name, const Mat3& m) {
  std::printf("%s =\n", name);
  for (int i = 0; i < 3; ++i) std::printf("  % .8e % .8e % .8e\n", m(i, 0), m(i, 1), m(i, 2));
}

void print_fit(const RateReport& r) {
  std::printf("  %-14s slope % .4f  r2 %.4f", r.label.c_str(), r.slope, r.r2);
  if (!std::isnan(r.band)) std::printf("  expected % .4f +- %.2f", r.expected, r.band);
  if (!std::isnan(r.min_slope)) std::printf("  min %.3f", r.min_slope);
  std::printf("  %s\n", r.pass ? "pass" : "FAIL");
}

}  // namespace

int cmd_cell(const GlobalOptions& g, const CellArgs& a) {
  return with_context("cell", g, [&](RunContext& ctx) {
    PerforationConfig c = base_config(g, ctx, a.obstacle, a.obstacle_given, 2.0, false);
    if (g.config.empty()) c.mu = a.mu;
    ctx.set_config({{"obstacle", to_json(c.obstacle)},
                    {"mu", c.mu},
                    {"R", a.R},
                    {"n", a.n},
                    {"core_half", a.core_half},
                    {"core_cells", a.core_cells},
                    {"tol", g.tol}});
    c.obstacle.check_contained();
    // No obstacle means M0 = 0: nothing to solve.
    if (c.obstacle.empty()) throw SolverError("degenerate obstacle: M0 vanishes without an obstacle");
    CellOptions opt;
    opt.core_half = a.core_half;
    opt.core_cells = a.core_cells;
    opt.solver = solver_options(g);
    if (g.strict) opt.min_cells_across = std::max(opt.min_cells_across, 8.0);
    ResistanceMatrix r;
    if (a.R.size() == 1) {
      if (a.n.size() != 1) throw ConfigError("give one resolution or one per truncation radius");
      opt.n = a.n.front();
      r = compute_M0(solve_cell(c.obstacle, a.R.front(), opt), c.mu);
      r.obstacle = c.obstacle.describe();
    } else {
      r = extrapolate_M0(c.obstacle, a.R, a.n, c.mu, opt);
    }
    write_json(ctx.output("resistance.json"), r.to_json());
    print_matrix("M0", r.M0);
    print_matrix("A", r.A);
    std::printf("extrapolation residual %.3e  asymmetry %.3e\n", r.extrapolation_residual, r.asymmetry);
    ctx.results() = {{"M0", matrix_json(r.M0)}, {"extrapolation_residual", r.extrapolation_residual}};
    return int{kSuccess};
  });
}

int cmd_corrector_rates(const GlobalOptions& g, const CorrectorArgs& a) {
  return with_context("corrector-rates", g, [&](RunContext& ctx) {
    const PerforationConfig base = base_config(g, ctx, a.obstacle, a.obstacle_given, a.alpha, a.alpha_given);
    const auto configs = ladder(base, a.eps);
    std::vector<double> p_list;
    for (const auto& s : a.p) p_list.push_back(parse_p(s));
    if (!(a.band >= 0.0) || !(a.band_inf >= 0.0)) throw ConfigError("bands must be non-negative");
    CorrectorRateOptions opt;
    opt.cell.n = a.n;
    opt.cell.solver = solver_options(g);
    opt.corrector.annulus_cells = a.annulus_cells;
    opt.corrector.solver = opt.cell.solver;
    opt.band = a.band;
    opt.band_inf = a.band_inf;
    ctx.set_config({{"base", to_json(base)},
                    {"eps", a.eps},
                    {"p", a.p},
                    {"n", a.n},
                    {"annulus_cells", a.annulus_cells},
                    {"band", a.band},
                    {"band_inf", a.band_inf},
                    {"tol", g.tol}});

    const CorrectorStudy study = verify_corrector_estimates(configs, p_list, opt);
    CsvWriter csv(ctx.output("corrector_rates.csv"), {"epsilon", "alpha", "p", "norm", "value"});
    for (const auto& r : study.rows) csv.row({r.eps, r.alpha, r.p, r.norm_kind, r.value});
    json fits = json::array();
    std::printf("corrector rates, alpha = %g, cell truncation R = %g\n", base.alpha, study.R);
    for (const auto& f : study.fits) {
      fits.push_back(f.to_json());
      print_fit(f);
    }
    const json report = {{"kind", "corrector"}, {"alpha", base.alpha}, {"R", study.R}, {"fits", fits},
                         {"pass", study.pass}};
    write_json(ctx.output("rate_report.json"), report);
    ctx.results() = {{"pass", study.pass}};
    std::printf("%s\n", study.pass ? "pass" : "FAIL");
    return study.pass ? int{kSuccess} : int{kPropertyFailure};
  });
}

int cmd_darcy_run(const GlobalOptions& g, const DarcyArgs&) {
  return with_context("darcy-run", g, [&](RunContext& ctx) {
    if (g.config.empty()) throw ConfigError("darcy-run needs --config <run.json>");
    ctx.add_input(g.config);
    DarcyRunConfig cfg = parse_darcy_config(read_json(g.config), fs::path(g.config).parent_path());
    for (const auto& p : cfg.inputs) ctx.add_input(p);
    cfg.options.solver = solver_options(g);
    ctx.set_config(cfg.raw);

    auto write_ledger = [&](const Trajectory& traj) {
      std::vector<std::string> header{"step", "t", "mass", "L2"};
      for (double q : traj.q_list) header.push_back("Lq_" + format_number(q));
      for (const char* h : {"min", "max", "H1", "H2", "div_l2", "cfl", "pressure_iterations", "pressure_ratio",
                            "mass_correction", "picard_iterations"})
        header.emplace_back(h);
      CsvWriter csv(ctx.output("ledger.csv"), header);
      for (const auto& r : traj.ledger) {
        std::vector<CsvWriter::Cell> row{static_cast<long long>(r.step), r.t, r.mass, r.l2};
        for (double v : r.lq) row.emplace_back(v);
        for (double v : {r.min, r.max, r.h1, r.h2, r.div_l2, r.cfl}) row.emplace_back(v);
        row.emplace_back(static_cast<long long>(r.pressure_iterations));
        row.emplace_back(r.pressure_ratio);
        row.emplace_back(r.mass_correction);
        row.emplace_back(static_cast<long long>(r.picard_iterations));
        csv.row(row);
      }
    };

    Trajectory traj;
    try {
      traj = run_darcy(cfg.grid, cfg.rho0, cfg.force, cfg.A, cfg.T, cfg.dt, cfg.options);
    } catch (const DarcyRunFailure& e) {
      write_ledger(e.partial());
      write_json(ctx.output("run_report.json"),
                 {{"failed_step", e.partial().failed_step}, {"failure", e.partial().failure}, {"pass", false}});
      throw;
    }
    write_ledger(traj);

    int frame = 0;
    for (const auto& s : traj.states) {
      char tag[32];
      std::snprintf(tag, sizeof tag, "%04d", frame++);
      if (cfg.dump == "vtk" || cfg.dump == "both") {
        write_vtk(ctx.output(std::string("rho_") + tag + ".vtk"), traj.grid, "rho", s.rho);
        write_vtk(ctx.output(std::string("u_") + tag + ".vtk"), traj.grid, "u", s.u);
        write_vtk(ctx.output(std::string("p_") + tag + ".vtk"), traj.grid, "p", s.p);
      }
      if (cfg.dump == "binary" || cfg.dump == "both") {
        for (const auto& [name, field] : {std::pair<const char*, const ScalarField*>{"rho", &s.rho}, {"p", &s.p}}) {
          const std::string file = std::string(name) + "_" + tag + ".bin";
          write_binary(ctx.output(file), traj.grid, name, *field);
          ctx.output(file + ".json");
        }
        const std::string file = std::string("u_") + tag + ".bin";
        write_binary(ctx.output(file), traj.grid, "u", s.u);
        ctx.output(file + ".json");
      }
    }

    const auto& L = traj.ledger;
    bool max_ok = true, min_ok = true;
    double worst_div = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i) {
      if (i > 0 && L[i].max > L[i - 1].max) max_ok = false;
      if (i > 0 && L[i].min < L[i - 1].min) min_ok = false;
      worst_div = std::max(worst_div, L[i].div_l2);
    }
    const double mass_drift =
        L.front().mass != 0.0 ? std::abs(L.back().mass - L.front().mass) / std::abs(L.front().mass) : 0.0;
    const double l2_decay = L.front().l2 > 0.0 ? 1.0 - L.back().l2 / L.front().l2 : 0.0;
    const bool nonneg = std::all_of(L.begin(), L.end(), [](const LedgerRow& r) { return r.min >= 0.0; });
    const double div_bound = 10.0 * g.tol;
    const bool pass = max_ok && min_ok && nonneg && mass_drift <= 1e-10 && worst_div <= div_bound;
    const json report = {{"kind", "darcy"},
                         {"steps", traj.steps},
                         {"dt", traj.dt},
                         {"mass_drift", mass_drift},
                         {"l2_decay", l2_decay},
                         {"max_nonincreasing", max_ok},
                         {"min_nondecreasing", min_ok},
                         {"nonnegative", nonneg},
                         {"max_div_l2", worst_div},
                         {"div_bound", div_bound},
                         {"final_max", L.back().max},
                         {"final_min", L.back().min},
                         {"pass", pass}};
    write_json(ctx.output("run_report.json"), report);
    ctx.results() = report;
    std::printf("darcy-run: %d steps, dt %g, mass drift %.3e, L2 decay %.4f, max div %.3e  %s\n", traj.steps,
                traj.dt, mass_drift, l2_decay, worst_div, pass ? "pass" : "FAIL");
    return pass ? int{kSuccess} : int{kPropertyFailure};
  });
}

int cmd_micro_compare(const GlobalOptions& g, const MicroArgs& a) {
  return with_context("micro-compare", g, [&](RunContext& ctx) {
    const PerforationConfig base = base_config(g, ctx, a.obstacle, a.obstacle_given, a.alpha, a.alpha_given);
    const auto configs = ladder(base, a.eps);
    if (base.obstacle.empty()) throw SolverError("degenerate resistance: no holes, M0 vanishes");
    MicroOptions opt;
    opt.cells_per_period = a.cells_per_period;
    opt.core_cells = a.core_cells;
    opt.core_diameters = a.core_diameters;
    opt.strict = g.strict;
    opt.solver = solver_options(g);
    PoincareOptions popt;
    popt.n = a.poincare_n;
    popt.solver = opt.solver;

    ResistanceMatrix res;
    if (!a.resistance.empty()) {
      ctx.add_input(a.resistance);
      try {
        res = ResistanceMatrix::from_json(read_json(a.resistance));
      } catch (const json::exception& e) {
        throw ConfigError("malformed resistance file: " + std::string(e.what()));
      }
    } else {
      CellOptions copt;
      copt.solver = opt.solver;
      res = extrapolate_M0(base.obstacle, a.cell_R, {a.cell_n}, base.mu, copt);
      write_json(ctx.output("resistance.json"), res.to_json());
    }
    const Mat3 A = (base.mu * res.M0).inverse();
    ctx.set_config({{"base", to_json(base)},
                    {"eps", a.eps},
                    {"resistance", a.resistance},
                    {"cell_R", a.cell_R},
                    {"cell_n", a.cell_n},
                    {"cells_per_period", a.cells_per_period},
                    {"core_cells", a.core_cells},
                    {"core_diameters", a.core_diameters},
                    {"min_slope", a.min_slope},
                    {"poincare_n", a.poincare_n},
                    {"tol", g.tol}});

    const MicroStudy study = run_micro_ladder(configs, A, default_forcing(), opt, popt, a.min_slope);
    CsvWriter csv(ctx.output("micro_rates.csv"), {"epsilon", "alpha", "err_u", "err_p", "lambda_min", "sigma_check"});
    for (const auto& r : study.rows) csv.row({r.eps, r.alpha, r.err_u, r.err_p, r.lambda_min, r.sigma_check});
    std::printf("micro-compare, alpha = %g\n", base.alpha);
    for (const auto& r : study.rows) std::printf("  eps %-8g err_u %.5e  err_p %.5e\n", r.eps, r.err_u, r.err_p);
    print_fit(study.fit_u);
    print_fit(study.fit_p);
    const json report = {{"kind", "micro"},
                         {"alpha", base.alpha},
                         {"M0", matrix_json(res.M0)},
                         {"fits", json::array({study.fit_u.to_json(), study.fit_p.to_json()})},
                         {"monotone_violations", study.monotone_violations},
                         {"pass", study.pass}};
    write_json(ctx.output("rate_report.json"), report);
    ctx.results() = {{"pass", study.pass}};
    std::printf("%s\n", study.pass ? "pass" : "FAIL");
    return study.pass ? int{kSuccess} : int{kPropertyFailure};
  });
}

int cmd_poincare(const GlobalOptions& g, const PoincareArgs& a) {
  return with_context("poincare", g, [&](RunContext& ctx) {
    const PerforationConfig base = base_config(g, ctx, a.obstacle, a.obstacle_given, a.alpha, a.alpha_given);
    const auto configs = ladder(base, a.eps);
    if (base.obstacle.empty()) throw SolverError("degenerate Poincare cell: no holes");
    PoincareOptions opt;
    opt.n = a.n;
    opt.solver = solver_options(g);
    ctx.set_config({{"base", to_json(base)}, {"eps", a.eps}, {"n", a.n}, {"band", a.band}, {"radius", a.radius},
                    {"tol", g.tol}});

    const PoincareStudy study = run_poincare_ladder(configs, opt, a.band);
    CsvWriter csv(ctx.output("poincare_rates.csv"), {"epsilon", "alpha", "lambda_min", "sigma_check", "sigma_eps"});
    for (const auto& r : study.rows) csv.row({r.eps, r.alpha, r.lambda_min, r.sigma_check, r.sigma_eps});
    std::printf("poincare, alpha = %g\n", base.alpha);
    for (const auto& r : study.rows)
      std::printf("  eps %-8g lambda_min %.5e  sigma_check %.5e  sigma_eps %.5e\n", r.eps, r.lambda_min,
                  r.sigma_check, r.sigma_eps);
    print_fit(study.fit);
    bool pass = study.pass;
    json report = {{"kind", "poincare"}, {"alpha", base.alpha}, {"fits", json::array({study.fit.to_json()})}};
    if (a.radius > 0.0) {
      const PoincareResult cell = poincare_cell(Obstacle::ball(a.radius), 1.0, opt);
      const double capacity = 4.0 * std::numbers::pi * a.radius;
      const double rel = std::abs(cell.lambda_min - capacity) / capacity;
      const bool ok = rel <= 0.25;
      pass = pass && ok;
      report["single_cell"] = {{"radius", a.radius}, {"lambda_min", cell.lambda_min}, {"capacity", capacity},
                               {"relative_deviation", rel}, {"pass", ok}};
      std::printf("  single cell r = %g: lambda_min %.5f vs 4 pi r %.5f (%.1f%%)  %s\n", a.radius, cell.lambda_min,
                  capacity, 100.0 * rel, ok ? "pass" : "FAIL");
    }
    report["pass"] = pass;
    write_json(ctx.output("rate_report.json"), report);
    ctx.results() = {{"pass", pass}};
    std::printf("%s\n", pass ? "pass" : "FAIL");
    return pass ? int{kSuccess} : int{kPropertyFailure};
  });
}

int cmd_report(const GlobalOptions& g, const ReportArgs& a) {
  return with_context("report", g, [&](RunContext& ctx) {
    std::vector<fs::path> files;
    for (const auto& in : a.inputs) {
      const fs::path p(in);
      if (fs::is_directory(p)) {
        for (const auto& e : fs::recursive_directory_iterator(p))
          if (e.is_regular_file() && (e.path().filename() == "rate_report.json" || e.path().filename() == "run_report.json"))
            files.push_back(e.path());
      } else if (fs::is_regular_file(p)) {
        files.push_back(p);
      } else {
        throw ConfigError("no such report: " + in);
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no reports found");
    ctx.set_config({{"inputs", a.inputs}});
    json entries = json::array();
    bool all = true;
    for (const auto& f : files) {
      ctx.add_input(f);
      const json r = read_json(f);
      if (!r.contains("pass") || !r["pass"].is_boolean()) throw ConfigError(f.string() + " has no pass flag");
      const bool pass = r["pass"].get<bool>();
      all = all && pass;
      json e = {{"path", f.string()}, {"kind", r.value("kind", "unknown")}, {"pass", pass}};
      if (r.contains("fits")) {
        json fits = json::array();
        for (const auto& fit : r["fits"])
          fits.push_back({{"label", fit.value("label", "")}, {"slope", fit.value("slope", 0.0)},
                          {"pass", fit.value("pass", true)}});
        e["fits"] = fits;
      }
      entries.push_back(e);
      std::printf("%-60s %-10s %s\n", f.string().c_str(), e["kind"].get<std::string>().c_str(), pass ? "pass" : "FAIL");
    }
    write_json(ctx.output("summary.json"), {{"reports", entries}, {"pass", all}});
    ctx.results() = {{"pass", all}, {"count", files.size()}};
    return all ? int{kSuccess} : int{kPropertyFailure};
  });
}

namespace {

void add_global(CLI::App& app, GlobalOptions& g) {
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "output directory (default $HOMOG_OUT_DIR or homog_out)");
  app.add_option("--threads", g.threads, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--tol", g.tol, "relative solver tolerance");
  app.add_flag("--strict", g.strict, "refuse under-resolved geometry instead of warning");
  app.add_option("--seed", g.seed, "recorded in the manifest; all solvers are deterministic");
}

void print_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << std::endl;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Homogenization of Stokes flow in perforated domains"};
  app.set_version_flag("--version", std::string("homog ") + HOMOG_VERSION);
  app.require_subcommand(1);
  GlobalOptions g;
  add_global(app, g);
  app.fallthrough();

  CellArgs cell;
  auto* c = app.add_subcommand("cell", "resistance matrix M0 from the exterior cell problem");
  c->add_option("--obstacle", cell.obstacle, "ball:r, cube:h or none")->each([&](const std::string&) {
    cell.obstacle_given = true;
  });
  c->add_option("--R", cell.R, "truncation radii")->delimiter(',');
  c->add_option("--n", cell.n, "cells per axis, one per radius or one for all")->delimiter(',');
  c->add_option("--mu", cell.mu, "viscosity")->check(CLI::PositiveNumber);
  c->add_option("--core-half", cell.core_half, "half width of the refined core");
  c->add_option("--core-cells", cell.core_cells, "cells across the refined core");

  CorrectorArgs cor;
  auto* r = app.add_subcommand("corrector-rates", "corrector estimates over an epsilon ladder");
  r->add_option("--obstacle", cor.obstacle)->each([&](const std::string&) { cor.obstacle_given = true; });
  r->add_option("--alpha", cor.alpha)->each([&](const std::string&) { cor.alpha_given = true; });
  r->add_option("--eps", cor.eps)->delimiter(',');
  r->add_option("--p", cor.p, "norm exponents, inf allowed")->delimiter(',');
  r->add_option("--n", cor.n, "cell solve resolution");
  r->add_option("--annulus-cells", cor.annulus_cells);
  r->add_option("--band", cor.band, "slope tolerance for finite p");
  r->add_option("--band-inf", cor.band_inf, "slope tolerance for p = inf");

  DarcyArgs darcy;
  app.add_subcommand("darcy-run", "transport-Darcy evolution from --config");

  MicroArgs mic;
  auto* m = app.add_subcommand("micro-compare", "microscale Stokes against the Darcy limit");
  m->add_option("--obstacle", mic.obstacle)->each([&](const std::string&) { mic.obstacle_given = true; });
  m->add_option("--alpha", mic.alpha)->each([&](const std::string&) { mic.alpha_given = true; });
  m->add_option("--eps", mic.eps)->delimiter(',');
  m->add_option("--resistance", mic.resistance, "resistance.json from the cell command");
  m->add_option("--cell-R", mic.cell_R)->delimiter(',');
  m->add_option("--cell-n", mic.cell_n);
  m->add_option("--cells-per-period", mic.cells_per_period);
  m->add_option("--core-cells", mic.core_cells);
  m->add_option("--core-diameters", mic.core_diameters);
  m->add_option("--min-slope", mic.min_slope);
  m->add_option("--poincare-n", mic.poincare_n);

  PoincareArgs poi;
  auto* q = app.add_subcommand("poincare", "Poincare constant over an epsilon ladder");
  q->add_option("--obstacle", poi.obstacle)->each([&](const std::string&) { poi.obstacle_given = true; });
  q->add_option("--alpha", poi.alpha)->each([&](const std::string&) { poi.alpha_given = true; });
  q->add_option("--eps", poi.eps)->delimiter(',');
  q->add_option("--n", poi.n);
  q->add_option("--band", poi.band);
  q->add_option("--radius", poi.radius, "single-cell capacity check radius, 0 disables");

  ReportArgs rep;
  auto* s = app.add_subcommand("report", "aggregate rate and run reports");
  s->add_option("inputs", rep.inputs, "report files or directories")->required();

  for (auto* sub : app.get_subcommands({})) add_global(*sub, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what(), kConfigError);
    return kConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "cell") return cmd_cell(g, cell);
    if (name == "corrector-rates") return cmd_corrector_rates(g, cor);
    if (name == "darcy-run") return cmd_darcy_run(g, darcy);
    if (name == "micro-compare") return cmd_micro_compare(g, mic);
    if (name == "poincare") return cmd_poincare(g, poi);
    return cmd_report(g, rep);
  } catch (const ConfigError& e) {
    print_error("config", e.what(), kConfigError);
    return kConfigError;
  } catch (const SolverError& e) {
    print_error("solver", e.what(), kSolverError);
    return kSolverError;
  } catch (const std::exception& e) {
    print_error("internal", e.what(), kSolverError);
    return kSolverError;
  }
}

}  // namespace homog::cli
