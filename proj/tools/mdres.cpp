// mdres: configuration-driven front end for meshing, solving, sweeps and the
// analytic reference.

#include "mdres/config.hpp"
#include "mdres/errors.hpp"
#include "mdres/io.hpp"
#include "mdres/msh_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>

namespace {

using namespace mdres;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

struct Options {
  std::string config;
  std::string scheme;
  int jobs = 1;
  std::string out;
};

fs::path output_dir(const RunConfig& cfg, const Options& o)
{
  const fs::path dir = o.out.empty() ? cfg.output().dir : fs::path(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  return dir;
}

ScenarioSpec resolved_scenario(const RunConfig& cfg, const Options& o)
{
  ScenarioSpec s = cfg.scenario();
  if (!o.scheme.empty()) {
    s.scheme = parse_scheme(o.scheme);
  }
  return s;
}

void print_warnings(const std::vector<std::string>& warnings)
{
  for (const auto& w : warnings) {
    std::cerr << "warning: " << w << '\n';
  }
}

/// Identical node coordinates and cell connectivity. Face counts are not
/// compared because splitting along a liner duplicates faces in memory.
bool same_geometry(const SubdomainMesh& a, const SubdomainMesh& b)
{
  if (a.dim != b.dim || a.num_cells() != b.num_cells() || a.num_nodes() != b.num_nodes()) {
    return false;
  }
  for (int n = 0; n < a.num_nodes(); ++n) {
    if (a.nodes[n] != b.nodes[n]) {
      return false;
    }
  }
  for (int c = 0; c < a.num_cells(); ++c) {
    const auto ca = a.cell(c);
    const auto cb = b.cell(c);
    if (!std::equal(ca.begin(), ca.end(), cb.begin(), cb.end())) {
      return false;
    }
  }
  return true;
}

int cmd_mesh(const Options& o)
{
  const RunConfig cfg = RunConfig::from_file(o.config);
  const ScenarioSpec spec = resolved_scenario(cfg, o);
  const fs::path dir = output_dir(cfg, o);
  const MixedDimGrid grid = build_scenario_grid(spec);
  print_warnings(grid.warnings);

  const auto inv = check_invariants(grid.bulk);
  double min_edge = std::numeric_limits<double>::infinity();
  for (const auto& m : grid.electrode_maps) {
    min_edge = std::min(min_edge, m.min_edge_distance);
  }
  const fs::path msh = dir / "bulk.msh";
  write_msh(grid.bulk, msh);
  const SubdomainMesh back = load_msh(msh);
  const bool round_trip = same_geometry(back, grid.bulk);
  if (!round_trip) {
    std::fprintf(stderr, "round trip: reloaded %d cells and %d nodes differ from the written %d and %d\n",
                 back.num_cells(), back.num_nodes(), grid.bulk.num_cells(), grid.bulk.num_nodes());
  }
  if (grid.has_liner()) {
    write_msh(*grid.liner, dir / "liner.msh");
  }

  CsvTable t({"bulk_cells", "bulk_nodes", "bulk_faces", "total_volume", "min_volume", "max_closure_error",
              "invariants_ok", "liner_cells", "liner_area", "realized_hole_area", "electrodes",
              "min_electrode_edge_distance", "round_trip_ok"});
  t.add_row({std::to_string(grid.bulk.num_cells()), std::to_string(grid.bulk.num_nodes()),
             std::to_string(grid.bulk.num_faces()), csv_number(inv.total_volume), csv_number(inv.min_volume),
             csv_number(inv.max_closure_error), inv.ok ? "1" : "0",
             std::to_string(grid.has_liner() ? grid.liner->num_cells() : 0), csv_number(grid.liner_area),
             csv_number(grid.realized_hole_area), std::to_string(grid.electrodes.size()), csv_number(min_edge),
             round_trip ? "1" : "0"});
  t.save(dir / "mesh.csv");
  t.write(std::cout);
  for (const auto& p : inv.problems) {
    std::cerr << "invariant: " << p << '\n';
  }
  if (!inv.ok || !round_trip) {
    std::cerr << "error: mesh checks failed\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_solve(const Options& o)
{
  const RunConfig cfg = RunConfig::from_file(o.config);
  const ScenarioSpec spec = resolved_scenario(cfg, o);
  const OutputConfig out = cfg.output();
  const fs::path dir = output_dir(cfg, o);
  const ScenarioResult r = run_scenario(spec, out.vtk);
  print_warnings(r.warnings);
  const CsvTable t = summary_table(spec, r);
  t.save(dir / "summary.csv");
  t.write(std::cout);
  if (out.vtk) {
    std::vector<std::string> names;
    for (const auto& e : scenario_electrodes(spec)) {
      names.push_back(e.name);
    }
    write_solution_vtk(dir, *r.grid, *r.solution, names);
  }
  std::fprintf(stderr, "%s: rho_a = %.6g Ohm m (%s, %d bulk cells, %.1f s)\n", spec.name.c_str(), r.rho.value,
               scheme_name(spec.scheme), r.bulk_cells, r.seconds);
  return kOk;
}

int cmd_sweep(const Options& o)
{
  const RunConfig cfg = RunConfig::from_file(o.config);
  const ScenarioSpec spec = resolved_scenario(cfg, o);
  const SweepConfig sw = cfg.sweep();
  const fs::path dir = output_dir(cfg, o);
  if (o.jobs < 1) {
    throw ConfigError("--jobs: must be at least 1");
  }
  std::vector<SweepRow> rows;
  if (sw.kind == SweepConfig::Kind::Depth) {
    rows = depth_sweep(spec, sw.depths, sw.strategies, o.jobs);
  } else {
    rows = uncertainty_sweep(spec, sw.uncertainty, o.jobs);
    std::vector<double> rho;
    for (const auto& r : rows) {
      rho.push_back(r.result.rho.value);
    }
    histogram_table(histogram(rho, sw.uncertainty.bins)).save(dir / "histogram.csv");
  }
  for (const auto& r : rows) {
    print_warnings(r.result.warnings);
  }
  const CsvTable t = sweep_table(rows);
  t.save(dir / "sweep.csv");
  t.write(std::cout);
  return kOk;
}

int cmd_analytic(const Options& o)
{
  const RunConfig cfg = RunConfig::from_file(o.config);
  const AnalyticConfig a = cfg.analytic();
  const fs::path dir = output_dir(cfg, o);
  const CsvTable t = analytic_table(a.rho, a.spacing, a.depths);
  t.save(dir / "analytic.csv");
  t.write(std::cout);
  return kOk;
}

int run(const std::function<int()>& body)
{
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidSurvey& e) {
    std::cerr << "config error: survey: " << e.what() << '\n';
    return kConfig;
  } catch (const NonConformingLiner& e) {
    std::cerr << "config error: liner: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidGeometry& e) {
    std::cerr << "config error: geometry: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "i/o error: mesh file: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"mdres: mixed-dimensional DC resistivity forward modelling"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool scheme, bool jobs) {
    sub->add_option("--config", o.config, "JSON configuration file")->required();
    sub->add_option("--out", o.out, "output directory (overrides output.dir)");
    if (scheme) {
      sub->add_option("--scheme", o.scheme, "tpfa or mpfa (overrides the configuration)")
          ->check(CLI::IsMember({"tpfa", "mpfa"}));
    }
    if (jobs) {
      sub->add_option("--jobs", o.jobs, "concurrent solves")->check(CLI::PositiveNumber);
    }
  };
  auto* mesh = app.add_subcommand("mesh", "build the bulk mesh, write MSH and diagnostics");
  add_common(mesh, true, false);
  auto* solve = app.add_subcommand("solve", "solve one scenario, write summary CSV and VTK fields");
  add_common(solve, true, false);
  auto* sweep = app.add_subcommand("sweep", "run a depth or uncertainty sweep");
  add_common(sweep, true, true);
  auto* analytic = app.add_subcommand("analytic", "tabulate the layer-over-insulator formula");
  add_common(analytic, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*mesh) {
    return run([&] { return cmd_mesh(o); });
  }
  if (*solve) {
    return run([&] { return cmd_solve(o); });
  }
  if (*sweep) {
    return run([&] { return cmd_sweep(o); });
  }
  return run([&] { return cmd_analytic(o); });
}
