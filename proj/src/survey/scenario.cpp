#include "mdres/scenario.hpp"

#include "mdres/errors.hpp"
#include "mdres/msh_io.hpp"

#include <chrono>

namespace mdres {

namespace {

ScenarioSpec with_surface(const ScenarioSpec& spec)
{
  ScenarioSpec s = spec;
  s.survey.center.z() = spec.domain.max.z();
  return s;
}

} // namespace

std::array<ElectrodeSpec, 4> scenario_electrodes(const ScenarioSpec& spec)
{
  const ScenarioSpec s = with_surface(spec);
  return build_wenner(s.survey, s.domain);
}

BoxMeshSpec scenario_mesh_spec(const ScenarioSpec& in)
{
  const ScenarioSpec spec = with_surface(in);
  BoxMeshSpec ms;
  ms.origin = spec.domain.min;
  ms.extents = spec.domain.extents();
  ms.cell_size = spec.mesh.cell_size;
  ms.grading = spec.mesh.grading;
  ms.refinement = spec.mesh.refinement;
  ms.required_planes = spec.mesh.required_planes;
  const Box& d = spec.domain;

  if (spec.liner) {
    for (const Panel& p : spec.liner->panels) {
      ms.required_planes[p.axis].push_back(p.position);
      const auto ax = p.in_plane_axes();
      for (int k = 0; k < 2; ++k) {
        ms.required_planes[ax[k]].push_back(p.lo[k]);
        ms.required_planes[ax[k]].push_back(p.hi[k]);
      }
    }
    for (const Hole& h : spec.liner->holes) {
      const double hs = spec.mesh.hole_cell_size > 0.0 ? spec.mesh.hole_cell_size : 2.0 * h.radius;
      const Box region{(h.center - Vec3::Constant(3.0 * hs)).cwiseMax(d.min),
                       (h.center + Vec3::Constant(3.0 * hs)).cwiseMin(d.max)};
      // hole centre at a lattice-square centre
      ms.refinement.push_back({region, hs, h.center - Vec3::Constant(0.5 * hs)});
    }
  }
  if (spec.crop_below) {
    ms.required_planes[2].push_back(*spec.crop_below);
  }

  const double he = spec.mesh.electrode_cell_size;
  if (he > 0.0) {
    const auto tops = spec.survey.top_positions();
    Box region = Box::empty();
    for (const auto& p : tops) {
      region.expand(p);
    }
    const double m = spec.mesh.electrode_margin;
    region.min -= Vec3(m, m, spec.survey.electrode.length + m);
    region.max += Vec3(m, m, 0.0);
    region.min = region.min.cwiseMax(d.min);
    region.max = region.max.cwiseMin(d.max);
    // electrodes sit at local offset (0.5, 0.25) of a lattice column, away
    // from the hexahedron's diagonal planes
    Vec3 anchor = tops[0];
    const int along = spec.survey.axis;
    const int across = 1 - along;
    anchor[along] -= 0.5 * he;
    anchor[across] -= 0.25 * he;
    anchor.z() = d.max.z();
    ms.refinement.push_back({region, he, anchor});
  }
  return ms;
}

MixedDimGrid build_scenario_grid(const ScenarioSpec& spec)
{
  if (!(spec.sigma > 0.0)) {
    throw InvalidGeometry("water conductivity must be positive");
  }
  SubdomainMesh bulk;
  if (!spec.mesh.file.empty()) {
    if (spec.crop_below) {
      throw InvalidGeometry("cropping is only available for built-in lattice meshes");
    }
    bulk = load_msh(spec.mesh.file);
    if (bulk.dim != 3) {
      throw InvalidGeometry("bulk mesh file " + spec.mesh.file.string() + " is not three-dimensional");
    }
  } else {
    BoxLattice lattice = build_box_lattice(scenario_mesh_spec(spec));
    if (spec.crop_below) {
      lattice = lattice.cropped(2, *spec.crop_below, spec.domain.max.z());
    }
    bulk = build_lattice_mesh(lattice);
  }
  MixedDimGrid grid;
  if (spec.liner) {
    grid = embed_liner(std::move(bulk), *spec.liner);
  } else {
    grid.bulk = std::move(bulk);
  }
  const Adt adt(cell_boxes(grid.bulk));
  for (const auto& e : scenario_electrodes(spec)) {
    add_electrode(grid, e.polyline, adt);
  }
  return grid;
}

ScenarioResult run_scenario(const ScenarioSpec& spec, bool keep_state)
{
  const auto t0 = std::chrono::steady_clock::now();
  auto grid = std::make_shared<MixedDimGrid>(build_scenario_grid(spec));

  MixedDimProblem pb;
  pb.grid = grid.get();
  pb.bulk_material = MaterialField::uniform(grid->bulk, spec.sigma);
  if (spec.liner) {
    pb.liner = LinerProperties{spec.liner->thickness, spec.liner->sigma};
  }
  const auto electrodes = scenario_electrodes(spec);
  pb.electrodes.assign(electrodes.begin(), electrodes.end());
  pb.options.scheme = spec.scheme;
  pb.options.explicit_mortars = spec.explicit_mortars;
  pb.options.threads = spec.threads;
  auto assembled = std::make_shared<AssembledProblem>(assemble_global(pb));

  SolveOptions so;
  so.gauge = spec.gauge;
  auto solution = std::make_shared<Solution>(solve(*assembled, so));

  ScenarioResult r;
  r.rho = apparent_resistivity(*solution, with_surface(spec).survey);
  r.balance = check_balance(*assembled, *solution);
  r.solve = solution->report;
  r.bulk_cells = grid->bulk.num_cells();
  r.liner_cells = grid->has_liner() ? grid->liner->num_cells() : 0;
  r.liner_area = grid->liner_area;
  r.realized_hole_area = grid->realized_hole_area;
  r.min_electrode_edge_distance = std::numeric_limits<double>::infinity();
  for (const auto& m : grid->electrode_maps) {
    r.min_electrode_edge_distance = std::min(r.min_electrode_edge_distance, m.min_edge_distance);
  }
  r.warnings = grid->warnings;
  r.warnings.insert(r.warnings.end(), assembled->warnings.begin(), assembled->warnings.end());
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (keep_state) {
    r.grid = grid;
    r.problem = assembled;
    r.solution = solution;
  }
  return r;
}

} // namespace mdres
