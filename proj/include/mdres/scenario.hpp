#pragma once

#include "mdres/box_mesh.hpp"
#include "mdres/survey.hpp"

#include <filesystem>
#include <memory>

namespace mdres {

struct MeshSettings {
  double cell_size = 0.05;
  /// Lattice size in a box around the electrode array; 0 disables it.
  double electrode_cell_size = 0.01;
  /// Horizontal margin around the array and depth margin below the tips, m.
  double electrode_margin = 0.02;
  /// Lattice size around liner holes; 0 picks twice the hole radius.
  double hole_cell_size = 0.0;
  double grading = 0.5;
  std::vector<RefinementRegion> refinement;
  std::array<std::vector<double>, 3> required_planes;
  /// Bulk mesh read from an MSH 4.1 file instead of the built-in mesher;
  /// the lattice settings above are then ignored.
  std::filesystem::path file;
};

/**
 * @brief One forward run: a water body (box), optional liner, a Wenner array
 * hanging from the water surface (domain top), scheme and gauge.
 *
 * The array's center.z() is ignored; electrodes start at domain.max.z().
 * With crop_below set, everything under that height is removed from the
 * mesh (the plane must be part of the lattice; it is added automatically).
 */
struct ScenarioSpec {
  std::string name;
  Box domain{Vec3::Zero(), Vec3(0.52, 0.34, 0.40)};
  double sigma = 1.0 / 29.0;
  MeshSettings mesh;
  std::optional<LinerSpec> liner;
  std::optional<double> crop_below;
  SurveyConfig survey;
  Scheme scheme = Scheme::Mpfa;
  GaugeMode gauge = GaugeMode::Pin;
  bool explicit_mortars = false;
  int threads = 1;
};

struct ScenarioResult {
  ApparentResistivity rho;
  BalanceReport balance;
  SolveReport solve;
  int bulk_cells = 0;
  int liner_cells = 0;
  double liner_area = 0.0;
  double realized_hole_area = 0.0;
  double min_electrode_edge_distance = 0.0;
  double seconds = 0.0;
  std::vector<std::string> warnings;

  std::shared_ptr<const MixedDimGrid> grid;
  std::shared_ptr<const AssembledProblem> problem;
  std::shared_ptr<const Solution> solution;
};

/// Lattice description (planes and refinement) derived from a scenario.
BoxMeshSpec scenario_mesh_spec(const ScenarioSpec& spec);

/// Array electrodes positioned for the scenario (tops on the water surface).
std::array<ElectrodeSpec, 4> scenario_electrodes(const ScenarioSpec& spec);

/// Bulk mesh (cropped if requested), liner split and electrode maps.
MixedDimGrid build_scenario_grid(const ScenarioSpec& spec);

/// Builds, assembles and solves; keeps grid/problem/solution when asked.
ScenarioResult run_scenario(const ScenarioSpec& spec, bool keep_state = false);

} // namespace mdres
