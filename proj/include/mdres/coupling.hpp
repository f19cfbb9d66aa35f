#pragma once

#include "mdres/fv.hpp"
#include "mdres/mixed_grid.hpp"

#include <numeric>
#include <optional>

namespace mdres {

/// Reduced electrode: a polyline whose first point is the top end.
struct ElectrodeSpec {
  std::string name;
  std::vector<Vec3> polyline;
  double radius = 1e-3;      ///< r, m
  double sigma = 1.45e6;     ///< electrode material conductivity, S/m
  double skin = 0.0;         ///< dimensionless skin factor S
  double current = 0.0;      ///< injected current at the top, A (0 for potential electrodes)
  double exchange_scale = 1.0; ///< multiplies the Peaceman conductance

  [[nodiscard]] double length() const;
  /// Throws InvalidGeometry when r, l, sigma are not positive or S < 0.
  void validate() const;
};

/// 2 pi sigma / (ln(0.2 h / r) + S). Throws NonpositiveDenominator.
double peaceman_conductance(double sigma_bulk, double radius, double h_cell, double skin);

/// Exchange link between a lower-dimensional cell and a bulk cell. The
/// exchange current j = g (phi_bulk - phi_lower) leaves the bulk and enters
/// the lower-dimensional cell. Liner links also name the bulk face the
/// current crosses.
struct MortarLink {
  int lower_dof = 0;
  int bulk_dof = 0;
  double conductance = 0.0; ///< g, S
  int bulk_face = -1;
  int side = 0;
};

struct CouplingBlock {
  std::vector<MortarLink> links;
};

/// Global unknown numbering: [bulk | liner | electrode 0 | electrode 1 | ... | mortars].
struct DofLayout {
  int bulk = 0;
  int liner = 0;
  std::vector<int> electrode_offsets;
  std::vector<int> electrode_sizes;
  int mortars = 0; ///< only when mortar unknowns are kept explicitly

  [[nodiscard]] int liner_offset() const { return bulk; }
  [[nodiscard]] int potentials() const
  {
    return bulk + liner + std::accumulate(electrode_sizes.begin(), electrode_sizes.end(), 0);
  }
  [[nodiscard]] int total() const { return potentials() + mortars; }
};

struct LinearSystem {
  SpMat matrix;
  VecX rhs;
  DofLayout layout;
  /// Cell measures (volume, area or length) of the potential unknowns; the
  /// null-average gauge weights potentials by these.
  VecX measures;
};

/// Electrode exchange links: one per segment-map entry, g = sigma_gamma * L
/// with sigma_gamma evaluated on the host cell's diameter.
CouplingBlock assemble_electrode(const ElectrodeSegmentMap& map, const ElectrodeSpec& spec,
                                 const SubdomainMesh& bulk, const MaterialField& bulk_material, int bulk_offset,
                                 int electrode_offset);

struct LinerProperties {
  double thickness = 1e-3; ///< epsilon, m
  double sigma = 1e-9;     ///< sigma_lambda, S/m
};

/// Liner links: per liner cell and side, sigma_lambda A / eps in series with
/// the half-transmissibility of the bulk cell towards the paired face.
CouplingBlock assemble_liner(const MixedDimGrid& grid, const LinerProperties& liner,
                             const MaterialField& bulk_material, int bulk_offset, int liner_offset);

struct ProblemOptions {
  Scheme scheme = Scheme::Mpfa;
  bool explicit_mortars = false;
  int threads = 1;
};

/// Everything needed to assemble, solve and post-process one configuration.
struct MixedDimProblem {
  const MixedDimGrid* grid = nullptr;
  MaterialField bulk_material;
  std::optional<LinerProperties> liner;
  std::vector<ElectrodeSpec> electrodes; ///< matches grid->electrodes
  ProblemOptions options;
};

struct AssembledProblem {
  LinearSystem system;
  DiscreteOperator bulk_op;
  std::optional<DiscreteOperator> liner_op;
  std::vector<DiscreteOperator> electrode_ops;
  CouplingBlock liner_block;
  std::vector<CouplingBlock> electrode_blocks;
  std::vector<VecX> electrode_top_inflow; ///< per electrode, prescribed outflow q per 1D face
  std::vector<std::string> warnings;
};

/// Assembles the mixed-dimensional system. Mortar unknowns are eliminated
/// unless options.explicit_mortars is set. Throws AssemblyMismatch when the
/// grid and problem description disagree.
AssembledProblem assemble_global(const MixedDimProblem& problem);

} // namespace mdres
