#include "mdres/coupling.hpp"

#include "mdres/errors.hpp"

#include <numbers>

namespace mdres {

namespace {

using Triplet = Eigen::Triplet<double>;

void append_block(std::vector<Triplet>& t, const SpMat& a, int offset)
{
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      t.emplace_back(offset + static_cast<int>(it.row()), offset + static_cast<int>(it.col()), it.value());
    }
  }
}

} // namespace

double ElectrodeSpec::length() const
{
  double l = 0.0;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    l += (polyline[i + 1] - polyline[i]).norm();
  }
  return l;
}

void ElectrodeSpec::validate() const
{
  if (polyline.size() < 2 || !(length() > 0.0)) {
    throw InvalidGeometry("electrode " + name + " needs a polyline of positive length");
  }
  if (!(radius > 0.0)) {
    throw InvalidGeometry("electrode " + name + " radius must be positive");
  }
  if (!(sigma > 0.0)) {
    throw InvalidGeometry("electrode " + name + " conductivity must be positive");
  }
  if (!(skin >= 0.0)) {
    throw InvalidGeometry("electrode " + name + " skin factor must be non-negative");
  }
  if (!(exchange_scale > 0.0)) {
    throw InvalidGeometry("electrode " + name + " exchange scale must be positive");
  }
}

double peaceman_conductance(double sigma_bulk, double radius, double h_cell, double skin)
{
  const double denom = std::log(0.2 * h_cell / radius) + skin;
  if (!(denom > 0.0)) {
    throw NonpositiveDenominator("Peaceman denominator ln(0.2 h / r) + S = " + std::to_string(denom) +
                                 " is not positive (h = " + std::to_string(h_cell) +
                                 " m, r = " + std::to_string(radius) + " m); coarsen the mesh near the "
                                 "electrode or raise the skin factor");
  }
  return 2.0 * std::numbers::pi * sigma_bulk / denom;
}

CouplingBlock assemble_electrode(const ElectrodeSegmentMap& map, const ElectrodeSpec& spec, const SubdomainMesh& bulk,
                                 const MaterialField& bulk_material, int bulk_offset, int electrode_offset)
{
  if (map.entries.empty()) {
    throw UnmappedElectrode("electrode " + spec.name + " has an empty segment map", spec.length());
  }
  CouplingBlock block;
  for (const auto& e : map.entries) {
    const double sg =
        peaceman_conductance(bulk_material.sigma[e.bulk_cell], spec.radius, bulk.cell_diameters[e.bulk_cell], spec.skin);
    block.links.push_back({electrode_offset + e.electrode_cell, bulk_offset + e.bulk_cell,
                           sg * e.length * spec.exchange_scale, -1, 0});
  }
  return block;
}

CouplingBlock assemble_liner(const MixedDimGrid& grid, const LinerProperties& liner, const MaterialField& bulk_material,
                             int bulk_offset, int liner_offset)
{
  CouplingBlock block;
  if (!grid.has_liner()) {
    return block;
  }
  const SubdomainMesh& bulk = grid.bulk;
  const SubdomainMesh& lm = *grid.liner;
  for (int side = 0; side < 2; ++side) {
    if (grid.liner_sides[side].size() != static_cast<std::size_t>(lm.num_cells())) {
      throw BrokenMortar(-1);
    }
    for (const auto& e : grid.liner_sides[side]) {
      const int f = e.bulk_face;
      if (f < 0 || f >= bulk.num_faces() || !bulk.is_boundary(f) || bulk.face_cells[f][0] != e.bulk_cell) {
        throw BrokenMortar(f);
      }
      int local = -1;
      const auto cf = bulk.faces_of(e.bulk_cell);
      for (int i = 0; i < 4; ++i) {
        if (cf[i] == f) {
          local = i;
        }
      }
      if (local < 0) {
        throw BrokenMortar(f);
      }
      const double alpha = half_transmissibility(bulk, e.bulk_cell, local, bulk_material.sigma[e.bulk_cell]);
      const double c = liner.sigma * lm.cell_volumes[e.liner_cell] / liner.thickness;
      const double g = alpha > 0.0 ? alpha * c / (alpha + c) : c;
      block.links.push_back({liner_offset + e.liner_cell, bulk_offset + e.bulk_cell, g, f, side});
    }
  }
  return block;
}

AssembledProblem assemble_global(const MixedDimProblem& pb)
{
  if (pb.grid == nullptr) {
    throw AssemblyMismatch("problem has no grid");
  }
  const MixedDimGrid& grid = *pb.grid;
  if (pb.electrodes.size() != grid.electrodes.size() || grid.electrode_maps.size() != grid.electrodes.size()) {
    throw AssemblyMismatch("electrode descriptions do not match the grid's electrode subdomains");
  }
  if (grid.has_liner() && !pb.liner) {
    throw AssemblyMismatch("grid has a liner but no liner properties were given");
  }
  if (static_cast<int>(pb.bulk_material.sigma.size()) != grid.bulk.num_cells()) {
    throw AssemblyMismatch("bulk material size does not match the bulk mesh");
  }
  const AssemblyOptions aopt{pb.options.threads};
  AssembledProblem out;
  out.bulk_op = assemble(pb.options.scheme, grid.bulk, pb.bulk_material, aopt);
  for (int f : out.bulk_op.ill_conditioned_faces) {
    out.warnings.push_back("IllConditionedFace: bulk face " + std::to_string(f));
  }

  DofLayout& lay = out.system.layout;
  lay.bulk = grid.bulk.num_cells();
  const bool liner = grid.has_liner() && pb.liner.has_value();
  lay.liner = liner ? grid.liner->num_cells() : 0;
  int offset = lay.bulk + lay.liner;
  for (const auto& e : grid.electrodes) {
    lay.electrode_offsets.push_back(offset);
    lay.electrode_sizes.push_back(e.num_cells());
    offset += e.num_cells();
  }

  std::vector<Triplet> t;
  append_block(t, out.bulk_op.cell_matrix(), 0);
  if (liner) {
    const auto mat = MaterialField::uniform(*grid.liner, pb.liner->thickness * pb.liner->sigma);
    out.liner_op = assemble(pb.options.scheme, *grid.liner, mat, aopt);
    append_block(t, out.liner_op->cell_matrix(), lay.liner_offset());
    out.liner_block = assemble_liner(grid, *pb.liner, pb.bulk_material, 0, lay.liner_offset());
  }

  VecX rhs = VecX::Zero(offset);
  for (std::size_t i = 0; i < grid.electrodes.size(); ++i) {
    const ElectrodeSpec& spec = pb.electrodes[i];
    spec.validate();
    const SubdomainMesh& em = grid.electrodes[i];
    const double coef = std::numbers::pi * spec.radius * spec.radius * spec.sigma;
    out.electrode_ops.push_back(assemble(pb.options.scheme, em, MaterialField::uniform(em, coef), aopt));
    append_block(t, out.electrode_ops.back().cell_matrix(), lay.electrode_offsets[i]);
    VecX q = VecX::Zero(em.num_faces());
    if (spec.current != 0.0) {
      q = boundary_outflow(em, {{tags::kElectrodeTop, spec.current}});
      rhs.segment(lay.electrode_offsets[i], em.num_cells()) += out.electrode_ops.back().boundary_rhs(q);
    }
    out.electrode_top_inflow.push_back(q);
    out.electrode_blocks.push_back(
        assemble_electrode(grid.electrode_maps[i], spec, grid.bulk, pb.bulk_material, 0, lay.electrode_offsets[i]));
  }

  // Column f of div * bound_flux spreads a boundary outflow on face f over
  // the bulk cell balances (a single unit entry for TPFA).
  SpMat spread;
  if (liner) {
    spread = out.bulk_op.div * out.bulk_op.bound_flux;
  }
  std::vector<const CouplingBlock*> blocks{&out.liner_block};
  for (const auto& b : out.electrode_blocks) {
    blocks.push_back(&b);
  }
  int mortar = offset;
  for (const CouplingBlock* b : blocks) {
    for (const MortarLink& l : b->links) {
      if (!(l.conductance > 0.0) || !std::isfinite(l.conductance)) {
        throw AssemblyMismatch("non-positive mortar conductance");
      }
      auto bulk_terms = [&](auto&& emit) {
        if (l.bulk_face < 0) {
          emit(l.bulk_dof, 1.0);
        } else {
          for (SpMat::InnerIterator it(spread, l.bulk_face); it; ++it) {
            emit(static_cast<int>(it.row()), it.value());
          }
        }
      };
      if (pb.options.explicit_mortars) {
        t.emplace_back(mortar, mortar, 1.0);
        t.emplace_back(mortar, l.bulk_dof, -l.conductance);
        t.emplace_back(mortar, l.lower_dof, l.conductance);
        bulk_terms([&](int r, double v) { t.emplace_back(r, mortar, v); });
        t.emplace_back(l.lower_dof, mortar, -1.0);
        ++mortar;
      } else {
        bulk_terms([&](int r, double v) {
          t.emplace_back(r, l.bulk_dof, v * l.conductance);
          t.emplace_back(r, l.lower_dof, -v * l.conductance);
        });
        t.emplace_back(l.lower_dof, l.bulk_dof, -l.conductance);
        t.emplace_back(l.lower_dof, l.lower_dof, l.conductance);
      }
    }
  }
  lay.mortars = mortar - offset;

  LinearSystem& sys = out.system;
  sys.matrix.resize(lay.total(), lay.total());
  sys.matrix.setFromTriplets(t.begin(), t.end());
  sys.rhs = VecX::Zero(lay.total());
  sys.rhs.head(offset) = rhs;
  sys.measures = VecX::Zero(lay.potentials());
  for (int c = 0; c < lay.bulk; ++c) {
    sys.measures[c] = grid.bulk.cell_volumes[c];
  }
  for (int c = 0; c < lay.liner; ++c) {
    sys.measures[lay.liner_offset() + c] = grid.liner->cell_volumes[c];
  }
  for (std::size_t i = 0; i < grid.electrodes.size(); ++i) {
    for (int c = 0; c < lay.electrode_sizes[i]; ++c) {
      sys.measures[lay.electrode_offsets[i] + c] = grid.electrodes[i].cell_volumes[c];
    }
  }
  return out;
}

} // namespace mdres
