#include "mdres/mixed_grid.hpp"

#include "mdres/errors.hpp"

#include <map>
#include <set>

namespace mdres {

bool Panel::contains(const Vec3& p, double tol) const
{
  const auto ax = in_plane_axes();
  return std::abs(p[axis] - position) <= tol && p[ax[0]] >= lo[0] - tol && p[ax[0]] <= hi[0] + tol &&
         p[ax[1]] >= lo[1] - tol && p[ax[1]] <= hi[1] + tol;
}

void LinerSpec::validate() const
{
  if (!(thickness > 0.0)) {
    throw InvalidGeometry("liner thickness must be positive");
  }
  if (!(sigma > 0.0)) {
    throw InvalidGeometry("liner conductivity must be positive");
  }
  for (const auto& p : panels) {
    if (p.axis < 0 || p.axis > 2) {
      throw InvalidGeometry("liner panel axis must be 0, 1 or 2");
    }
    if (!(p.hi[0] > p.lo[0]) || !(p.hi[1] > p.lo[1])) {
      throw InvalidGeometry("liner panel has an empty rectangle");
    }
  }
  for (const auto& h : holes) {
    if (!(h.radius > 0.0)) {
      throw InvalidGeometry("liner hole radius must be positive");
    }
    const double tol = 1e-9 * std::max(1.0, h.center.norm());
    const bool on_panel =
        std::any_of(panels.begin(), panels.end(), [&](const Panel& p) { return p.contains(h.center, tol); });
    if (!on_panel) {
      throw InvalidGeometry("liner hole centre does not lie on any panel");
    }
  }
}

std::vector<Panel> open_box_panels(const Box& b)
{
  const Vec3& lo = b.min;
  const Vec3& hi = b.max;
  return {
      {2, lo.z(), {lo.x(), lo.y()}, {hi.x(), hi.y()}}, // bottom
      {0, lo.x(), {lo.y(), lo.z()}, {hi.y(), hi.z()}},
      {0, hi.x(), {lo.y(), lo.z()}, {hi.y(), hi.z()}},
      {1, lo.y(), {lo.x(), lo.z()}, {hi.x(), hi.z()}},
      {1, hi.y(), {lo.x(), lo.z()}, {hi.x(), hi.z()}},
  };
}

MixedDimGrid embed_liner(SubdomainMesh bulk, const LinerSpec& spec)
{
  if (bulk.dim != 3) {
    throw InvalidGeometry("the liner is embedded in a 3D mesh");
  }
  spec.validate();
  MixedDimGrid grid;
  const Box bb = bulk.bounding_box();
  const double tol = 1e-9 * bb.extents().norm();

  // A panel must not cut through cells.
  for (std::size_t k = 0; k < spec.panels.size(); ++k) {
    const Panel& p = spec.panels[k];
    const auto ax = p.in_plane_axes();
    for (int c = 0; c < bulk.num_cells(); ++c) {
      const Box cb = bulk.cell_box(c);
      if (!(cb.min[p.axis] < p.position - tol && cb.max[p.axis] > p.position + tol)) {
        continue;
      }
      const bool overlaps = cb.max[ax[0]] > p.lo[0] + tol && cb.min[ax[0]] < p.hi[0] - tol &&
                            cb.max[ax[1]] > p.lo[1] + tol && cb.min[ax[1]] < p.hi[1] - tol;
      if (overlaps) {
        throw NonConformingLiner("liner panel " + std::to_string(k) + " at " + axis_name(p.axis) + " = " +
                                 std::to_string(p.position) + " cuts through cell " + std::to_string(c) +
                                 "; place it on a mesh plane");
      }
    }
  }

  std::map<int, int> selected; // face -> panel
  std::set<int> in_hole;
  std::vector<int> panel_hits(spec.panels.size(), 0);
  for (int f = 0; f < bulk.num_faces(); ++f) {
    if (bulk.is_boundary(f)) {
      continue;
    }
    const auto fn = bulk.face(f);
    for (std::size_t k = 0; k < spec.panels.size(); ++k) {
      const Panel& p = spec.panels[k];
      const bool on_plane = std::all_of(fn.begin(), fn.end(), [&](int n) {
        return std::abs(bulk.nodes[n][p.axis] - p.position) <= tol;
      });
      if (!on_plane || !p.contains(bulk.face_centers[f], tol)) {
        continue;
      }
      const bool hole = std::any_of(spec.holes.begin(), spec.holes.end(), [&](const Hole& h) {
        return (bulk.face_centers[f] - h.center).norm() < h.radius;
      });
      if (hole) {
        in_hole.insert(f);
      } else if (selected.emplace(f, static_cast<int>(k)).second) {
        ++panel_hits[k];
      }
      break;
    }
  }
  for (int f : in_hole) {
    grid.realized_hole_area += bulk.face_areas[f];
  }
  for (std::size_t k = 0; k < spec.panels.size(); ++k) {
    if (panel_hits[k] == 0) {
      grid.warnings.push_back("EmptyLiner: panel " + std::to_string(k) + " selects no mesh face");
    }
  }

  // Split: the original face stays with the low-side cell, a duplicate goes
  // to the high-side cell.
  std::vector<int> liner_cells;
  std::map<int, int> liner_node_index;
  std::vector<Vec3> liner_nodes;
  const int stride = bulk.dim;
  for (const auto& [f, k] : selected) {
    const int axis = spec.panels[k].axis;
    auto [c0, c1] = bulk.face_cells[f];
    if (bulk.cell_centers[c0][axis] > bulk.cell_centers[c1][axis]) {
      std::swap(c0, c1);
    }
    const int nf = bulk.num_faces();
    for (int i = 0; i < stride; ++i) {
      bulk.face_nodes.push_back(bulk.face_nodes[static_cast<std::size_t>(f) * stride + i]);
    }
    bulk.face_cells[f] = {c0, -1};
    bulk.face_cells.push_back({c1, -1});
    bulk.face_tags[f] = tags::kLiner;
    bulk.face_tags.push_back(tags::kLiner);
    bulk.face_areas.push_back(bulk.face_areas[f]);
    bulk.face_centers.push_back(bulk.face_centers[f]);
    Vec3 n = Vec3::Zero();
    n[axis] = 1.0;
    bulk.face_normals[f] = n;
    bulk.face_normals.push_back(-n);
    for (int i = 0; i <= bulk.dim; ++i) {
      int& cf = bulk.cell_faces[static_cast<std::size_t>(c1) * (bulk.dim + 1) + i];
      if (cf == f) {
        cf = nf;
      }
    }
    const int lc = static_cast<int>(grid.liner_cell_panel.size());
    grid.liner_cell_panel.push_back(k);
    grid.liner_sides[0].push_back({lc, f, c0});
    grid.liner_sides[1].push_back({lc, nf, c1});
    for (int n0 : bulk.face(f)) {
      const auto [it, fresh] = liner_node_index.emplace(n0, static_cast<int>(liner_nodes.size()));
      if (fresh) {
        liner_nodes.push_back(bulk.nodes[n0]);
      }
      liner_cells.push_back(it->second);
    }
  }
  if (!liner_cells.empty()) {
    try {
      grid.liner = make_mesh(2, std::move(liner_nodes), std::move(liner_cells), grid.liner_cell_panel);
    } catch (const InvalidGeometry& e) {
      throw InvalidGeometry(std::string("liner surface is not a manifold: ") + e.what());
    }
    grid.liner_area = grid.liner->total_volume();
  }
  grid.bulk = std::move(bulk);
  return grid;
}

void add_electrode(MixedDimGrid& grid, const std::vector<Vec3>& polyline, const Adt& adt)
{
  grid.electrode_maps.push_back(map_electrode(polyline, grid.bulk, adt));
  grid.electrodes.push_back(electrode_mesh(polyline));
}

} // namespace mdres
