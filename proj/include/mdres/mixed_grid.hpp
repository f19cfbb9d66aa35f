#pragma once

#include "mdres/electrode_map.hpp"
#include "mdres/mesh.hpp"

#include <optional>

namespace mdres {

/// Axis-aligned rectangle lying in the plane x_axis = position. The in-plane
/// bounds refer to the two remaining axes in increasing order.
struct Panel {
  int axis = 2;
  double position = 0.0;
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};

  [[nodiscard]] std::array<int, 2> in_plane_axes() const { return {axis == 0 ? 1 : 0, axis == 2 ? 1 : 2}; }
  [[nodiscard]] bool contains(const Vec3& p, double tol) const;
  [[nodiscard]] double area() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]); }
};

struct Hole {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct LinerSpec {
  std::vector<Panel> panels;
  std::vector<Hole> holes;
  double thickness = 1e-3; ///< epsilon, m
  double sigma = 1e-9;     ///< normal conductivity, S/m

  /// Throws InvalidGeometry when thickness/conductivity are not positive,
  /// a panel is empty, or a hole centre lies on no panel.
  void validate() const;
};

/// The five panels (bottom and four walls) of an open-top box.
std::vector<Panel> open_box_panels(const Box& box);

/// One side of the liner mortar: liner cell paired with a bulk face and the
/// bulk cell behind it.
struct LinerMortarEntry {
  int liner_cell = 0;
  int bulk_face = 0;
  int bulk_cell = 0;
};

/**
 * @brief Bulk mesh split along the liner, the liner surface mesh, electrode
 * line meshes and the maps joining them.
 *
 * liner_sides[0] holds the bulk cells on the low-coordinate side of each
 * panel, liner_sides[1] those on the high side; entry i of both refers to
 * liner cell i.
 */
struct MixedDimGrid {
  SubdomainMesh bulk;
  std::optional<SubdomainMesh> liner;
  std::array<std::vector<LinerMortarEntry>, 2> liner_sides;
  std::vector<int> liner_cell_panel;
  double realized_hole_area = 0.0; ///< area of panel faces removed by holes
  double liner_area = 0.0;

  std::vector<SubdomainMesh> electrodes;
  std::vector<ElectrodeSegmentMap> electrode_maps;

  std::vector<std::string> warnings;

  [[nodiscard]] bool has_liner() const { return liner.has_value() && liner->num_cells() > 0; }
};

/**
 * Splits the bulk mesh along the liner panels. Interior faces on a panel
 * plane, inside its rectangle and outside every hole (face centre farther than
 * the radius from the hole centre) are duplicated so the cells on either side
 * no longer share them; each such face becomes one liner cell. Throws
 * NonConformingLiner when a panel cuts through bulk cells. A panel that
 * selects no face is reported in `warnings` (EmptyLiner).
 */
MixedDimGrid embed_liner(SubdomainMesh bulk, const LinerSpec& liner);

/// Adds an electrode polyline: builds its 1D mesh and its segment map.
void add_electrode(MixedDimGrid& grid, const std::vector<Vec3>& polyline, const Adt& adt);

} // namespace mdres
