#pragma once

#include "mdres/adt.hpp"
#include "mdres/mesh.hpp"

namespace mdres {

/// Parameter interval [t0, t1] of a segment p(t) = a + t (b - a).
struct ClipInterval {
  double t0 = 0.0;
  double t1 = 0.0;
  [[nodiscard]] bool empty() const { return !(t1 > t0); }
};

/// Clips segment a-b against the closed tetrahedron p0..p3.
/// Throws DegenerateCell(-1) for a flat tetrahedron.
ClipInterval tet_segment_interval(const std::array<Vec3, 4>& tet, const Vec3& a, const Vec3& b);

/// Length of the part of segment a-b inside the closed tetrahedron.
double tet_segment_clip(const std::array<Vec3, 4>& tet, const Vec3& a, const Vec3& b);

struct SegmentMapEntry {
  int electrode_cell = 0; ///< 1D cell (polyline segment) index
  int bulk_cell = 0;
  double length = 0.0;    ///< m
};

/// Non-matching map between the segments of one electrode and bulk cells.
struct ElectrodeSegmentMap {
  std::vector<SegmentMapEntry> entries; ///< sorted by (electrode_cell, bulk_cell)
  double total_length = 0.0;
  /// Smallest distance from the polyline to an edge of a host cell.
  double min_edge_distance = 0.0;
};

/**
 * Splits each polyline segment at the cell boundaries it crosses and assigns
 * every piece to the lowest-numbered cell containing its midpoint, so the
 * entry lengths partition the in-domain polyline length exactly.
 * Throws UnmappedElectrode when part of the polyline lies outside the mesh.
 */
ElectrodeSegmentMap map_electrode(const std::vector<Vec3>& polyline, const SubdomainMesh& bulk,
                                  const Adt& adt);

/// Bounding boxes of all cells, in cell order (input for adt_build).
std::vector<Box> cell_boxes(const SubdomainMesh& mesh);

/// 1D mesh whose cells are the polyline segments; node 0 is tagged
/// tags::kElectrodeTop and the last node tags::kElectrodeTip.
SubdomainMesh electrode_mesh(const std::vector<Vec3>& polyline);

} // namespace mdres
