#pragma once

#include "mdres/mesh.hpp"

#include <optional>

namespace mdres {

/// Box region meshed with a finer lattice. Fine lattice lines sit at
/// anchor + k*cell_size; without an anchor the region's min corner is used.
struct RefinementRegion {
  Box box;
  double cell_size = 0.0;
  std::optional<Vec3> anchor;
};

struct BoxMeshSpec {
  Vec3 origin = Vec3::Zero();
  Vec3 extents = Vec3::Ones();
  double cell_size = 1.0;
  std::vector<RefinementRegion> refinement;
  /// Coordinates that must appear as lattice planes (liner panels, crop levels).
  std::array<std::vector<double>, 3> required_planes;
  /// Growth rate of the target cell size with distance from a refinement
  /// region (size = h_fine + grading * distance, capped at cell_size).
  double grading = 0.5;
};

/// Tensor-product lattice: one sorted coordinate list per axis.
struct BoxLattice {
  std::array<std::vector<double>, 3> axes;

  [[nodiscard]] int cells(int axis) const { return static_cast<int>(axes[axis].size()) - 1; }
  [[nodiscard]] Box bounds() const;
  /// Sub-lattice between two existing lattice planes of one axis.
  [[nodiscard]] BoxLattice cropped(int axis, double lo, double hi) const;
  /// True if `x` coincides with a lattice plane of `axis`.
  [[nodiscard]] bool has_plane(int axis, double x, double tol = 1e-9) const;
};

/// Lattice coordinates along one axis between lo and hi.
std::vector<double> lattice_axis(double lo, double hi, double cell_size,
                                 const std::vector<RefinementRegion>& refinement, int axis,
                                 const std::vector<double>& required, double grading);

BoxLattice build_box_lattice(const BoxMeshSpec& spec);

/// Splits every lattice hexahedron into six tetrahedra sharing the main
/// diagonal (Kuhn split), which is conforming across neighbouring hexes.
/// Boundary faces are tagged by box side (tags::kXMin ... tags::kZMax).
SubdomainMesh build_lattice_mesh(const BoxLattice& lattice);

SubdomainMesh build_box_mesh(const BoxMeshSpec& spec);
SubdomainMesh build_box_mesh(const Vec3& extents, double cell_size,
                             const std::vector<RefinementRegion>& refinement = {});

} // namespace mdres
