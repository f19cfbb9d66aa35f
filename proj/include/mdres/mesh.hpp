#pragma once

#include "mdres/common.hpp"

#include <span>
#include <string>
#include <vector>

namespace mdres {

/// Boundary tags assigned by the box mesher. Faces created by splitting the
/// bulk along a liner carry kLinerTag.
namespace tags {
inline constexpr int kNone = 0;
inline constexpr int kXMin = 1;
inline constexpr int kXMax = 2;
inline constexpr int kYMin = 3;
inline constexpr int kYMax = 4;
inline constexpr int kZMin = 5;
inline constexpr int kZMax = 6;
inline constexpr int kLiner = 100;
// electrode (1D) end points
inline constexpr int kElectrodeTop = 1;
inline constexpr int kElectrodeTip = 2;
} // namespace tags

/**
 * @brief Simplicial mesh of dimension 1, 2 or 3 embedded in R^3.
 *
 * Connectivity is stored flat with a fixed stride: cell c owns
 * cell_nodes[c*(dim+1) .. c*(dim+1)+dim]. Local face i of a cell is the face
 * opposite local node i. Every face has an owner (face_cells[f][0]); the
 * stored face normal points out of the owner. Folded 2D meshes (a liner made
 * of several panels) have faces whose outward normal differs between the two
 * incident cells, so per-cell outward normals are kept in cell_face_normals.
 */
struct SubdomainMesh {
  int dim = 3;
  std::vector<Vec3> nodes;
  std::vector<int> cell_nodes;
  std::vector<int> cell_tags;

  std::vector<int> face_nodes;                // stride dim, ascending
  std::vector<int> cell_faces;                // stride dim+1
  std::vector<std::array<int, 2>> face_cells; // owner, neighbour (-1 on the boundary)
  std::vector<int> face_tags;

  std::vector<double> cell_volumes;
  std::vector<Vec3> cell_centers;
  std::vector<double> cell_diameters;
  std::vector<double> face_areas;
  std::vector<Vec3> face_centers;
  std::vector<Vec3> face_normals;
  std::vector<Vec3> cell_face_normals; // stride dim+1, outward unit normals

  [[nodiscard]] int nodes_per_cell() const { return dim + 1; }
  [[nodiscard]] int num_nodes() const { return static_cast<int>(nodes.size()); }
  [[nodiscard]] int num_cells() const { return static_cast<int>(cell_nodes.size()) / (dim + 1); }
  [[nodiscard]] int num_faces() const { return static_cast<int>(face_cells.size()); }

  [[nodiscard]] std::span<const int> cell(int c) const
  {
    return {cell_nodes.data() + static_cast<std::ptrdiff_t>(c) * (dim + 1), static_cast<std::size_t>(dim + 1)};
  }
  [[nodiscard]] std::span<const int> faces_of(int c) const
  {
    return {cell_faces.data() + static_cast<std::ptrdiff_t>(c) * (dim + 1), static_cast<std::size_t>(dim + 1)};
  }
  [[nodiscard]] std::span<const int> face(int f) const
  {
    return {face_nodes.data() + static_cast<std::ptrdiff_t>(f) * dim, static_cast<std::size_t>(dim)};
  }
  [[nodiscard]] const Vec3& outward_normal(int c, int local_face) const
  {
    return cell_face_normals[static_cast<std::size_t>(c) * (dim + 1) + local_face];
  }
  [[nodiscard]] bool is_boundary(int f) const { return face_cells[f][1] < 0; }

  /// +1 if c owns face f (stored normal points out of c), -1 otherwise.
  [[nodiscard]] int face_sign(int c, int f) const { return face_cells[f][0] == c ? 1 : -1; }

  [[nodiscard]] Box bounding_box() const;
  [[nodiscard]] Box cell_box(int c) const;
  [[nodiscard]] double total_volume() const;
};

/// Builds a mesh from nodes and simplices: faces, incidence and geometry.
SubdomainMesh make_mesh(int dim, std::vector<Vec3> nodes, std::vector<int> cell_nodes,
                        std::vector<int> cell_tags = {});

/// Derives faces, cell-face incidence and face-cell adjacency from cell_nodes.
/// Throws InvalidGeometry on faces shared by more than two cells.
void build_connectivity(SubdomainMesh& mesh);

/// Volumes, centroids, diameters, face areas/centroids and unit normals.
/// Throws DegenerateCell for cells of (numerically) zero measure.
void compute_geometry(SubdomainMesh& mesh);

/// Node -> incident cells, CSR layout.
struct NodeCells {
  std::vector<int> offsets;
  std::vector<int> cells;
  [[nodiscard]] std::span<const int> of(int node) const
  {
    return {cells.data() + offsets[node], static_cast<std::size_t>(offsets[node + 1] - offsets[node])};
  }
};
NodeCells node_cells(const SubdomainMesh& mesh);

struct MeshInvariantReport {
  bool ok = true;
  double max_closure_error = 0.0; ///< max over cells of |sum A n| / sum A
  double min_volume = 0.0;
  double total_volume = 0.0;
  std::vector<std::string> problems;
};

/// Checks incidence counts, positive volumes and the discrete divergence
/// theorem (closure) on every cell.
MeshInvariantReport check_invariants(const SubdomainMesh& mesh, double closure_tol = 1e-12);

/// Number of face-connected components of the cell graph.
int connected_components(const SubdomainMesh& mesh, std::vector<int>* labels = nullptr);

} // namespace mdres
