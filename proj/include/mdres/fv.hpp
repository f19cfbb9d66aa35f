#pragma once

#include "mdres/mesh.hpp"

#include <Eigen/Sparse>

#include <map>

namespace mdres {

using SpMat = Eigen::SparseMatrix<double>;
using VecX = Eigen::VectorXd;

/// Isotropic per-cell coefficient: bulk conductivity, or the effective
/// coefficients of reduced subdomains (eps*sigma for the liner,
/// pi*r^2*sigma for electrodes).
struct MaterialField {
  std::vector<double> sigma;

  static MaterialField uniform(const SubdomainMesh& mesh, double value)
  {
    return {std::vector<double>(static_cast<std::size_t>(mesh.num_cells()), value)};
  }
  /// Throws InvalidGeometry on a size mismatch or a non-positive entry.
  void validate(const SubdomainMesh& mesh) const;
};

/**
 * @brief Cell-centred flux discretisation on one subdomain.
 *
 * Face fluxes F (A, along face_normals, i.e. out of the owner cell) are
 * F = flux * phi + bound_flux * q, where q holds the prescribed outflow on
 * boundary faces (zero for insulated faces). On boundary faces F = q.
 * The cell balance is div * F = sources, so the cell operator is div * flux.
 */
struct DiscreteOperator {
  SpMat flux;       ///< faces x cells
  SpMat bound_flux; ///< faces x faces
  SpMat div;        ///< cells x faces, +1 owner, -1 neighbour
  std::vector<int> ill_conditioned_faces;

  [[nodiscard]] SpMat cell_matrix() const { return div * flux; }
  [[nodiscard]] VecX face_fluxes(const VecX& phi, const VecX& q) const { return flux * phi + bound_flux * q; }
  [[nodiscard]] VecX face_fluxes(const VecX& phi) const { return flux * phi; }
  /// Right-hand-side contribution of prescribed boundary outflow q.
  [[nodiscard]] VecX boundary_rhs(const VecX& q) const { return -(div * (bound_flux * q)); }
};

enum class Scheme { Tpfa, Mpfa };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct AssemblyOptions {
  int threads = 1;
};

/// Signed face-cell divergence matrix.
SpMat divergence(const SubdomainMesh& mesh);

/// TPFA half-transmissibility sigma_K A (d_K . n_K) / |d_K|^2 of cell K towards
/// its local face.
double half_transmissibility(const SubdomainMesh& mesh, int cell, int local_face, double sigma);

DiscreteOperator tpfa_assemble(const SubdomainMesh& mesh, const MaterialField& material,
                               const AssemblyOptions& opt = {});

/**
 * MPFA-O: one local problem per vertex over the subcells sharing it.
 * Unknowns are the potentials at subface continuity points (subface
 * centroids); equations are flux continuity on interior subfaces and the
 * prescribed flux on boundary subfaces. Throws SingularInteractionRegion.
 */
DiscreteOperator mpfa_o_assemble(const SubdomainMesh& mesh, const MaterialField& material,
                                 const AssemblyOptions& opt = {});

DiscreteOperator assemble(Scheme scheme, const SubdomainMesh& mesh, const MaterialField& material,
                          const AssemblyOptions& opt = {});

/// Prescribed inflow per boundary tag: current density (A/m^2) integrated
/// over the face area; on 1D meshes the face measure is 1, so the value is a
/// current in A.
using BoundaryFluxSpec = std::map<int, double>;

/// Outflow q per face (zero on untagged faces). Throws UnknownBoundaryTag.
VecX boundary_outflow(const SubdomainMesh& mesh, const BoundaryFluxSpec& inflow);

/// Inflow placed directly in the incident cell of each tagged boundary face.
VecX neumann_rhs(const SubdomainMesh& mesh, const BoundaryFluxSpec& inflow);

VecX reconstruct_fluxes(const DiscreteOperator& op, const VecX& phi);
VecX reconstruct_fluxes(const DiscreteOperator& op, const VecX& phi, const VecX& q);

/// Net outflow minus source, per cell.
VecX balance_residual(const DiscreteOperator& op, const VecX& face_flux, const VecX& sources);

/// Cell-averaged current density (1/|K|) sum_f F_f (x_f - x_K) with F_f the
/// outward flux of K; exact for uniform current.
std::vector<Vec3> cell_current_density(const SubdomainMesh& mesh, const VecX& face_flux);

} // namespace mdres
