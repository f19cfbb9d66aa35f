#pragma once

#include "mdres/mesh.hpp"

#include <filesystem>
#include <iosfwd>

namespace mdres {

/**
 * Reads the ASCII MSH 4.1 subset: $MeshFormat, $Nodes, $Elements, plus the
 * optional $PhysicalNames and $Entities sections used to resolve physical
 * tags. Element types 1 (line), 2 (triangle) and 4 (tetrahedron) only. The
 * highest element dimension present becomes the mesh dimension; elements one
 * dimension lower tag the matching faces. Errors carry the offending line.
 */
SubdomainMesh load_msh(const std::filesystem::path& path);
SubdomainMesh read_msh(std::istream& in);

/// Writes cells grouped by cell tag and tagged boundary faces grouped by tag.
void write_msh(const SubdomainMesh& mesh, const std::filesystem::path& path);
void write_msh(const SubdomainMesh& mesh, std::ostream& out);

} // namespace mdres
