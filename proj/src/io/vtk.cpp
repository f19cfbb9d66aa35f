#include "mdres/errors.hpp"
#include "mdres/io.hpp"

#include <cstdio>
#include <fstream>

namespace mdres {

namespace {

int vtk_cell_type(int dim)
{
  switch (dim) {
  case 1:
    return 3; // VTK_LINE
  case 2:
    return 5; // VTK_TRIANGLE
  default:
    return 10; // VTK_TETRA
  }
}

std::string num(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string field_name(std::string name)
{
  for (char& c : name) {
    if (c == ' ' || c == '\t') {
      c = '_';
    }
  }
  return name;
}

} // namespace

void write_vtk(const SubdomainMesh& mesh, const std::vector<VtkScalarField>& scalars,
               const std::vector<VtkVectorField>& vectors, std::ostream& out, const std::string& title)
{
  const int nc = mesh.num_cells();
  for (const auto& f : scalars) {
    if (f.values.size() != nc) {
      throw Error("VTK scalar field " + f.name + " does not match the cell count");
    }
  }
  for (const auto& f : vectors) {
    if (static_cast<int>(f.values.size()) != nc) {
      throw Error("VTK vector field " + f.name + " does not match the cell count");
    }
  }
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto& p : mesh.nodes) {
    out << num(p.x()) << ' ' << num(p.y()) << ' ' << num(p.z()) << '\n';
  }
  const int per = mesh.dim + 1;
  out << "CELLS " << nc << ' ' << nc * (per + 1) << '\n';
  for (int c = 0; c < nc; ++c) {
    out << per;
    for (int n : mesh.cell(c)) {
      out << ' ' << n;
    }
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  const int type = vtk_cell_type(mesh.dim);
  for (int c = 0; c < nc; ++c) {
    out << type << '\n';
  }
  if (scalars.empty() && vectors.empty()) {
    return;
  }
  out << "CELL_DATA " << nc << '\n';
  for (const auto& f : scalars) {
    out << "SCALARS " << field_name(f.name) << " double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < nc; ++c) {
      out << num(f.values[c]) << '\n';
    }
  }
  for (const auto& f : vectors) {
    out << "VECTORS " << field_name(f.name) << " double\n";
    for (const auto& v : f.values) {
      out << num(v.x()) << ' ' << num(v.y()) << ' ' << num(v.z()) << '\n';
    }
  }
}

void write_vtk(const SubdomainMesh& mesh, const std::vector<VtkScalarField>& scalars,
               const std::vector<VtkVectorField>& vectors, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  write_vtk(mesh, scalars, vectors, out, path.stem().string());
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

std::vector<std::filesystem::path> write_solution_vtk(const std::filesystem::path& dir, const MixedDimGrid& grid,
                                                      const Solution& sol,
                                                      const std::vector<std::string>& electrode_names)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  auto emit = [&](const SubdomainMesh& m, const VecX& phi, const VecX& flux, const std::string& file) {
    const auto path = dir / file;
    write_vtk(m, {{"potential", phi}}, {{"current_density", cell_current_density(m, flux)}}, path);
    written.push_back(path);
  };
  emit(grid.bulk, sol.bulk_phi, sol.bulk_face_flux, "bulk.vtk");
  if (grid.has_liner()) {
    emit(*grid.liner, sol.liner_phi, sol.liner_face_flux, "liner.vtk");
  }
  for (std::size_t i = 0; i < grid.electrodes.size(); ++i) {
    const std::string name = i < electrode_names.size() ? electrode_names[i] : std::to_string(i);
    emit(grid.electrodes[i], sol.electrode_phi[i], sol.electrode_face_flux[i], "electrode_" + name + ".vtk");
  }
  return written;
}

} // namespace mdres
