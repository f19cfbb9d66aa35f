#pragma once

#include "mdres/sweeps.hpp"

#include <filesystem>
#include <iosfwd>

namespace mdres {

/// Fixed float formatting used by every CSV output (%.12e).
std::string csv_number(double v);

/// Comma-separated table with a header row and LF line endings.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  [[nodiscard]] std::size_t rows() const { return rows_.size(); }

  void write(std::ostream& out) const;
  /// Throws IoError when the file cannot be written.
  void save(const std::filesystem::path& path) const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// One row per sweep solve with every resolved parameter, rho_a, the
/// balance report and the penetration-depth metadata.
CsvTable sweep_table(const std::vector<SweepRow>& rows);
CsvTable histogram_table(const Histogram& h);
/// Summary of a single run of `spec`.
CsvTable summary_table(const ScenarioSpec& spec, const ScenarioResult& result);
/// Columns h, rho_a of the layer-over-insulator formula.
CsvTable analytic_table(double rho, double a, const std::vector<double>& depths);

struct VtkScalarField {
  std::string name;
  VecX values;
};

struct VtkVectorField {
  std::string name;
  std::vector<Vec3> values;
};

/// Legacy ASCII VTK (version 3.0) unstructured grid with cell data.
void write_vtk(const SubdomainMesh& mesh, const std::vector<VtkScalarField>& scalars,
               const std::vector<VtkVectorField>& vectors, std::ostream& out, const std::string& title = "mdres");
void write_vtk(const SubdomainMesh& mesh, const std::vector<VtkScalarField>& scalars,
               const std::vector<VtkVectorField>& vectors, const std::filesystem::path& path);

/// Potential and current density of every subdomain: bulk.vtk, liner.vtk
/// and electrode_<name>.vtk in `dir`. Returns the files written.
std::vector<std::filesystem::path> write_solution_vtk(const std::filesystem::path& dir, const MixedDimGrid& grid,
                                                      const Solution& solution,
                                                      const std::vector<std::string>& electrode_names);

} // namespace mdres
