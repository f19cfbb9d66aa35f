#include "mdres/errors.hpp"
#include "mdres/io.hpp"

#include <cstdio>
#include <fstream>

namespace mdres {

namespace {

std::string integer(long long v) { return std::to_string(v); }

} // namespace

std::string csv_number(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells)
{
  if (cells.size() != header_.size()) {
    throw Error("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& out) const
{
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out << (i == 0 ? "" : ",") << cells[i];
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) {
    line(r);
  }
}

void CsvTable::save(const std::filesystem::path& path) const
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  write(out);
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

CsvTable sweep_table(const std::vector<SweepRow>& rows)
{
  CsvTable t({"index", "label", "scheme", "depth", "water_level", "resistivity", "hole_radius", "shift_x", "shift_y",
              "spacing", "center_x", "center_y", "rho_a", "delta_phi", "geometric_factor", "bulk_cells",
              "liner_cells", "realized_hole_area", "max_cell_residual", "relative_residual", "backward_error", "penetration_median",
              "penetration_effective"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    const double length = 3.0 * r.spacing;
    t.add_row({integer(static_cast<long long>(i)), r.label, scheme_name(r.scheme), csv_number(r.depth),
               csv_number(r.water_level), csv_number(r.resistivity), csv_number(r.hole_radius),
               csv_number(r.shift_x), csv_number(r.shift_y), csv_number(r.spacing), csv_number(r.center_x),
               csv_number(r.center_y), csv_number(r.result.rho.value), csv_number(r.result.rho.delta_phi),
               csv_number(r.result.rho.geometric_factor), integer(r.result.bulk_cells),
               integer(r.result.liner_cells), csv_number(r.result.realized_hole_area),
               csv_number(r.result.balance.max_residual), csv_number(r.result.solve.relative_residual),
               csv_number(r.result.solve.backward_error), csv_number(kPenetrationMedian * length), csv_number(kPenetrationEffective * length)});
  }
  return t;
}

CsvTable histogram_table(const Histogram& h)
{
  CsvTable t({"bin", "lower", "upper", "count"});
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    t.add_row({integer(static_cast<long long>(i)), csv_number(h.edges[i]), csv_number(h.edges[i + 1]),
               integer(h.counts[i])});
  }
  return t;
}

CsvTable summary_table(const ScenarioSpec& spec, const ScenarioResult& r)
{
  CsvTable t({"name", "scheme", "gauge", "water_level", "resistivity", "spacing", "center_x", "center_y", "current",
              "rho_a", "delta_phi", "geometric_factor", "bulk_cells", "liner_cells", "liner_area",
              "realized_hole_area", "min_electrode_edge_distance", "injected", "net_injection", "exchange_sum",
              "max_cell_residual", "relative_residual", "backward_error", "solver"});
  t.add_row({spec.name, scheme_name(spec.scheme), gauge_name(spec.gauge), csv_number(spec.domain.max.z()),
             csv_number(1.0 / spec.sigma), csv_number(spec.survey.spacing), csv_number(spec.survey.center.x()),
             csv_number(spec.survey.center.y()), csv_number(spec.survey.current), csv_number(r.rho.value),
             csv_number(r.rho.delta_phi), csv_number(r.rho.geometric_factor), integer(r.bulk_cells),
             integer(r.liner_cells), csv_number(r.liner_area), csv_number(r.realized_hole_area),
             csv_number(r.min_electrode_edge_distance), csv_number(r.balance.injected),
             csv_number(r.balance.net_injection), csv_number(r.balance.exchange_sum),
             csv_number(r.balance.max_residual), csv_number(r.solve.relative_residual),
             csv_number(r.solve.backward_error), r.solve.method});
  return t;
}

CsvTable analytic_table(double rho, double a, const std::vector<double>& depths)
{
  CsvTable t({"h", "rho_a"});
  for (double h : depths) {
    t.add_row({csv_number(h), csv_number(analytic_wenner_insulating(rho, a, h))});
  }
  return t;
}

} // namespace mdres
