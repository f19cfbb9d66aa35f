#pragma once

#include "mdres/scenario.hpp"

#include <cstdint>

namespace mdres {

/// How a liner at depth h below the water surface is represented.
enum class DepthStrategy {
  Interface, ///< horizontal liner panel across the whole footprint
  Truncated  ///< domain cut off at the liner plane, no liner
};

const char* strategy_name(DepthStrategy s);
DepthStrategy parse_strategy(const std::string& name);

/// One solve of a sweep with its fully resolved parameters.
struct SweepRow {
  std::string label;          ///< strategy or sample kind
  double depth = 0.0;         ///< liner depth below the surface (depth sweeps), m
  double water_level = 0.0;   ///< domain top, m
  double resistivity = 0.0;   ///< 1/sigma, Ohm m
  double hole_radius = 0.0;   ///< first hole radius, m (0 without holes)
  double shift_x = 0.0;       ///< array shift, m
  double shift_y = 0.0;
  double spacing = 0.0;       ///< a, m
  double center_x = 0.0;
  double center_y = 0.0;
  Scheme scheme = Scheme::Mpfa;
  ScenarioResult result;
};

/**
 * @brief One solve per depth and strategy on a common lattice.
 *
 * All depth planes are added to the lattice of every run, so interface and
 * truncated runs at one depth share the bulk cells above the liner. Rows
 * are ordered by depth, then strategy, independent of `jobs`.
 */
std::vector<SweepRow> depth_sweep(const ScenarioSpec& base, const std::vector<double>& depths,
                                  const std::vector<DepthStrategy>& strategies, int jobs = 1);

/// Perturbations of the laboratory set-up. Each list holds offsets from the
/// base value; factorial mode takes every combination, sampled mode draws
/// `samples` uniform tuples inside [min, max] of every list.
struct UncertaintySpec {
  enum class Mode { Factorial, Sampled };
  Mode mode = Mode::Factorial;
  std::vector<double> water_level{0.0}; ///< m
  std::vector<double> resistivity{0.0}; ///< Ohm m
  std::vector<double> hole_radius{0.0}; ///< m
  std::vector<double> shift_x{0.0};     ///< m
  std::vector<double> shift_y{0.0};     ///< m
  int samples = 0;
  std::uint64_t seed = 1;
  /// Water level and shifts are rounded to multiples of this step, m.
  double snap = 1e-3;
  int bins = 10;
};

/// Base scenario with one perturbation applied: the water level moves the
/// domain top (liner panels that reached the old surface follow it), the
/// resistivity offset changes 1/sigma, the hole offset changes every hole
/// radius, and shifts move the array.
ScenarioSpec perturbed_scenario(const ScenarioSpec& base, double water_level, double resistivity, double hole_radius,
                                double shift_x, double shift_y);

double snap_to(double value, double step);

/// Parameter tuples in row order (after snapping).
std::vector<std::array<double, 5>> uncertainty_samples(const UncertaintySpec& spec);

std::vector<SweepRow> uncertainty_sweep(const ScenarioSpec& base, const UncertaintySpec& spec, int jobs = 1);

struct Histogram {
  std::vector<double> edges; ///< bins + 1 entries
  std::vector<int> counts;
};

/// Equal-width bins between the minimum and maximum value.
Histogram histogram(const std::vector<double>& values, int bins);

} // namespace mdres
