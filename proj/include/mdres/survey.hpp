#pragma once

#include "mdres/coupling.hpp"
#include "mdres/solver.hpp"

namespace mdres {

struct ElectrodeTemplate {
  double radius = 1e-3;  ///< m
  double length = 5e-3;  ///< m
  double sigma = 1.45e6; ///< S/m
  double skin = 0.0;
  int segments = 1;      ///< 1D cells per electrode
};

/**
 * @brief Wenner-alpha array: C1, P1, P2, C2 at offsets -3a/2, -a/2, a/2, 3a/2
 * from `center` along `axis`, vertical electrodes hanging down from
 * center.z(). With `reciprocal` the roles swap: the inner pair injects and
 * the outer pair measures.
 */
struct SurveyConfig {
  Vec3 center = Vec3::Zero();
  double spacing = 0.03; ///< a, m
  int axis = 0;
  ElectrodeTemplate electrode;
  double current = 0.01; ///< i, A
  bool reciprocal = false;
  /// Multiplies the Peaceman conductance of the measuring pair.
  double measuring_exchange_scale = 1.0;

  [[nodiscard]] std::array<Vec3, 4> top_positions() const;
};

/// Electrodes in C1, P1, P2, C2 order. Throws InvalidSurvey when an
/// electrode leaves `domain` or the configuration is degenerate.
std::array<ElectrodeSpec, 4> build_wenner(const SurveyConfig& config, const Box& domain);

struct ApparentResistivity {
  double value = 0.0;            ///< rho_a, Ohm m
  double delta_phi = 0.0;        ///< V
  double geometric_factor = 0.0; ///< K = 2 pi a, m
};

/// rho_a = 2 pi a dphi / i from the top 1D cells of the measuring pair.
/// `first` is the index of the array's C1 electrode in the solution.
ApparentResistivity apparent_resistivity(const Solution& solution, const SurveyConfig& config, std::size_t first = 0);

/**
 * Apparent resistivity of a Wenner-alpha array on a layer of thickness h over
 * an insulating basement:
 * rho [1 + 4a sum_n (1/sqrt(a^2 + 4n^2h^2) - 1/sqrt(4a^2 + 4n^2h^2))].
 * The sum stops when a term drops below rel_tol times the partial bracket;
 * the remainder is approximated by the midpoint-rule integral of the terms.
 */
double analytic_wenner_insulating(double rho, double a, double h, double rel_tol = 1e-12);

/// Penetration-depth rules of thumb (fractions of the array length L = 3a).
inline constexpr double kPenetrationMedian = 0.11;
inline constexpr double kPenetrationEffective = 0.17;

} // namespace mdres
