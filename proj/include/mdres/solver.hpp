#pragma once

#include "mdres/coupling.hpp"

namespace mdres {

enum class GaugeMode { Pin, NullAverage };

const char* gauge_name(GaugeMode g);
GaugeMode parse_gauge(const std::string& name);

struct SolveOptions {
  GaugeMode gauge = GaugeMode::Pin;
  int pin_dof = 0;
  /// Normwise backward error ||b - Ax||_inf / (||A||_inf ||x||_inf + ||b||_inf)
  /// above which the solve counts as failed.
  double residual_tol = 1e-10;
  /// Use the Krylov fallback even below the direct-solver size limit.
  bool force_iterative = false;
};

struct SolveReport {
  std::string method;
  double relative_residual = 0.0; ///< ||b - Ax||_2 / ||b||_2
  double backward_error = 0.0;
  int refinement_steps = 0;
};

/**
 * Solves the pure-Neumann system with a gauge. Pin mode replaces one row by
 * the identity and shifts the result to zero measure-weighted mean; the
 * null-average mode solves the system bordered by that mean constraint.
 * Throws IncompatibleSource when the rhs does not sum to zero and
 * SolveFailure when the residual cannot be brought below the tolerance.
 */
VecX solve_gauged(const LinearSystem& system, const SolveOptions& options, SolveReport* report = nullptr);

struct Solution {
  VecX x; ///< all unknowns in layout order
  VecX bulk_phi;
  VecX liner_phi;
  std::vector<VecX> electrode_phi;
  std::vector<double> liner_exchange;                 ///< j per liner link, A (bulk to liner)
  std::vector<std::vector<double>> electrode_exchange; ///< j per segment link, A (bulk to electrode)
  VecX bulk_face_flux;
  VecX liner_face_flux;
  std::vector<VecX> electrode_face_flux;
  SolveReport report;
};

/// Splits the raw unknown vector into subdomain fields and reconstructs
/// exchange currents and face fluxes.
Solution make_solution(const AssembledProblem& problem, const VecX& x);

Solution solve(const AssembledProblem& problem, const SolveOptions& options = {});

struct BalanceReport {
  VecX cell_residuals;      ///< per potential unknown, A
  double max_residual = 0.0;
  double injected = 0.0;    ///< sum of positive injections, A
  double net_injection = 0.0;
  double exchange_sum = 0.0; ///< sum of all exchange terms over all balances
  [[nodiscard]] bool ok(double rel_tol = 1e-10) const
  {
    const double scale = injected > 0.0 ? injected : 1.0;
    return max_residual <= rel_tol * scale && std::abs(exchange_sum) <= rel_tol * scale;
  }
};

BalanceReport check_balance(const AssembledProblem& problem, const Solution& solution);

} // namespace mdres
