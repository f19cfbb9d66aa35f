#include "mdres/solver.hpp"

#include "mdres/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/UmfPackSupport>

#include <cstdio>
#include <mutex>

namespace mdres {

namespace {

using Triplet = Eigen::Triplet<double>;
constexpr int kDirectLimit = 2000000;
constexpr int kRefinementSteps = 3;

/// METIS draws from a process-wide random state, so concurrent orderings
/// would make results depend on thread interleaving.
std::mutex& ordering_mutex()
{
  static std::mutex m;
  return m;
}

/// Factorizes a square matrix once and solves repeatedly.
class Factorization {
public:
  Factorization(const SpMat& a, bool force_iterative) : a_(a)
  {
    if (!force_iterative && a.rows() < kDirectLimit) {
      // nested-dissection ordering with the symmetric strategy gives the
      // least fill on these structurally symmetric 3D stencils
      lu_.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
      lu_.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
      factorize(a);
      if (lu_.info() != Eigen::Success) {
        lu_.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_AUTO;
        lu_.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_AMD;
        factorize(a);
      }
      if (lu_.info() == Eigen::Success) {
        method_ = "umfpack";
        return;
      }
    }
    krylov_.setTolerance(1e-12);
    krylov_.setMaxIterations(std::max<int>(1000, 10 * static_cast<int>(a.rows())));
    krylov_.compute(a);
    method_ = "bicgstab";
  }

  VecX solve(const VecX& b)
  {
    if (method_ == "umfpack") {
      return lu_.solve(b);
    }
    return krylov_.solve(b);
  }

  [[nodiscard]] const std::string& method() const { return method_; }

private:
  void factorize(const SpMat& a)
  {
    {
      const std::lock_guard<std::mutex> lock(ordering_mutex());
      lu_.analyzePattern(a);
    }
    if (lu_.info() == Eigen::Success) {
      lu_.factorize(a);
    }
  }

  const SpMat& a_;
  Eigen::UmfPackLU<SpMat> lu_;
  Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> krylov_;
  std::string method_;
};

/// b - A x with the products accumulated in extended precision.
VecX extended_residual(const SpMat& a, const VecX& x, const VecX& b)
{
  std::vector<long double> r(b.data(), b.data() + b.size());
  for (int k = 0; k < a.outerSize(); ++k) {
    const long double xk = x[k];
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      r[it.row()] -= static_cast<long double>(it.value()) * xk;
    }
  }
  VecX out(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    out[i] = static_cast<double>(r[i]);
  }
  return out;
}

/// Iterative refinement on residuals accumulated in extended precision.
VecX refine(const SpMat& a, const VecX& b, VecX x, Factorization& fac, int& steps)
{
  for (int step = 0; step < kRefinementSteps; ++step) {
    const VecX r = extended_residual(a, x, b);
    if (r.lpNorm<Eigen::Infinity>() == 0.0) {
      break;
    }
    const VecX dx = fac.solve(r);
    x += dx;
    ++steps;
    if (dx.lpNorm<Eigen::Infinity>() <= 1e-15 * x.lpNorm<Eigen::Infinity>()) {
      break;
    }
  }
  return x;
}

SpMat pinned_matrix(const SpMat& a, int pin)
{
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros()) + 1);
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      if (it.row() != pin) {
        t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      }
    }
  }
  t.emplace_back(pin, pin, 1.0);
  SpMat p(a.rows(), a.cols());
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

SpMat bordered_matrix(const SpMat& a, const VecX& w)
{
  const int n = static_cast<int>(a.rows());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros()) + 2 * static_cast<std::size_t>(w.size()));
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  const double scale = w.sum() > 0.0 ? 1.0 / w.sum() : 1.0;
  for (int i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) {
      t.emplace_back(n, i, w[i] * scale);
      t.emplace_back(i, n, w[i] * scale);
    }
  }
  SpMat b(n + 1, n + 1);
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

} // namespace

const char* gauge_name(GaugeMode g) { return g == GaugeMode::Pin ? "pin" : "null-average"; }

GaugeMode parse_gauge(const std::string& name)
{
  if (name == "pin") {
    return GaugeMode::Pin;
  }
  if (name == "null-average") {
    return GaugeMode::NullAverage;
  }
  throw ConfigError("unknown gauge '" + name + "' (expected pin or null-average)");
}

VecX solve_gauged(const LinearSystem& sys, const SolveOptions& opt, SolveReport* report)
{
  const SpMat& a = sys.matrix;
  const VecX& b = sys.rhs;
  const int n = static_cast<int>(a.rows());
  if (a.rows() != a.cols() || b.size() != n || sys.measures.size() > n) {
    throw AssemblyMismatch("linear system dimensions are inconsistent");
  }
  const double b1 = b.lpNorm<1>();
  if (std::abs(b.sum()) > 1e-12 * b1) {
    throw IncompatibleSource("right-hand side sums to " + std::to_string(b.sum()) +
                             " A; injected currents must balance");
  }
  VecX w = VecX::Zero(n);
  w.head(sys.measures.size()) = sys.measures;
  const double wsum = w.sum();
  auto apply_gauge = [&](VecX& x) {
    if (wsum > 0.0) {
      const double mean = w.dot(x) / wsum;
      x.head(sys.measures.size()).array() -= mean;
    }
  };

  SolveReport rep;
  if (b1 == 0.0) {
    rep.method = "trivial";
    if (report != nullptr) {
      *report = rep;
    }
    return VecX::Zero(n);
  }

  VecX x;
  if (opt.gauge == GaugeMode::Pin) {
    if (opt.pin_dof < 0 || opt.pin_dof >= static_cast<int>(sys.measures.size())) {
      throw SolveFailure("pinned unknown is not a potential", 0.0);
    }
    const SpMat p = pinned_matrix(a, opt.pin_dof);
    Factorization fac(p, opt.force_iterative);
    rep.method = fac.method();
    VecX rhs = b;
    rhs[opt.pin_dof] = 0.0;
    x = refine(p, rhs, fac.solve(rhs), fac, rep.refinement_steps);
    // the shift is exact only for exactly zero row sums; re-solving with
    // the pinned value moved to its shifted position restores the residual
    apply_gauge(x);
    rhs[opt.pin_dof] = x[opt.pin_dof];
    x = refine(p, rhs, x, fac, rep.refinement_steps);
    apply_gauge(x);
  } else {
    const SpMat bb = bordered_matrix(a, w);
    Factorization fac(bb, opt.force_iterative);
    rep.method = fac.method();
    VecX rhs = VecX::Zero(n + 1);
    rhs.head(n) = b;
    const VecX y = refine(bb, rhs, fac.solve(rhs), fac, rep.refinement_steps);
    x = y.head(n);
    apply_gauge(x);
  }
  const VecX r = extended_residual(a, x, b);
  rep.relative_residual = r.norm() / b.norm();
  double a_inf = 0.0;
  {
    VecX row_abs = VecX::Zero(n);
    for (int k = 0; k < a.outerSize(); ++k) {
      for (SpMat::InnerIterator it(a, k); it; ++it) {
        row_abs[it.row()] += std::abs(it.value());
      }
    }
    a_inf = row_abs.maxCoeff();
  }
  rep.backward_error =
      r.lpNorm<Eigen::Infinity>() / (a_inf * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>());
  if (report != nullptr) {
    *report = rep;
  }
  if (!x.allFinite() || !(rep.backward_error <= opt.residual_tol)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "backward error %.3e (relative residual %.3e)", rep.backward_error,
                  rep.relative_residual);
    throw SolveFailure("linear solve (" + rep.method + ") reached " + buf, rep.relative_residual);
  }
  return x;
}

Solution make_solution(const AssembledProblem& pb, const VecX& x)
{
  const DofLayout& lay = pb.system.layout;
  if (x.size() != lay.total()) {
    throw AssemblyMismatch("solution vector does not match the dof layout");
  }
  Solution s;
  s.x = x;
  s.bulk_phi = x.head(lay.bulk);
  s.liner_phi = x.segment(lay.liner_offset(), lay.liner);
  for (std::size_t i = 0; i < lay.electrode_offsets.size(); ++i) {
    s.electrode_phi.push_back(x.segment(lay.electrode_offsets[i], lay.electrode_sizes[i]));
  }
  auto current = [&](const MortarLink& l) { return l.conductance * (x[l.bulk_dof] - x[l.lower_dof]); };

  VecX q = VecX::Zero(pb.bulk_op.flux.rows());
  for (const auto& l : pb.liner_block.links) {
    const double j = current(l);
    s.liner_exchange.push_back(j);
    q[l.bulk_face] += j;
  }
  s.bulk_face_flux = pb.bulk_op.face_fluxes(s.bulk_phi, q);
  if (pb.liner_op) {
    s.liner_face_flux = pb.liner_op->face_fluxes(s.liner_phi);
  }
  for (std::size_t i = 0; i < pb.electrode_blocks.size(); ++i) {
    std::vector<double> js;
    for (const auto& l : pb.electrode_blocks[i].links) {
      js.push_back(current(l));
    }
    s.electrode_exchange.push_back(std::move(js));
    s.electrode_face_flux.push_back(pb.electrode_ops[i].face_fluxes(s.electrode_phi[i], pb.electrode_top_inflow[i]));
  }
  return s;
}

Solution solve(const AssembledProblem& pb, const SolveOptions& opt)
{
  SolveReport rep;
  const VecX x = solve_gauged(pb.system, opt, &rep);
  Solution s = make_solution(pb, x);
  s.report = rep;
  return s;
}

BalanceReport check_balance(const AssembledProblem& pb, const Solution& s)
{
  const DofLayout& lay = pb.system.layout;
  BalanceReport rep;
  VecX res = VecX::Zero(lay.potentials());
  VecX exch = VecX::Zero(lay.potentials());
  res.head(lay.bulk) = pb.bulk_op.div * s.bulk_face_flux;
  if (pb.liner_op) {
    res.segment(lay.liner_offset(), lay.liner) = pb.liner_op->div * s.liner_face_flux;
  }
  for (std::size_t i = 0; i < pb.electrode_ops.size(); ++i) {
    res.segment(lay.electrode_offsets[i], lay.electrode_sizes[i]) = pb.electrode_ops[i].div * s.electrode_face_flux[i];
    const VecX& q = pb.electrode_top_inflow[i];
    rep.injected += std::max(0.0, -q.sum());
    rep.net_injection += -q.sum();
  }
  // Liner exchange already sits in the bulk face fluxes (prescribed outflow
  // on split faces); electrode exchange leaves bulk cells directly.
  for (std::size_t k = 0; k < pb.liner_block.links.size(); ++k) {
    const auto& l = pb.liner_block.links[k];
    const double j = s.liner_exchange[k];
    res[l.lower_dof] -= j;
    exch[l.lower_dof] -= j;
    exch[l.bulk_dof] += j;
  }
  for (std::size_t i = 0; i < pb.electrode_blocks.size(); ++i) {
    for (std::size_t k = 0; k < pb.electrode_blocks[i].links.size(); ++k) {
      const auto& l = pb.electrode_blocks[i].links[k];
      const double j = s.electrode_exchange[i][k];
      res[l.bulk_dof] += j;
      res[l.lower_dof] -= j;
      exch[l.bulk_dof] += j;
      exch[l.lower_dof] -= j;
    }
  }
  rep.cell_residuals = res;
  rep.max_residual = res.size() > 0 ? res.cwiseAbs().maxCoeff() : 0.0;
  rep.exchange_sum = exch.sum();
  return rep;
}

} // namespace mdres
