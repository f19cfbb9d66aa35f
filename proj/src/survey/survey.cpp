#include "mdres/survey.hpp"

#include "mdres/errors.hpp"

#include <numbers>

namespace mdres {

std::array<Vec3, 4> SurveyConfig::top_positions() const
{
  Vec3 dir = Vec3::Zero();
  dir[axis] = 1.0;
  const std::array<double, 4> offsets{-1.5, -0.5, 0.5, 1.5};
  std::array<Vec3, 4> p{};
  for (int i = 0; i < 4; ++i) {
    p[i] = center + offsets[i] * spacing * dir;
  }
  return p;
}

std::array<ElectrodeSpec, 4> build_wenner(const SurveyConfig& cfg, const Box& domain)
{
  if (!(cfg.spacing > 0.0)) {
    throw InvalidSurvey("electrode spacing must be positive");
  }
  if (cfg.current == 0.0 || !std::isfinite(cfg.current)) {
    throw InvalidSurvey("injected current must be non-zero");
  }
  if (cfg.axis < 0 || cfg.axis > 1) {
    throw InvalidSurvey("array axis must be x (0) or y (1)");
  }
  const ElectrodeTemplate& t = cfg.electrode;
  if (!(t.length > 0.0) || !(t.radius > 0.0) || t.segments < 1) {
    throw InvalidSurvey("electrode length, radius and segment count must be positive");
  }
  static constexpr std::array<const char*, 4> names{"C1", "P1", "P2", "C2"};
  const auto tops = cfg.top_positions();
  const double tol = 1e-9 * std::max(1.0, domain.extents().norm());
  std::array<ElectrodeSpec, 4> out;
  for (int i = 0; i < 4; ++i) {
    ElectrodeSpec& e = out[i];
    e.name = names[i];
    e.radius = t.radius;
    e.sigma = t.sigma;
    e.skin = t.skin;
    for (int k = 0; k <= t.segments; ++k) {
      e.polyline.push_back(tops[i] - Vec3(0, 0, t.length * k / t.segments));
    }
    if (!domain.contains(e.polyline.front(), tol) || !domain.contains(e.polyline.back(), tol)) {
      throw InvalidSurvey("electrode " + e.name + " lies outside the domain");
    }
  }
  const bool outer_inject = !cfg.reciprocal;
  out[0].current = outer_inject ? cfg.current : 0.0;
  out[3].current = outer_inject ? -cfg.current : 0.0;
  out[1].current = outer_inject ? 0.0 : cfg.current;
  out[2].current = outer_inject ? 0.0 : -cfg.current;
  for (auto& e : out) {
    if (e.current == 0.0) {
      e.exchange_scale = cfg.measuring_exchange_scale;
    }
  }
  return out;
}

ApparentResistivity apparent_resistivity(const Solution& s, const SurveyConfig& cfg, std::size_t first)
{
  if (s.electrode_phi.size() < first + 4) {
    throw InvalidSurvey("solution does not contain the four array electrodes");
  }
  const std::size_t m1 = cfg.reciprocal ? first : first + 1;
  const std::size_t m2 = cfg.reciprocal ? first + 3 : first + 2;
  if (s.electrode_phi[m1].size() == 0 || s.electrode_phi[m2].size() == 0) {
    throw InvalidSurvey("measuring electrode has no cells");
  }
  ApparentResistivity r;
  r.delta_phi = s.electrode_phi[m1][0] - s.electrode_phi[m2][0];
  r.geometric_factor = 2.0 * std::numbers::pi * cfg.spacing;
  r.value = r.geometric_factor * r.delta_phi / cfg.current;
  return r;
}

double analytic_wenner_insulating(double rho, double a, double h, double rel_tol)
{
  if (!(rho > 0.0) || !(a > 0.0) || !(h > 0.0)) {
    throw InvalidSurvey("analytic apparent resistivity needs positive rho, a and h");
  }
  const double a2 = a * a;
  double sum = 0.0;
  long n = 1;
  constexpr long kMaxTerms = 200000000;
  for (; n <= kMaxTerms; ++n) {
    const double d2 = 4.0 * static_cast<double>(n) * static_cast<double>(n) * h * h;
    const double term = 1.0 / std::sqrt(a2 + d2) - 1.0 / std::sqrt(4.0 * a2 + d2);
    sum += term;
    if (4.0 * a * term < rel_tol * (1.0 + 4.0 * a * sum)) {
      break;
    }
  }
  // remainder: integral of the terms from n + 1/2 to infinity,
  // (1/2h) [ln 2 - asinh(2u) + asinh(u)] with u = (n + 1/2) h / a, written
  // without cancellation
  const double u = (static_cast<double>(n) + 0.5) * h / a;
  const double s1 = std::sqrt(4.0 * u * u + 1.0);
  const double s4 = std::sqrt(4.0 * u * u + 4.0);
  const double tail = -std::log1p(-3.0 / ((s1 + s4) * 2.0 * (u + std::sqrt(u * u + 1.0)))) / (2.0 * h);
  return rho * (1.0 + 4.0 * a * (sum + tail));
}

} // namespace mdres
