#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdres/errors.hpp"
#include "mdres/scenario.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace mdres;

namespace {

constexpr double kPi = 3.14159265358979323846;

ScenarioSpec small_scenario(Scheme scheme)
{
  ScenarioSpec s;
  s.domain = Box{Vec3::Zero(), Vec3(0.24, 0.16, 0.10)};
  s.mesh.cell_size = 0.04;
  s.mesh.electrode_cell_size = 0.01;
  s.survey.center = Vec3(0.12, 0.08, 0.0);
  s.survey.spacing = 0.03;
  s.scheme = scheme;
  LinerSpec l;
  l.panels.push_back({2, 0.05, {0.0, 0.0}, {0.24, 0.16}});
  s.liner = l;
  return s;
}

Solution fake_solution(double p1, double p2)
{
  Solution s;
  s.electrode_phi = {VecX::Constant(1, 0.3), VecX::Constant(1, p1), VecX::Constant(1, p2), VecX::Constant(1, -0.3)};
  return s;
}

} // namespace

TEST_CASE("wenner electrode positions")
{
  const Box tank{Vec3::Zero(), Vec3(0.52, 0.34, 0.40)};
  SurveyConfig c;
  c.center = Vec3(0.26, 0.17, 0.40);
  c.spacing = 0.03;
  auto e = build_wenner(c, tank);
  const std::array<double, 4> xs{0.215, 0.245, 0.275, 0.305};
  double isum = 0.0;
  for (int i = 0; i < 4; ++i) {
    CHECK(e[i].polyline.front().x() == doctest::Approx(xs[i]).epsilon(1e-14));
    CHECK(e[i].polyline.front().y() == doctest::Approx(0.17).epsilon(1e-14));
    CHECK(e[i].polyline.front().z() == doctest::Approx(0.40).epsilon(1e-14));
    CHECK(e[i].length() == doctest::Approx(5e-3).epsilon(1e-12));
    isum += e[i].current;
  }
  CHECK(isum == 0.0);
  CHECK(e[0].current == 0.01);
  CHECK(e[1].current == 0.0);
  CHECK(e[0].name == "C1");
  CHECK(e[3].name == "C2");

  c.spacing = 0.06;
  e = build_wenner(c, tank);
  const std::array<double, 4> xs6{0.17, 0.23, 0.29, 0.35};
  for (int i = 0; i < 4; ++i) {
    CHECK(e[i].polyline.front().x() == doctest::Approx(xs6[i]).epsilon(1e-14));
  }

  c.reciprocal = true;
  e = build_wenner(c, tank);
  CHECK(e[0].current == 0.0);
  CHECK(e[1].current == 0.01);
  CHECK(e[2].current == -0.01);

  c.reciprocal = false;
  c.measuring_exchange_scale = 10.0;
  e = build_wenner(c, tank);
  CHECK(e[0].exchange_scale == 1.0);
  CHECK(e[1].exchange_scale == 10.0);
}

TEST_CASE("invalid surveys")
{
  const Box tank{Vec3::Zero(), Vec3(0.52, 0.34, 0.40)};
  SurveyConfig c;
  c.center = Vec3(0.26, 0.17, 0.40);
  c.spacing = 0.2;
  CHECK_THROWS_AS(build_wenner(c, tank), InvalidSurvey);
  c.spacing = 0.0;
  CHECK_THROWS_AS(build_wenner(c, tank), InvalidSurvey);
  c.spacing = 0.03;
  c.current = 0.0;
  CHECK_THROWS_AS(build_wenner(c, tank), InvalidSurvey);
  c.current = 0.01;
  c.electrode.length = 0.5;
  CHECK_THROWS_AS(build_wenner(c, tank), InvalidSurvey);
  c.electrode.length = 5e-3;
  c.axis = 2;
  CHECK_THROWS_AS(build_wenner(c, tank), InvalidSurvey);
}

TEST_CASE("apparent resistivity from measured potentials")
{
  SurveyConfig c;
  c.spacing = 0.03;
  c.current = 0.02;
  auto r = apparent_resistivity(fake_solution(0.1, 0.1), c);
  CHECK(r.value == 0.0);
  CHECK(r.geometric_factor == doctest::Approx(2 * kPi * 0.03).epsilon(1e-15));
  r = apparent_resistivity(fake_solution(0.25, 0.05), c);
  CHECK(r.delta_phi == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(r.value == r.geometric_factor * r.delta_phi / c.current);

  c.reciprocal = true;
  r = apparent_resistivity(fake_solution(0.25, 0.05), c);
  CHECK(r.delta_phi == doctest::Approx(0.6).epsilon(1e-15));

  Solution empty;
  CHECK_THROWS_AS(apparent_resistivity(empty, c), InvalidSurvey);
}

TEST_CASE("analytic formula limits")
{
  CHECK(analytic_wenner_insulating(29.0, 0.03, 300.0) == doctest::Approx(29.0).epsilon(1e-6));
  CHECK(analytic_wenner_insulating(1.0, 1.0, 1e4) == doctest::Approx(1.0).epsilon(1e-6));
  double prev = std::numeric_limits<double>::infinity();
  for (double h = 0.005; h < 5.0; h *= 1.3) {
    const double v = analytic_wenner_insulating(29.0, 0.03, h);
    CHECK(v < prev);
    CHECK(v > 29.0);
    prev = v;
  }
  CHECK_THROWS_AS(analytic_wenner_insulating(29.0, 0.0, 0.1), InvalidSurvey);
  CHECK_THROWS_AS(analytic_wenner_insulating(29.0, 0.03, -1.0), InvalidSurvey);
}

TEST_CASE("analytic formula against the image-charge oracle")
{
  const double ref = oracle::image_wenner(29.0, 0.03, 0.03);
  CHECK(std::abs(analytic_wenner_insulating(29.0, 0.03, 0.03) - ref) <= 1e-8 * ref);

  double worst = 0.0;
  for (double a : {0.01, 0.03, 0.06}) {
    for (double ratio : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0}) {
      const double h = ratio * a;
      const double v = analytic_wenner_insulating(29.0, a, h);
      const double o = oracle::image_wenner(29.0, a, h);
      worst = std::max(worst, std::abs(v - o) / o);
    }
  }
  MESSAGE("worst relative deviation " << worst);
  CHECK(worst <= 1e-8);
}

TEST_CASE("doubling the current leaves rho_a unchanged")
{
  auto s = small_scenario(Scheme::Mpfa);
  const double a = run_scenario(s).rho.value;
  s.survey.current *= 2.0;
  const double b = run_scenario(s).rho.value;
  CHECK(std::abs(a - b) <= 1e-12 * a);
}

TEST_CASE("translation invariance")
{
  auto s = small_scenario(Scheme::Mpfa);
  const double a = run_scenario(s).rho.value;
  const Vec3 shift(0.37, -0.21, 0.13);
  s.domain.min += shift;
  s.domain.max += shift;
  s.survey.center += shift;
  s.liner->panels[0].position += shift.z();
  s.liner->panels[0].lo[0] += shift.x();
  s.liner->panels[0].hi[0] += shift.x();
  s.liner->panels[0].lo[1] += shift.y();
  s.liner->panels[0].hi[1] += shift.y();
  const double b = run_scenario(s).rho.value;
  CHECK(std::abs(a - b) <= 1e-10 * a);
}

TEST_CASE("reciprocity")
{
  for (Scheme sc : {Scheme::Tpfa, Scheme::Mpfa}) {
    auto s = small_scenario(sc);
    const double direct = run_scenario(s).rho.value;
    s.survey.reciprocal = true;
    const double recip = run_scenario(s).rho.value;
    MESSAGE(std::string(scheme_name(sc)) << " direct " << direct << " reciprocal " << recip);
    CHECK(std::abs(direct - recip) / direct < 1e-3);
  }
}
