#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdres/errors.hpp"
#include "mdres/scenario.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace mdres;

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Small water body with an optional horizontal liner and a 3 cm array.
ScenarioSpec small_scenario(bool liner, Scheme scheme = Scheme::Tpfa)
{
  ScenarioSpec s;
  s.domain = Box{Vec3::Zero(), Vec3(0.24, 0.16, 0.10)};
  s.mesh.cell_size = 0.04;
  s.mesh.electrode_cell_size = 0.01;
  s.survey.center = Vec3(0.12, 0.08, 0.0);
  s.survey.spacing = 0.03;
  s.scheme = scheme;
  s.mesh.required_planes[2] = {0.05};
  if (liner) {
    LinerSpec l;
    l.panels.push_back({2, 0.05, {0.0, 0.0}, {0.24, 0.16}});
    s.liner = l;
  }
  return s;
}

MixedDimProblem problem_for(const MixedDimGrid& grid, const ScenarioSpec& s)
{
  MixedDimProblem pb;
  pb.grid = &grid;
  pb.bulk_material = MaterialField::uniform(grid.bulk, s.sigma);
  if (s.liner) {
    pb.liner = LinerProperties{s.liner->thickness, s.liner->sigma};
  }
  const auto el = scenario_electrodes(s);
  pb.electrodes.assign(el.begin(), el.end());
  pb.options.scheme = s.scheme;
  pb.options.explicit_mortars = s.explicit_mortars;
  return pb;
}

double inf_norm(const SpMat& m)
{
  VecX rows = VecX::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      rows[it.row()] += std::abs(it.value());
    }
  }
  return rows.maxCoeff();
}

} // namespace

TEST_CASE("peaceman conductance values")
{
  CHECK(peaceman_conductance(1.0 / 29.0, 1e-3, 1e-2, 0.0) == doctest::Approx(0.31257).epsilon(1e-5));
  CHECK(peaceman_conductance(1.0 / 29.0, 1e-3, 1e-2, 0.0) ==
        doctest::Approx(2.0 * kPi / 29.0 / std::log(2.0)).epsilon(1e-14));
  CHECK(peaceman_conductance(0.5, 2e-3, 1e-2, 1.0) == doctest::Approx(2.0 * kPi * 0.5).epsilon(1e-14));

  double prev = peaceman_conductance(1.0, 1e-3, 1e-2, 0.0);
  for (double s : {0.5, 1.0, 10.0, 100.0, 1e4}) {
    const double v = peaceman_conductance(1.0, 1e-3, 1e-2, s);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-3);

  CHECK_THROWS_AS(peaceman_conductance(1.0, 1e-3, 5e-3, 0.0), NonpositiveDenominator);
  CHECK_THROWS_AS(peaceman_conductance(1.0, 1e-3, 2e-3, 0.0), NonpositiveDenominator);
  CHECK_NOTHROW(peaceman_conductance(1.0, 1e-3, 2e-3, 2.0));
}

TEST_CASE("electrode links use host cell diameter")
{
  const double h = 0.01;
  const auto bulk = build_box_mesh(Vec3(0.04, 0.04, 0.04), h);
  const Adt adt(cell_boxes(bulk));
  ElectrodeSpec e;
  e.polyline = {Vec3(0.015, 0.0125, 0.04), Vec3(0.015, 0.0125, 0.035)};
  const auto map = map_electrode(e.polyline, bulk, adt);
  const auto mat = MaterialField::uniform(bulk, 0.2);
  const auto block = assemble_electrode(map, e, bulk, mat, 0, 100);
  REQUIRE(block.links.size() == map.entries.size());
  double total_g = 0.0;
  for (std::size_t i = 0; i < block.links.size(); ++i) {
    const auto& l = block.links[i];
    const auto& s = map.entries[i];
    CHECK(l.bulk_dof == s.bulk_cell);
    CHECK(l.lower_dof == 100 + s.electrode_cell);
    const double expect = 2.0 * kPi * 0.2 / std::log(0.2 * bulk.cell_diameters[s.bulk_cell] / e.radius) * s.length;
    CHECK(l.conductance == doctest::Approx(expect).epsilon(1e-13));
    total_g += l.conductance;
  }
  CHECK(total_g > 0.0);

  CHECK_THROWS_AS(assemble_electrode(ElectrodeSegmentMap{}, e, bulk, mat, 0, 0), UnmappedElectrode);
}

TEST_CASE("liner link of a 1e-4 m^2 triangle")
{
  // lattice squares of side h split into two triangles of area h^2/2 = 1e-4
  const double h = std::sqrt(2e-4);
  const auto bulk = build_box_mesh(Vec3(2 * h, 2 * h, 2 * h), h);
  LinerSpec spec;
  spec.panels.push_back({2, h, {0.0, 0.0}, {2 * h, 2 * h}});
  const auto grid = embed_liner(bulk, spec);
  REQUIRE(grid.has_liner());
  const auto mat = MaterialField::uniform(grid.bulk, 1.0 / 29.0);
  const auto block = assemble_liner(grid, LinerProperties{1e-3, 1e-9}, mat, 0, grid.bulk.num_cells());
  REQUIRE(block.links.size() == 2 * static_cast<std::size_t>(grid.liner->num_cells()));
  for (const auto& l : block.links) {
    const int lc = l.lower_dof - grid.bulk.num_cells();
    CHECK(grid.liner->cell_volumes[lc] == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(l.conductance == doctest::Approx(1e-10).epsilon(1e-6));
    CHECK(l.conductance < 1e-10);
    // exact series composition against the face's own half-transmissibility
    int local = -1;
    const auto cf = grid.bulk.faces_of(l.bulk_dof);
    for (int i = 0; i < 4; ++i) {
      if (cf[i] == l.bulk_face) {
        local = i;
      }
    }
    REQUIRE(local >= 0);
    const double alpha = half_transmissibility(grid.bulk, l.bulk_dof, local, 1.0 / 29.0);
    const double c = 1e-9 * 1e-4 / 1e-3;
    CHECK(l.conductance == doctest::Approx(alpha * c / (alpha + c)).epsilon(1e-14));
  }
}

TEST_CASE("equilibrium gives zero exchange")
{
  const auto s = small_scenario(true);
  const auto grid = build_scenario_grid(s);
  const auto ap = assemble_global(problem_for(grid, s));
  const VecX x = VecX::Constant(ap.system.layout.total(), 0.7);
  const auto sol = make_solution(ap, x);
  for (double j : sol.liner_exchange) {
    CHECK(j == doctest::Approx(0.0).epsilon(1e-15));
  }
  for (const auto& e : sol.electrode_exchange) {
    for (double j : e) {
      CHECK(std::abs(j) <= 1e-15);
    }
  }
}

TEST_CASE("global assembly without lower-dimensional parts reduces to the bulk operator")
{
  const auto bulk = build_box_mesh(Vec3(0.1, 0.1, 0.1), 0.05);
  MixedDimGrid grid;
  grid.bulk = bulk;
  for (Scheme sc : {Scheme::Tpfa, Scheme::Mpfa}) {
    MixedDimProblem pb;
    pb.grid = &grid;
    pb.bulk_material = MaterialField::uniform(grid.bulk, 2.0);
    pb.options.scheme = sc;
    const auto ap = assemble_global(pb);
    const SpMat ref = assemble(sc, grid.bulk, pb.bulk_material).cell_matrix();
    REQUIRE(ap.system.matrix.rows() == ref.rows());
    CHECK((SpMat(ap.system.matrix - ref)).norm() <= 1e-14 * ref.norm());
    CHECK(ap.system.rhs.norm() == 0.0);
  }
}

TEST_CASE("assembly mismatches are reported")
{
  const auto s = small_scenario(true);
  const auto grid = build_scenario_grid(s);
  auto pb = problem_for(grid, s);

  auto missing_electrode = pb;
  missing_electrode.electrodes.pop_back();
  CHECK_THROWS_AS(assemble_global(missing_electrode), AssemblyMismatch);

  auto no_liner = pb;
  no_liner.liner.reset();
  CHECK_THROWS_AS(assemble_global(no_liner), AssemblyMismatch);

  auto short_material = pb;
  short_material.bulk_material.sigma.pop_back();
  CHECK_THROWS_AS(assemble_global(short_material), AssemblyMismatch);

  MixedDimProblem empty;
  CHECK_THROWS_AS(assemble_global(empty), AssemblyMismatch);

  MixedDimGrid broken = grid;
  broken.liner_sides[1].pop_back();
  CHECK_THROWS_AS(assemble_liner(broken, *pb.liner, pb.bulk_material, 0, broken.bulk.num_cells()), BrokenMortar);
}

TEST_CASE("coupled operator: constant nullspace and balanced rhs")
{
  for (Scheme sc : {Scheme::Tpfa, Scheme::Mpfa}) {
    for (bool explicit_mortars : {false, true}) {
      auto s = small_scenario(true, sc);
      s.explicit_mortars = explicit_mortars;
      const auto grid = build_scenario_grid(s);
      const auto ap = assemble_global(problem_for(grid, s));
      const auto& M = ap.system.matrix;
      VecX ones = VecX::Zero(M.cols());
      ones.head(ap.system.layout.potentials()).setOnes();
      const VecX r = M * ones;
      CHECK(r.head(ap.system.layout.potentials()).lpNorm<Eigen::Infinity>() <= 1e-12 * inf_norm(M));
      CHECK(std::abs(ap.system.rhs.sum()) <= 1e-15);
      CHECK(ap.system.rhs.cwiseAbs().sum() == doctest::Approx(2 * s.survey.current).epsilon(1e-14));
    }
  }
}

TEST_CASE("dipole: each injecting electrode exchanges its current")
{
  for (Scheme sc : {Scheme::Tpfa, Scheme::Mpfa}) {
    const auto s = small_scenario(true, sc);
    const auto r = run_scenario(s, true);
    const auto& sol = *r.solution;
    const double i = s.survey.current;
    const std::array<double, 4> expected{-i, 0.0, 0.0, i};
    for (int e = 0; e < 4; ++e) {
      double sum = 0.0;
      for (double j : sol.electrode_exchange[e]) {
        sum += j;
      }
      CHECK(std::abs(sum - expected[e]) <= 1e-10 * i);
    }
    CHECK(r.balance.ok(1e-10));
    CHECK(std::abs(r.balance.exchange_sum) <= 1e-10 * i);
    CHECK(std::abs(r.balance.net_injection) <= 1e-10 * i);
  }
}

TEST_CASE("measuring electrode conductance has little effect on rho_a")
{
  auto s = small_scenario(false, Scheme::Mpfa);
  const double base = run_scenario(s).rho.value;
  for (double f : {0.1, 10.0}) {
    s.survey.measuring_exchange_scale = f;
    const double v = run_scenario(s).rho.value;
    CHECK(std::abs(v - base) / base < 5e-3);
  }
}

namespace {

struct MortarComparison {
  double potential = 0.0; ///< max |difference| / max |potential|
  double rho = 0.0;
  double exchange = 0.0;  ///< max |difference| / injected current
};

MortarComparison compare_mortar_forms(ScenarioSpec s)
{
  s.explicit_mortars = false;
  const auto a = run_scenario(s, true);
  s.explicit_mortars = true;
  const auto b = run_scenario(s, true);
  const int n = a.problem->system.layout.potentials();
  REQUIRE(b.problem->system.layout.potentials() == n);
  REQUIRE(b.problem->system.layout.mortars > 0);
  const VecX pa = a.solution->x.head(n);
  const VecX pb = b.solution->x.head(n);
  MortarComparison c;
  c.potential = (pa - pb).lpNorm<Eigen::Infinity>() / pa.lpNorm<Eigen::Infinity>();
  c.rho = std::abs(a.rho.value - b.rho.value) / a.rho.value;
  for (std::size_t k = 0; k < a.solution->liner_exchange.size(); ++k) {
    c.exchange = std::max(c.exchange, std::abs(a.solution->liner_exchange[k] - b.solution->liner_exchange[k]));
  }
  for (std::size_t e = 0; e < a.solution->electrode_exchange.size(); ++e) {
    for (std::size_t k = 0; k < a.solution->electrode_exchange[e].size(); ++k) {
      c.exchange = std::max(c.exchange,
                            std::abs(a.solution->electrode_exchange[e][k] - b.solution->electrode_exchange[e][k]));
    }
  }
  c.exchange /= s.survey.current;
  return c;
}

} // namespace

TEST_CASE("explicit and eliminated mortars agree")
{
  for (Scheme sc : {Scheme::Tpfa, Scheme::Mpfa}) {
    // liner conductance comparable to the bulk transmissibilities
    auto s = small_scenario(true, sc);
    s.liner->sigma = 1e-4;
    const auto c = compare_mortar_forms(s);
    CHECK(c.potential <= 1e-12);
    CHECK(c.rho <= 1e-12);
    CHECK(c.exchange <= 1e-12);
  }
}

TEST_CASE("explicit and eliminated mortars agree for a resistive liner")
{
  // g ~ 1e-10 S is added to bulk diagonals ~ 1e-3 S in the condensed matrix,
  // a relative perturbation of g of order 1e-16 * 1e7
  for (Scheme sc : {Scheme::Tpfa, Scheme::Mpfa}) {
    const auto c = compare_mortar_forms(small_scenario(true, sc));
    MESSAGE(std::string(scheme_name(sc)) << " potential " << c.potential << " rho " << c.rho << " exchange " << c.exchange);
    CHECK(c.potential <= 1e-11);
    CHECK(c.rho <= 1e-12);
    CHECK(c.exchange <= 1e-12);
  }
}

TEST_CASE("transparent liner reproduces the unsplit solution")
{
  // sigma_lambda / eps = 1e9 S/m^2
  auto with = small_scenario(true, Scheme::Tpfa);
  with.liner->sigma = 1.0;
  with.liner->thickness = 1e-9;
  const auto without = small_scenario(false, Scheme::Tpfa);
  const auto a = run_scenario(with, true);
  const auto b = run_scenario(without, true);
  REQUIRE(a.bulk_cells == b.bulk_cells);
  const VecX pa = oracle::centered(a.grid->bulk, a.solution->bulk_phi);
  const VecX pb = oracle::centered(b.grid->bulk, b.solution->bulk_phi);
  const double range = pb.maxCoeff() - pb.minCoeff();
  CHECK((pa - pb).lpNorm<Eigen::Infinity>() <= 1e-6 * range);
}

TEST_CASE("resistive liner raises rho_a")
{
  const auto a = run_scenario(small_scenario(true));
  const auto b = run_scenario(small_scenario(false));
  CHECK(a.rho.value > b.rho.value);
}
