#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdres/errors.hpp"
#include "mdres/scenario.hpp"

#include <cmath>
#include <random>

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

double exact(const Vec3& p)
{
  return std::sin(kPi * p.x()) * std::sin(kPi * p.y()) * std::sin(kPi * p.z());
}

Vec3 exact_grad(const Vec3& p)
{
  const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y()), sz = std::sin(kPi * p.z());
  const double cx = std::cos(kPi * p.x()), cy = std::cos(kPi * p.y()), cz = std::cos(kPi * p.z());
  return kPi * Vec3(cx * sy * sz, sx * cy * sz, sx * sy * cz);
}

/// Outflow -grad(phi).n integrated over a triangle with the 7-point degree-5 rule.
double face_outflow(const SubdomainMesh& m, int f, const Vec3& n)
{
  const auto fn = m.face(f);
  const Vec3& p0 = m.nodes[fn[0]];
  const Vec3& p1 = m.nodes[fn[1]];
  const Vec3& p2 = m.nodes[fn[2]];
  const double s15 = std::sqrt(15.0);
  const double a = (6.0 - s15) / 21.0;
  const double b = (6.0 + s15) / 21.0;
  const double wa = (155.0 + s15) / 1200.0;
  const double wb = (155.0 - s15) / 1200.0;
  const std::array<std::array<double, 4>, 7> rule{{{1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40},
                                                   {a, a, 1 - 2 * a, wa},
                                                   {a, 1 - 2 * a, a, wa},
                                                   {1 - 2 * a, a, a, wa},
                                                   {b, b, 1 - 2 * b, wb},
                                                   {b, 1 - 2 * b, b, wb},
                                                   {1 - 2 * b, b, b, wb}}};
  double s = 0.0;
  for (const auto& q : rule) {
    const Vec3 x = q[0] * p0 + q[1] * p1 + q[2] * p2;
    s += q[3] * -exact_grad(x).dot(n);
  }
  return s * m.face_areas[f];
}

/// Volume-weighted L2 error of the manufactured solution, both sides mean-free.
double mms_error(Scheme scheme, int n)
{
  const auto mesh = build_box_mesh(Vec3(1, 1, 1), 1.0 / n);
  const auto mat = MaterialField::uniform(mesh, 1.0);
  const auto op = assemble(scheme, mesh, mat);

  VecX face_out(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    face_out[f] = face_outflow(mesh, f, mesh.face_normals[f]);
  }
  // cell source = net outflow of the exact flux field
  VecX src = op.div * face_out;
  VecX q = VecX::Zero(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.is_boundary(f)) {
      q[f] = face_out[f];
    }
  }

  LinearSystem sys;
  sys.matrix = op.cell_matrix();
  sys.rhs = src + op.boundary_rhs(q);
  sys.layout.bulk = mesh.num_cells();
  sys.measures = Eigen::Map<const VecX>(mesh.cell_volumes.data(), mesh.num_cells());
  // quadrature round-off only; make the data compatible to machine precision
  sys.rhs.array() -= sys.rhs.sum() / mesh.num_cells();
  const VecX phi = solve_gauged(sys, SolveOptions{});

  VecX ex(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    ex[c] = exact(mesh.cell_centers[c]);
  }
  const double vol = mesh.total_volume();
  const double mean_ex = ex.dot(sys.measures) / vol;
  const double mean_ph = phi.dot(sys.measures) / vol;
  double e2 = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double d = (phi[c] - mean_ph) - (ex[c] - mean_ex);
    e2 += mesh.cell_volumes[c] * d * d;
  }
  return std::sqrt(e2);
}

} // namespace

TEST_CASE("gauge names")
{
  CHECK(parse_gauge("pin") == GaugeMode::Pin);
  CHECK(parse_gauge("null-average") == GaugeMode::NullAverage);
  CHECK(std::string(gauge_name(GaugeMode::NullAverage)) == "null-average");
  CHECK_THROWS_AS(parse_gauge("zero"), ConfigError);
}

TEST_CASE("zero rhs gives zero potential")
{
  const auto mesh = build_box_mesh(Vec3(1, 1, 1), 0.25);
  const auto op = mpfa_o_assemble(mesh, MaterialField::uniform(mesh, 3.0));
  LinearSystem sys;
  sys.matrix = op.cell_matrix();
  sys.rhs = VecX::Zero(mesh.num_cells());
  sys.layout.bulk = mesh.num_cells();
  sys.measures = VecX::Ones(mesh.num_cells());
  for (GaugeMode g : {GaugeMode::Pin, GaugeMode::NullAverage}) {
    SolveOptions o;
    o.gauge = g;
    CHECK(solve_gauged(sys, o).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("incompatible sources are rejected")
{
  const auto mesh = build_box_mesh(Vec3(1, 1, 1), 0.5);
  const auto op = tpfa_assemble(mesh, MaterialField::uniform(mesh, 1.0));
  LinearSystem sys;
  sys.matrix = op.cell_matrix();
  sys.rhs = VecX::Zero(mesh.num_cells());
  sys.rhs[0] = 1.0;
  sys.layout.bulk = mesh.num_cells();
  sys.measures = VecX::Ones(mesh.num_cells());
  CHECK_THROWS_AS(solve_gauged(sys, SolveOptions{}), IncompatibleSource);
  sys.rhs[1] = -1.0;
  CHECK_NOTHROW(solve_gauged(sys, SolveOptions{}));
}

TEST_CASE("gauges and pinned unknown do not change the potential")
{
  const auto s = small_scenario(Scheme::Mpfa);
  const auto grid = build_scenario_grid(s);
  MixedDimProblem pb;
  pb.grid = &grid;
  pb.bulk_material = MaterialField::uniform(grid.bulk, s.sigma);
  pb.liner = LinerProperties{s.liner->thickness, s.liner->sigma};
  const auto el = scenario_electrodes(s);
  pb.electrodes.assign(el.begin(), el.end());
  const auto ap = assemble_global(pb);

  SolveReport rep;
  const VecX ref = solve_gauged(ap.system, SolveOptions{}, &rep);
  CHECK(rep.relative_residual <= 1e-10);
  const double scale = ref.lpNorm<Eigen::Infinity>();
  const int n = ap.system.layout.potentials();
  for (int pin : {1, n / 2, n - 1}) {
    SolveOptions o;
    o.pin_dof = pin;
    CHECK((solve_gauged(ap.system, o) - ref).lpNorm<Eigen::Infinity>() <= 1e-10 * scale);
  }
  SolveOptions na;
  na.gauge = GaugeMode::NullAverage;
  const VecX x = solve_gauged(ap.system, na, &rep);
  CHECK(rep.relative_residual <= 1e-10);
  CHECK((x - ref).lpNorm<Eigen::Infinity>() <= 1e-10 * scale);
  CHECK(std::abs(x.head(n).dot(ap.system.measures)) <= 1e-12 * scale * ap.system.measures.sum());

  SolveOptions bad;
  bad.pin_dof = n + 5;
  CHECK_THROWS(solve_gauged(ap.system, bad));
}

TEST_CASE("weakly joined blocks keep a small residual after the gauge shift")
{
  // a nearly insulating slab splits the cube; the current has to cross it,
  // so the two halves end up ~1e3 V apart
  const auto mesh = build_box_mesh(Vec3(1, 1, 1), 0.125);
  MaterialField mat = MaterialField::uniform(mesh, 1.0);
  int top = 0;
  int bottom = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double z = mesh.cell_centers[c].z();
    if (z > 0.375 && z < 0.625) {
      mat.sigma[c] = 1e-6;
    }
    if (z > mesh.cell_centers[top].z()) {
      top = c;
    }
    if (z < mesh.cell_centers[bottom].z()) {
      bottom = c;
    }
  }
  LinearSystem sys;
  sys.matrix = mpfa_o_assemble(mesh, mat).cell_matrix();
  sys.rhs = VecX::Zero(mesh.num_cells());
  sys.rhs[top] = 0.01;
  sys.rhs[bottom] = -0.01;
  sys.layout.bulk = mesh.num_cells();
  sys.measures = Eigen::Map<const VecX>(mesh.cell_volumes.data(), mesh.num_cells());

  SolveOptions na;
  na.gauge = GaugeMode::NullAverage;
  SolveReport rep;
  const VecX ref = solve_gauged(sys, na, &rep);
  const double scale = ref.lpNorm<Eigen::Infinity>();
  CHECK(scale > 1e3);
  CHECK(rep.relative_residual <= 1e-10);
  for (int pin : {top, bottom, mesh.num_cells() / 2}) {
    SolveOptions o;
    o.pin_dof = pin;
    const VecX x = solve_gauged(sys, o, &rep);
    MESSAGE("pin " << pin << ": relative residual " << rep.relative_residual);
    CHECK(rep.relative_residual <= 1e-10);
    CHECK(std::abs(x.dot(sys.measures)) <= 1e-10 * scale * sys.measures.sum());
  }
}

TEST_CASE("rho_a is gauge invariant")
{
  auto s = small_scenario(Scheme::Mpfa);
  const double pin = run_scenario(s).rho.value;
  s.gauge = GaugeMode::NullAverage;
  const double avg = run_scenario(s).rho.value;
  CHECK(std::abs(pin - avg) <= 1e-10 * std::abs(pin));
}

TEST_CASE("per-cell conservation")
{
  for (Scheme sc : {Scheme::Tpfa, Scheme::Mpfa}) {
    const auto r = run_scenario(small_scenario(sc), true);
    CHECK(r.balance.max_residual <= 1e-10 * 0.01);
    CHECK(r.balance.injected == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(r.solve.relative_residual <= 1e-10);
    CHECK(r.balance.cell_residuals.size() == r.problem->system.layout.potentials());
  }
}

TEST_CASE("linearity in the injected current")
{
  auto s = small_scenario(Scheme::Mpfa);
  const auto a = run_scenario(s, true);
  s.survey.current *= 3.5;
  const auto b = run_scenario(s, true);
  const VecX& xa = a.solution->x;
  const VecX& xb = b.solution->x;
  CHECK((xb - 3.5 * xa).lpNorm<Eigen::Infinity>() <= 1e-12 * xb.lpNorm<Eigen::Infinity>());
  for (std::size_t e = 0; e < 4; ++e) {
    for (std::size_t k = 0; k < a.solution->electrode_exchange[e].size(); ++k) {
      CHECK(std::abs(b.solution->electrode_exchange[e][k] - 3.5 * a.solution->electrode_exchange[e][k]) <=
            1e-12 * 0.035);
    }
  }
  CHECK(std::abs(a.rho.value - b.rho.value) <= 1e-12 * a.rho.value);
}

TEST_CASE("Krylov fallback agrees with the direct solve")
{
  const auto mesh = build_box_mesh(Vec3(1, 1, 1), 0.2);
  const auto op = tpfa_assemble(mesh, MaterialField::uniform(mesh, 1.0));
  LinearSystem sys;
  sys.matrix = op.cell_matrix();
  sys.rhs = VecX::Zero(mesh.num_cells());
  sys.rhs[3] = 1.0;
  sys.rhs[mesh.num_cells() - 2] = -1.0;
  sys.layout.bulk = mesh.num_cells();
  sys.measures = Eigen::Map<const VecX>(mesh.cell_volumes.data(), mesh.num_cells());
  SolveReport rd;
  SolveReport ri;
  const VecX d = solve_gauged(sys, SolveOptions{}, &rd);
  SolveOptions it;
  it.force_iterative = true;
  const VecX i = solve_gauged(sys, it, &ri);
  CHECK(rd.method != ri.method);
  CHECK(ri.relative_residual <= 1e-10);
  CHECK((d - i).lpNorm<Eigen::Infinity>() <= 1e-8 * d.lpNorm<Eigen::Infinity>());
}

TEST_CASE("manufactured solution convergence")
{
  std::array<double, 3> em{};
  std::array<double, 3> et{};
  const std::array<int, 3> ns{4, 8, 16};
  for (int k = 0; k < 3; ++k) {
    em[k] = mms_error(Scheme::Mpfa, ns[k]);
    et[k] = mms_error(Scheme::Tpfa, ns[k]);
    MESSAGE("n=" << ns[k] << " mpfa " << em[k] << " tpfa " << et[k]);
  }
  const double order_fine = std::log2(em[1] / em[2]);
  const double order_coarse = std::log2(em[0] / em[1]);
  MESSAGE("mpfa orders " << order_coarse << " " << order_fine);
  CHECK(order_fine >= 1.8);
  CHECK(em[2] < et[2]);
}
