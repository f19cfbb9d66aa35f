#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdres/box_mesh.hpp"
#include "mdres/errors.hpp"
#include "mdres/fv.hpp"
#include "oracles.hpp"

#include <random>

using namespace mdres;

namespace {

SubdomainMesh two_segments()
{
  return make_mesh(1, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, {0, 1, 1, 2});
}

int interior_face(const SubdomainMesh& m)
{
  for (int f = 0; f < m.num_faces(); ++f) {
    if (!m.is_boundary(f)) {
      return f;
    }
  }
  return -1;
}

/// Box mesh with interior nodes displaced randomly by up to `amp` * h.
SubdomainMesh perturbed_cube(int n, double amp, unsigned seed)
{
  const auto base = build_box_mesh(Vec3(1, 1, 1), 1.0 / n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto nodes = base.nodes;
  const double h = 1.0 / n;
  for (auto& p : nodes) {
    for (int a = 0; a < 3; ++a) {
      if (p[a] > 1e-12 && p[a] < 1 - 1e-12) {
        p[a] += amp * h * u(rng);
      }
    }
  }
  return make_mesh(3, nodes, base.cell_nodes);
}

int check_linear_exactness(const SubdomainMesh& m, const MaterialField& mat, const Vec3& g, double tol)
{
  const auto op = mpfa_o_assemble(m, mat);
  VecX phi(m.num_cells());
  for (int c = 0; c < m.num_cells(); ++c) {
    phi[c] = g.dot(m.cell_centers[c]);
  }
  const VecX exact = oracle::linear_field_fluxes(m, mat.sigma, g);
  VecX q = VecX::Zero(m.num_faces());
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.is_boundary(f)) {
      q[f] = exact[f];
    }
  }
  const VecX fl = reconstruct_fluxes(op, phi, q);
  const double scale = exact.cwiseAbs().maxCoeff();
  CHECK((fl - exact).cwiseAbs().maxCoeff() <= tol * scale);

  // cells without a boundary vertex see no boundary data through MPFA
  std::vector<char> on_boundary(static_cast<std::size_t>(m.num_nodes()), 0);
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.is_boundary(f)) {
      for (int n : m.face(f)) {
        on_boundary[n] = 1;
      }
    }
  }
  const VecX r = op.cell_matrix() * phi;
  double worst = 0.0;
  int checked = 0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto cn = m.cell(c);
    if (std::none_of(cn.begin(), cn.end(), [&](int n) { return on_boundary[n] != 0; })) {
      worst = std::max(worst, std::abs(r[c]));
      ++checked;
    }
  }
  CHECK(worst <= tol * scale);
  return checked;
}

} // namespace

TEST_CASE("TPFA on two unit segments")
{
  const auto m = two_segments();
  const int f = interior_face(m);
  {
    const auto op = tpfa_assemble(m, MaterialField::uniform(m, 1.0));
    CHECK(half_transmissibility(m, 0, 0, 1.0) == doctest::Approx(2.0));
    CHECK(std::abs(op.flux.coeff(f, 0)) == doctest::Approx(1.0).epsilon(1e-15));
    const VecX fl = reconstruct_fluxes(op, VecX::Unit(2, m.face_cells[f][0]));
    CHECK(fl[f] == doctest::Approx(1.0).epsilon(1e-15));
  }
  {
    const auto op = tpfa_assemble(m, MaterialField{{1.0, 2.0}});
    CHECK(std::abs(op.flux.coeff(f, 0)) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("constant potential gives zero flux")
{
  const auto m = perturbed_cube(3, 0.2, 5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  MaterialField mat;
  for (int c = 0; c < m.num_cells(); ++c) {
    mat.sigma.push_back(u(rng));
  }
  for (Scheme s : {Scheme::Tpfa, Scheme::Mpfa}) {
    const auto op = assemble(s, m, mat);
    const VecX fl = reconstruct_fluxes(op, VecX::Constant(m.num_cells(), 3.7));
    CHECK(fl.cwiseAbs().maxCoeff() <= 1e-12 * op.flux.cwiseAbs().sum() / m.num_faces() * 10);
    const SpMat a = op.cell_matrix();
    const VecX rows = a * VecX::Ones(m.num_cells());
    for (int c = 0; c < m.num_cells(); ++c) {
      CHECK(std::abs(rows[c]) <= 1e-12 * 2.0 * std::abs(a.coeff(c, c)));
    }
  }
}

TEST_CASE("MPFA reduces to TPFA in one dimension")
{
  std::vector<Vec3> nodes;
  std::vector<int> cells;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  double x = 0.0;
  for (int i = 0; i <= 8; ++i) {
    nodes.emplace_back(x, 0.2 * x, 0.0);
    x += u(rng);
    if (i > 0) {
      cells.push_back(i - 1);
      cells.push_back(i);
    }
  }
  const auto m = make_mesh(1, nodes, cells);
  MaterialField mat;
  for (int c = 0; c < m.num_cells(); ++c) {
    mat.sigma.push_back(u(rng));
  }
  const auto t = tpfa_assemble(m, mat);
  const auto p = mpfa_o_assemble(m, mat);
  const SpMat diff = t.flux - p.flux;
  CHECK(diff.cwiseAbs().sum() <= 1e-12 * t.flux.cwiseAbs().sum());
  // MPFA in 1D has no cross-boundary coupling
  const SpMat bd = t.bound_flux - p.bound_flux;
  CHECK(bd.cwiseAbs().sum() <= 1e-12);
}

TEST_CASE("MPFA reproduces linear fields")
{
  const Vec3 g(2.0, -3.0, 1.0);
  SUBCASE("single reference tetrahedron")
  {
    const auto m = make_mesh(3, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {0, 1, 2, 3});
    const auto op = mpfa_o_assemble(m, MaterialField::uniform(m, 1.0));
    VecX q(4);
    for (int f = 0; f < 4; ++f) {
      q[f] = -m.face_areas[f] * m.face_normals[f].x();
    }
    const VecX fl = reconstruct_fluxes(op, VecX::Constant(1, 0.25), q);
    CHECK((fl - q).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(fl.sum()) <= 1e-12);
  }
  SUBCASE("48-tet cube")
  {
    const auto m = build_box_mesh(Vec3(1, 1, 1), 0.5);
    check_linear_exactness(m, MaterialField::uniform(m, 1.0), g, 1e-10);
  }
  SUBCASE("cube with interior cells")
  {
    const auto m = build_box_mesh(Vec3(1, 1, 1), 0.2);
    CHECK(check_linear_exactness(m, MaterialField::uniform(m, 1.0), g, 1e-10) > 0);
  }
  SUBCASE("randomly perturbed meshes")
  {
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const auto m = perturbed_cube(4, 0.25, seed);
      check_linear_exactness(m, MaterialField::uniform(m, 1.0), g, 1e-10);
    }
  }
  SUBCASE("flat triangle mesh")
  {
    std::vector<Vec3> nodes;
    std::vector<int> cells;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    const int n = 5;
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        const bool inner = i > 0 && i < n && j > 0 && j < n;
        nodes.emplace_back((i + (inner ? u(rng) : 0.0)) / n, (j + (inner ? u(rng) : 0.0)) / n, 0.3);
      }
    }
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int a = j * (n + 1) + i;
        cells.insert(cells.end(), {a, a + 1, a + n + 2, a, a + n + 2, a + n + 1});
      }
    }
    const auto m = make_mesh(2, nodes, cells);
    check_linear_exactness(m, MaterialField::uniform(m, 2.5), Vec3(1.0, -0.5, 0.0), 1e-10);
  }
}

TEST_CASE("TPFA is not exact on Kuhn tetrahedra")
{
  const auto m = build_box_mesh(Vec3(1, 1, 1), 0.25);
  const auto op = tpfa_assemble(m, MaterialField::uniform(m, 1.0));
  const Vec3 g(2.0, -3.0, 1.0);
  VecX phi(m.num_cells());
  for (int c = 0; c < m.num_cells(); ++c) {
    phi[c] = g.dot(m.cell_centers[c]);
  }
  const VecX exact = oracle::linear_field_fluxes(m, MaterialField::uniform(m, 1.0).sigma, g);
  const VecX fl = reconstruct_fluxes(op, phi);
  double err = 0.0;
  for (int f = 0; f < m.num_faces(); ++f) {
    if (!m.is_boundary(f)) {
      err = std::max(err, std::abs(fl[f] - exact[f]));
    }
  }
  CHECK(err > 1e-3 * exact.cwiseAbs().maxCoeff());
}

TEST_CASE("parallel assembly is bitwise identical")
{
  const auto m = perturbed_cube(6, 0.2, 2);
  const auto mat = MaterialField::uniform(m, 0.5);
  for (Scheme s : {Scheme::Tpfa, Scheme::Mpfa}) {
    const auto a = assemble(s, m, mat, {1});
    const auto b = assemble(s, m, mat, {3});
    const SpMat d = a.flux - b.flux;
    CHECK(d.cwiseAbs().sum() == 0.0);
    const SpMat e = a.bound_flux - b.bound_flux;
    CHECK(e.cwiseAbs().sum() == 0.0);
  }
}

TEST_CASE("Neumann right-hand side")
{
  const auto m = two_segments();
  CHECK(neumann_rhs(m, {}).cwiseAbs().maxCoeff() == 0.0);
  // tag the two tips
  auto tagged = m;
  for (int f = 0; f < tagged.num_faces(); ++f) {
    if (tagged.is_boundary(f)) {
      tagged.face_tags[f] = tagged.face(f)[0] == 0 ? 1 : 2;
    }
  }
  const VecX dip = neumann_rhs(tagged, {{1, 0.01}, {2, -0.01}});
  CHECK(std::abs(dip.sum()) == 0.0);
  const VecX one = neumann_rhs(tagged, {{1, 0.01}});
  CHECK(one[0] == doctest::Approx(0.01));
  CHECK(one[1] == 0.0);
  CHECK_THROWS_AS(neumann_rhs(tagged, {{7, 1.0}}), UnknownBoundaryTag);
}

TEST_CASE("cell current density is exact for uniform current")
{
  const auto m = perturbed_cube(3, 0.2, 8);
  const Vec3 j(0.3, -1.0, 2.0);
  VecX fl(m.num_faces());
  for (int f = 0; f < m.num_faces(); ++f) {
    fl[f] = m.face_areas[f] * j.dot(m.face_normals[f]);
  }
  for (const auto& jc : cell_current_density(m, fl)) {
    CHECK((jc - j).norm() <= 1e-12 * j.norm());
  }
}
