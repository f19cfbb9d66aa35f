#include "mdres/box_mesh.hpp"

#include "mdres/errors.hpp"

namespace mdres {

namespace {

constexpr double kPlaneTol = 1e-9;

struct AxisRegion {
  double lo;
  double hi;
  double h;
  double anchor;
};

double target_size(double x, double coarse, const std::vector<AxisRegion>& regions, double grading)
{
  double s = coarse;
  for (const auto& r : regions) {
    const double d = x < r.lo ? r.lo - x : (x > r.hi ? x - r.hi : 0.0);
    s = std::min(s, r.h + grading * d);
  }
  return s;
}

} // namespace

Box BoxLattice::bounds() const
{
  return {Vec3(axes[0].front(), axes[1].front(), axes[2].front()),
          Vec3(axes[0].back(), axes[1].back(), axes[2].back())};
}

bool BoxLattice::has_plane(int axis, double x, double tol) const
{
  const auto& a = axes[axis];
  auto it = std::lower_bound(a.begin(), a.end(), x - tol);
  return it != a.end() && std::abs(*it - x) <= tol;
}

BoxLattice BoxLattice::cropped(int axis, double lo, double hi) const
{
  if (!has_plane(axis, lo) || !has_plane(axis, hi) || !(hi > lo)) {
    throw InvalidGeometry(std::string("crop bounds are not lattice planes along ") + axis_name(axis));
  }
  BoxLattice out = *this;
  auto& a = out.axes[axis];
  a.erase(std::remove_if(a.begin(), a.end(), [&](double x) { return x < lo - kPlaneTol || x > hi + kPlaneTol; }),
          a.end());
  return out;
}

std::vector<double> lattice_axis(double lo, double hi, double coarse, const std::vector<RefinementRegion>& refinement,
                                 int axis, const std::vector<double>& required, double grading)
{
  if (!(hi > lo) || !(coarse > 0.0)) {
    throw InvalidGeometry("lattice axis needs positive extent and cell size");
  }
  const double tol = kPlaneTol * std::max(1.0, hi - lo);

  std::vector<double> fixed{lo, hi};
  for (double x : required) {
    if (x > lo + tol && x < hi - tol) {
      fixed.push_back(x);
    }
  }
  std::sort(fixed.begin(), fixed.end());

  std::vector<AxisRegion> regions;
  std::vector<std::pair<double, double>> fine; // node, its region's h
  for (const auto& r : refinement) {
    if (!(r.cell_size > 0.0)) {
      throw InvalidGeometry("refinement cell size must be positive");
    }
    const double rlo = std::max(lo, r.box.min[axis]);
    const double rhi = std::min(hi, r.box.max[axis]);
    if (rhi < rlo) {
      continue;
    }
    const double h = r.cell_size;
    const double anchor = r.anchor ? (*r.anchor)[axis] : r.box.min[axis];
    const long k0 = static_cast<long>(std::floor((rlo - anchor) / h + 1e-9));
    const long k1 = static_cast<long>(std::ceil((rhi - anchor) / h - 1e-9));
    regions.push_back({std::max(lo, anchor + k0 * h), std::min(hi, anchor + k1 * h), h, anchor});
    for (long k = k0; k <= k1; ++k) {
      const double x = anchor + k * h;
      if (x > lo + tol && x < hi - tol) {
        fine.emplace_back(x, h);
      }
    }
  }

  std::vector<double> nodes = fixed;
  for (const auto& [x, h] : fine) {
    // a fine node too close to a fixed plane would create a sliver layer
    const bool clash = std::any_of(fixed.begin(), fixed.end(), [&](double p) { return std::abs(p - x) < 0.25 * h; });
    if (!clash) {
      nodes.push_back(x);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(), [&](double a, double b) { return std::abs(a - b) <= tol; }),
              nodes.end());

  // fill gaps by equidistributing 1/size
  std::vector<double> out;
  constexpr int kSamples = 256;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i];
    const double b = nodes[i + 1];
    out.push_back(a);
    std::array<double, kSamples + 1> cum{};
    const double dx = (b - a) / kSamples;
    for (int s = 0; s < kSamples; ++s) {
      cum[s + 1] = cum[s] + dx / target_size(a + (s + 0.5) * dx, coarse, regions, grading);
    }
    const int n = std::max(1, static_cast<int>(std::ceil(cum[kSamples] - 1e-6)));
    for (int k = 1; k < n; ++k) {
      const double target = cum[kSamples] * k / n;
      const auto it = std::lower_bound(cum.begin(), cum.end(), target);
      const auto s = static_cast<int>(it - cum.begin());
      const double w = (target - cum[s - 1]) / (cum[s] - cum[s - 1]);
      out.push_back(a + (s - 1 + w) * dx);
    }
  }
  out.push_back(nodes.back());
  return out;
}

BoxLattice build_box_lattice(const BoxMeshSpec& spec)
{
  if (!(spec.extents.array() > 0.0).all()) {
    throw InvalidGeometry("box extents must be positive");
  }
  if (!(spec.cell_size > 0.0)) {
    throw InvalidGeometry("cell size must be positive");
  }
  const Box domain{spec.origin, spec.origin + spec.extents};
  for (const auto& r : spec.refinement) {
    if (!(r.cell_size > 0.0)) {
      throw InvalidGeometry("refinement cell size must be positive");
    }
    if (!domain.overlaps(r.box)) {
      throw InvalidGeometry("refinement region lies outside the domain");
    }
  }
  BoxLattice lat;
  for (int a = 0; a < 3; ++a) {
    lat.axes[a] = lattice_axis(domain.min[a], domain.max[a], spec.cell_size, spec.refinement, a,
                               spec.required_planes[a], spec.grading);
  }
  return lat;
}

SubdomainMesh build_lattice_mesh(const BoxLattice& lat)
{
  const int nx = lat.cells(0);
  const int ny = lat.cells(1);
  const int nz = lat.cells(2);
  if (nx < 1 || ny < 1 || nz < 1) {
    throw InvalidGeometry("lattice needs at least one cell per axis");
  }
  auto node_id = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        nodes.emplace_back(lat.axes[0][i], lat.axes[1][j], lat.axes[2][k]);
      }
    }
  }

  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<int> cells;
  cells.reserve(static_cast<std::size_t>(nx) * ny * nz * 24);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        for (const auto& p : perms) {
          std::array<int, 3> ijk{i, j, k};
          std::array<int, 4> tet{};
          tet[0] = node_id(ijk[0], ijk[1], ijk[2]);
          for (int s = 0; s < 3; ++s) {
            ++ijk[p[s]];
            tet[s + 1] = node_id(ijk[0], ijk[1], ijk[2]);
          }
          const Vec3& a = nodes[tet[0]];
          const double det = (nodes[tet[1]] - a).dot((nodes[tet[2]] - a).cross(nodes[tet[3]] - a));
          if (det < 0.0) {
            std::swap(tet[2], tet[3]);
          }
          cells.insert(cells.end(), tet.begin(), tet.end());
        }
      }
    }
  }

  SubdomainMesh m = make_mesh(3, std::move(nodes), std::move(cells));
  const Box b = lat.bounds();
  const double tol = kPlaneTol * b.extents().maxCoeff();
  for (int f = 0; f < m.num_faces(); ++f) {
    if (!m.is_boundary(f)) {
      continue;
    }
    const Vec3& fc = m.face_centers[f];
    for (int a = 0; a < 3; ++a) {
      if (std::abs(fc[a] - b.min[a]) <= tol) {
        m.face_tags[f] = 2 * a + 1;
      } else if (std::abs(fc[a] - b.max[a]) <= tol) {
        m.face_tags[f] = 2 * a + 2;
      }
    }
  }
  return m;
}

SubdomainMesh build_box_mesh(const BoxMeshSpec& spec)
{
  return build_lattice_mesh(build_box_lattice(spec));
}

SubdomainMesh build_box_mesh(const Vec3& extents, double cell_size, const std::vector<RefinementRegion>& refinement)
{
  BoxMeshSpec spec;
  spec.extents = extents;
  spec.cell_size = cell_size;
  spec.refinement = refinement;
  return build_box_mesh(spec);
}

} // namespace mdres
