#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary. None of these call into the library code they check.

#include "mdres/adt.hpp"
#include "mdres/fv.hpp"
#include "mdres/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mdres::oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Potential at `p` on the surface z = 0 of a layer 0 < z < h over an
/// insulator, due to a unit current at `c`, from the images c + 2nh e_z for
/// |n| <= N (rho = 1).
inline double image_potential(const Vec3& p, const Vec3& c, double h, long nmax)
{
  double s = 0.0;
  for (long n = nmax; n >= 1; --n) {
    const Vec3 up = c + Vec3(0, 0, 2.0 * h * static_cast<double>(n));
    const Vec3 dn = c - Vec3(0, 0, 2.0 * h * static_cast<double>(n));
    s += 1.0 / (p - up).norm() + 1.0 / (p - dn).norm();
  }
  s += 1.0 / (p - c).norm();
  return s / (2.0 * kPi);
}

inline double image_rho(double rho, double a, double h, long nmax)
{
  const Vec3 c1(0, 0, 0), p1(a, 0, 0), p2(2 * a, 0, 0), c2(3 * a, 0, 0);
  const double dphi = (image_potential(p1, c1, h, nmax) - image_potential(p1, c2, h, nmax)) -
                      (image_potential(p2, c1, h, nmax) - image_potential(p2, c2, h, nmax));
  return 2.0 * kPi * a * rho * dphi;
}

/// Image sum to convergence: the truncation error behaves like c/N^2, so two
/// levels with Richardson extrapolation remove it.
inline double image_wenner(double rho, double a, double h)
{
  const long n = std::max<long>(2000, static_cast<long>(std::ceil(400.0 * a / h)));
  const double r1 = image_rho(rho, a, h, n);
  const double r2 = image_rho(rho, a, h, 2 * n);
  return (4.0 * r2 - r1) / 3.0;
}

/// Indices of all boxes overlapping `q`, by exhaustive search.
inline std::vector<int> brute_force_overlaps(const std::vector<Box>& boxes, const Box& q)
{
  std::vector<int> out;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i].overlaps(q)) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

/// Exact face fluxes of phi = g.x with sigma per cell (outflow of owner).
inline VecX linear_field_fluxes(const SubdomainMesh& m, const std::vector<double>& sigma, const Vec3& g)
{
  VecX f(m.num_faces());
  for (int i = 0; i < m.num_faces(); ++i) {
    const int owner = m.face_cells[i][0];
    f[i] = -sigma[owner] * m.face_areas[i] * g.dot(m.face_normals[i]);
  }
  return f;
}

/// Cell potentials with their volume-weighted mean removed.
inline VecX centered(const SubdomainMesh& m, const VecX& phi)
{
  double mean = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    mean += m.cell_volumes[c] * phi[c];
  }
  mean /= m.total_volume();
  return phi.head(m.num_cells()).array() - mean;
}

} // namespace mdres::oracle
