#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace mdres {

using Vec3 = Eigen::Vector3d;

/// Axis-aligned box in metres.
struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  static Box empty()
  {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {Vec3::Constant(inf), Vec3::Constant(-inf)};
  }

  void expand(const Vec3& p)
  {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }

  [[nodiscard]] Vec3 extents() const { return max - min; }
  [[nodiscard]] Vec3 center() const { return 0.5 * (min + max); }
  [[nodiscard]] double volume() const { return extents().prod(); }

  [[nodiscard]] bool contains(const Vec3& p, double tol = 0.0) const
  {
    return (p.array() >= min.array() - tol).all() && (p.array() <= max.array() + tol).all();
  }

  [[nodiscard]] bool overlaps(const Box& o) const
  {
    return (min.array() <= o.max.array()).all() && (o.min.array() <= max.array()).all();
  }

  [[nodiscard]] Box inflated(double d) const
  {
    return {min - Vec3::Constant(d), max + Vec3::Constant(d)};
  }
};

inline const char* axis_name(int axis)
{
  static constexpr std::array<const char*, 3> names{"x", "y", "z"};
  return names.at(static_cast<std::size_t>(axis));
}

} // namespace mdres
