#include "mdres/electrode_map.hpp"

#include "mdres/errors.hpp"

#include <map>

namespace mdres {

namespace {

/// Distance between segments p0-p1 and q0-q1.
double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1)
{
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a <= 0.0 && e <= 0.0) {
    return r.norm();
  }
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

std::array<Vec3, 4> tet_of(const SubdomainMesh& m, int c)
{
  const auto n = m.cell(c);
  return {m.nodes[n[0]], m.nodes[n[1]], m.nodes[n[2]], m.nodes[n[3]]};
}

} // namespace

ClipInterval tet_segment_interval(const std::array<Vec3, 4>& tet, const Vec3& a, const Vec3& b)
{
  double diam = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      diam = std::max(diam, (tet[i] - tet[j]).norm());
    }
  }
  const double vol6 = std::abs((tet[1] - tet[0]).dot((tet[2] - tet[0]).cross(tet[3] - tet[0])));
  if (!(vol6 > 6e-12 * diam * diam * diam)) {
    throw DegenerateCell(-1);
  }
  const double tol = 1e-12 * diam;
  ClipInterval iv{0.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    const Vec3& q0 = tet[(i + 1) % 4];
    const Vec3& q1 = tet[(i + 2) % 4];
    const Vec3& q2 = tet[(i + 3) % 4];
    Vec3 n = (q1 - q0).cross(q2 - q0).normalized();
    if (n.dot(tet[i] - q0) < 0.0) {
      n = -n;
    }
    const double sa = n.dot(a - q0) + tol;
    const double sb = n.dot(b - q0) + tol;
    if (sa < 0.0 && sb < 0.0) {
      return {0.0, 0.0};
    }
    if (sa >= 0.0 && sb >= 0.0) {
      continue;
    }
    const double t = sa / (sa - sb);
    if (sa < 0.0) {
      iv.t0 = std::max(iv.t0, t);
    } else {
      iv.t1 = std::min(iv.t1, t);
    }
  }
  if (iv.t1 < iv.t0) {
    return {0.0, 0.0};
  }
  return iv;
}

double tet_segment_clip(const std::array<Vec3, 4>& tet, const Vec3& a, const Vec3& b)
{
  const ClipInterval iv = tet_segment_interval(tet, a, b);
  return iv.empty() ? 0.0 : (iv.t1 - iv.t0) * (b - a).norm();
}

std::vector<Box> cell_boxes(const SubdomainMesh& mesh)
{
  std::vector<Box> boxes(static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    boxes[c] = mesh.cell_box(c);
  }
  return boxes;
}

ElectrodeSegmentMap map_electrode(const std::vector<Vec3>& polyline, const SubdomainMesh& bulk, const Adt& adt)
{
  if (bulk.dim != 3) {
    throw InvalidGeometry("electrodes are mapped onto 3D meshes only");
  }
  if (polyline.size() < 2) {
    throw InvalidGeometry("an electrode polyline needs at least two points");
  }
  ElectrodeSegmentMap map;
  std::map<std::pair<int, int>, double> acc;
  double residual = 0.0;
  map.min_edge_distance = std::numeric_limits<double>::infinity();
  static constexpr std::array<std::array<int, 2>, 6> kEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

  for (std::size_t s = 0; s + 1 < polyline.size(); ++s) {
    const Vec3& a = polyline[s];
    const Vec3& b = polyline[s + 1];
    const double len = (b - a).norm();
    if (!(len > 0.0)) {
      throw InvalidGeometry("electrode polyline has a zero-length segment");
    }
    map.total_length += len;
    Box sb = Box::empty();
    sb.expand(a);
    sb.expand(b);
    const auto cand = adt.candidates(sb.inflated(1e-12 * len));

    std::vector<std::pair<int, ClipInterval>> hits;
    std::vector<double> breaks{0.0, 1.0};
    for (int c : cand) {
      const ClipInterval iv = tet_segment_interval(tet_of(bulk, c), a, b);
      if (!iv.empty()) {
        hits.emplace_back(c, iv);
        breaks.push_back(iv.t0);
        breaks.push_back(iv.t1);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double u = breaks[k];
      const double v = breaks[k + 1];
      if (!(v > u)) {
        continue;
      }
      const double mid = 0.5 * (u + v);
      int host = -1;
      for (const auto& [c, iv] : hits) {
        if (iv.t0 <= mid && mid <= iv.t1) {
          host = c; // hits are in ascending cell order
          break;
        }
      }
      if (host < 0) {
        residual += (v - u) * len;
        continue;
      }
      acc[{static_cast<int>(s), host}] += (v - u) * len;
    }
    for (const auto& [c, iv] : hits) {
      if (acc.count({static_cast<int>(s), c}) == 0) {
        continue;
      }
      const auto tn = bulk.cell(c);
      for (const auto& e : kEdges) {
        map.min_edge_distance =
            std::min(map.min_edge_distance, segment_distance(a, b, bulk.nodes[tn[e[0]]], bulk.nodes[tn[e[1]]]));
      }
    }
  }
  if (residual > 1e-10 * map.total_length) {
    throw UnmappedElectrode("electrode polyline leaves the mesh over " + std::to_string(residual) + " m",
                            residual);
  }
  if (acc.empty()) {
    throw UnmappedElectrode("electrode polyline intersects no cell", map.total_length);
  }
  for (const auto& [key, len] : acc) {
    map.entries.push_back({key.first, key.second, len});
  }
  return map;
}

SubdomainMesh electrode_mesh(const std::vector<Vec3>& polyline)
{
  if (polyline.size() < 2) {
    throw InvalidGeometry("an electrode polyline needs at least two points");
  }
  std::vector<int> cells;
  for (int i = 0; i + 1 < static_cast<int>(polyline.size()); ++i) {
    cells.push_back(i);
    cells.push_back(i + 1);
  }
  SubdomainMesh m = make_mesh(1, polyline, std::move(cells));
  const int last = m.num_nodes() - 1;
  for (int f = 0; f < m.num_faces(); ++f) {
    if (!m.is_boundary(f)) {
      continue;
    }
    if (m.face(f)[0] == 0) {
      m.face_tags[f] = tags::kElectrodeTop;
    } else if (m.face(f)[0] == last) {
      m.face_tags[f] = tags::kElectrodeTip;
    }
  }
  return m;
}

} // namespace mdres
