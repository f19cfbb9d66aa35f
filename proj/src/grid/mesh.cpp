#include "mdres/mesh.hpp"

#include "mdres/errors.hpp"

#include <Eigen/Geometry>

#include <climits>
#include <numeric>
#include <queue>

namespace mdres {

namespace {

struct FaceRecord {
  std::array<int, 3> key;
  int cell;
  int local;
};

Vec3 outward_face_normal(const SubdomainMesh& m, int c, int local)
{
  const auto nodes = m.cell(c);
  const int dim = m.dim;
  // nodes of the face opposite `local`
  std::array<int, 3> fn{};
  int k = 0;
  for (int i = 0; i <= dim; ++i) {
    if (i != local) {
      fn[k++] = nodes[i];
    }
  }
  const Vec3& cc = m.cell_centers[c];
  Vec3 n;
  Vec3 fc = Vec3::Zero();
  for (int i = 0; i < dim; ++i) {
    fc += m.nodes[fn[i]];
  }
  fc /= dim;
  if (dim == 3) {
    n = (m.nodes[fn[1]] - m.nodes[fn[0]]).cross(m.nodes[fn[2]] - m.nodes[fn[0]]);
  } else if (dim == 2) {
    const Vec3 plane = (m.nodes[nodes[1]] - m.nodes[nodes[0]]).cross(m.nodes[nodes[2]] - m.nodes[nodes[0]]);
    n = (m.nodes[fn[1]] - m.nodes[fn[0]]).cross(plane);
  } else {
    n = m.nodes[fn[0]] - cc;
  }
  n.normalize();
  if (n.dot(fc - cc) < 0.0) {
    n = -n;
  }
  return n;
}

} // namespace

Box SubdomainMesh::bounding_box() const
{
  Box b = Box::empty();
  for (const auto& p : nodes) {
    b.expand(p);
  }
  return b;
}

Box SubdomainMesh::cell_box(int c) const
{
  Box b = Box::empty();
  for (int n : cell(c)) {
    b.expand(nodes[n]);
  }
  return b;
}

double SubdomainMesh::total_volume() const
{
  return std::accumulate(cell_volumes.begin(), cell_volumes.end(), 0.0);
}

SubdomainMesh make_mesh(int dim, std::vector<Vec3> nodes, std::vector<int> cell_nodes, std::vector<int> cell_tags)
{
  if (dim < 1 || dim > 3) {
    throw InvalidGeometry("mesh dimension must be 1, 2 or 3");
  }
  SubdomainMesh m;
  m.dim = dim;
  m.nodes = std::move(nodes);
  m.cell_nodes = std::move(cell_nodes);
  if (m.cell_nodes.size() % static_cast<std::size_t>(dim + 1) != 0) {
    throw InvalidGeometry("cell connectivity length is not a multiple of dim+1");
  }
  for (int n : m.cell_nodes) {
    if (n < 0 || n >= m.num_nodes()) {
      throw InvalidGeometry("cell references node " + std::to_string(n) + " which does not exist");
    }
  }
  m.cell_tags = cell_tags.empty() ? std::vector<int>(static_cast<std::size_t>(m.num_cells()), 0) : std::move(cell_tags);
  build_connectivity(m);
  compute_geometry(m);
  return m;
}

void build_connectivity(SubdomainMesh& m)
{
  const int dim = m.dim;
  const int nc = m.num_cells();
  std::vector<FaceRecord> recs;
  recs.reserve(static_cast<std::size_t>(nc) * (dim + 1));
  for (int c = 0; c < nc; ++c) {
    const auto cn = m.cell(c);
    for (int i = 0; i <= dim; ++i) {
      FaceRecord r{{INT_MAX, INT_MAX, INT_MAX}, c, i};
      int k = 0;
      for (int j = 0; j <= dim; ++j) {
        if (j != i) {
          r.key[k++] = cn[j];
        }
      }
      std::sort(r.key.begin(), r.key.begin() + dim);
      recs.push_back(r);
    }
  }
  std::sort(recs.begin(), recs.end(), [](const FaceRecord& a, const FaceRecord& b) {
    return a.key != b.key ? a.key < b.key : a.cell < b.cell;
  });

  m.face_nodes.clear();
  m.face_cells.clear();
  m.cell_faces.assign(static_cast<std::size_t>(nc) * (dim + 1), -1);
  for (std::size_t i = 0; i < recs.size();) {
    std::size_t j = i;
    while (j < recs.size() && recs[j].key == recs[i].key) {
      ++j;
    }
    if (j - i > 2) {
      throw InvalidGeometry("face shared by more than two cells (non-manifold mesh)");
    }
    const int f = static_cast<int>(m.face_cells.size());
    for (int k = 0; k < dim; ++k) {
      m.face_nodes.push_back(recs[i].key[k]);
    }
    std::array<int, 2> fc{recs[i].cell, -1};
    if (j - i == 2) {
      fc[1] = recs[i + 1].cell;
    }
    m.face_cells.push_back(fc);
    for (std::size_t k = i; k < j; ++k) {
      m.cell_faces[static_cast<std::size_t>(recs[k].cell) * (dim + 1) + recs[k].local] = f;
    }
    i = j;
  }
  m.face_tags.assign(m.face_cells.size(), tags::kNone);
}

void compute_geometry(SubdomainMesh& m)
{
  const int dim = m.dim;
  const int nc = m.num_cells();
  const int nf = m.num_faces();
  m.cell_volumes.assign(static_cast<std::size_t>(nc), 0.0);
  m.cell_centers.assign(static_cast<std::size_t>(nc), Vec3::Zero());
  m.cell_diameters.assign(static_cast<std::size_t>(nc), 0.0);
  m.cell_face_normals.assign(static_cast<std::size_t>(nc) * (dim + 1), Vec3::Zero());

  for (int c = 0; c < nc; ++c) {
    const auto cn = m.cell(c);
    Vec3 center = Vec3::Zero();
    double diam = 0.0;
    for (int i = 0; i <= dim; ++i) {
      center += m.nodes[cn[i]];
      for (int j = i + 1; j <= dim; ++j) {
        diam = std::max(diam, (m.nodes[cn[i]] - m.nodes[cn[j]]).norm());
      }
    }
    center /= dim + 1;
    const Vec3& a = m.nodes[cn[0]];
    double measure = 0.0;
    if (dim == 3) {
      measure = std::abs((m.nodes[cn[1]] - a).dot((m.nodes[cn[2]] - a).cross(m.nodes[cn[3]] - a))) / 6.0;
    } else if (dim == 2) {
      measure = 0.5 * (m.nodes[cn[1]] - a).cross(m.nodes[cn[2]] - a).norm();
    } else {
      measure = (m.nodes[cn[1]] - a).norm();
    }
    if (!(measure > 1e-12 * std::pow(diam, dim))) {
      throw DegenerateCell(c);
    }
    m.cell_volumes[c] = measure;
    m.cell_centers[c] = center;
    m.cell_diameters[c] = diam;
  }
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i <= dim; ++i) {
      m.cell_face_normals[static_cast<std::size_t>(c) * (dim + 1) + i] = outward_face_normal(m, c, i);
    }
  }

  m.face_areas.assign(static_cast<std::size_t>(nf), 0.0);
  m.face_centers.assign(static_cast<std::size_t>(nf), Vec3::Zero());
  m.face_normals.assign(static_cast<std::size_t>(nf), Vec3::Zero());
  for (int f = 0; f < nf; ++f) {
    const auto fn = m.face(f);
    Vec3 fc = Vec3::Zero();
    for (int n : fn) {
      fc += m.nodes[n];
    }
    m.face_centers[f] = fc / dim;
    if (dim == 3) {
      m.face_areas[f] = 0.5 * (m.nodes[fn[1]] - m.nodes[fn[0]]).cross(m.nodes[fn[2]] - m.nodes[fn[0]]).norm();
    } else if (dim == 2) {
      m.face_areas[f] = (m.nodes[fn[1]] - m.nodes[fn[0]]).norm();
    } else {
      m.face_areas[f] = 1.0;
    }
    const int owner = m.face_cells[f][0];
    const auto cf = m.faces_of(owner);
    for (int i = 0; i <= dim; ++i) {
      if (cf[i] == f) {
        m.face_normals[f] = m.outward_normal(owner, i);
        break;
      }
    }
  }
}

NodeCells node_cells(const SubdomainMesh& m)
{
  NodeCells nc;
  nc.offsets.assign(static_cast<std::size_t>(m.num_nodes()) + 1, 0);
  for (int n : m.cell_nodes) {
    ++nc.offsets[n + 1];
  }
  std::partial_sum(nc.offsets.begin(), nc.offsets.end(), nc.offsets.begin());
  nc.cells.resize(m.cell_nodes.size());
  std::vector<int> fill(nc.offsets.begin(), nc.offsets.end() - 1);
  for (int c = 0; c < m.num_cells(); ++c) {
    for (int n : m.cell(c)) {
      nc.cells[fill[n]++] = c;
    }
  }
  return nc;
}

MeshInvariantReport check_invariants(const SubdomainMesh& m, double closure_tol)
{
  MeshInvariantReport rep;
  const int dim = m.dim;
  std::vector<int> incidence(static_cast<std::size_t>(m.num_faces()), 0);
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto cf = m.faces_of(c);
    Vec3 closure = Vec3::Zero();
    double area_sum = 0.0;
    for (int i = 0; i <= dim; ++i) {
      const int f = cf[i];
      ++incidence[f];
      if (m.face_cells[f][0] != c && m.face_cells[f][1] != c) {
        rep.ok = false;
        rep.problems.push_back("cell " + std::to_string(c) + " lists face " + std::to_string(f) +
                               " which does not list it back");
      }
      closure += m.face_areas[f] * m.outward_normal(c, i);
      area_sum += m.face_areas[f];
    }
    const double err = closure.norm() / area_sum;
    rep.max_closure_error = std::max(rep.max_closure_error, err);
    if (err > closure_tol) {
      rep.ok = false;
      rep.problems.push_back("cell " + std::to_string(c) + " violates closure: " + std::to_string(err));
    }
  }
  for (int f = 0; f < m.num_faces(); ++f) {
    const int expected = m.is_boundary(f) ? 1 : 2;
    if (incidence[f] != expected) {
      rep.ok = false;
      rep.problems.push_back("face " + std::to_string(f) + " has " + std::to_string(incidence[f]) +
                             " incident cells, expected " + std::to_string(expected));
    }
  }
  rep.min_volume = m.cell_volumes.empty() ? 0.0 : *std::min_element(m.cell_volumes.begin(), m.cell_volumes.end());
  if (!m.cell_volumes.empty() && rep.min_volume <= 0.0) {
    rep.ok = false;
    rep.problems.emplace_back("non-positive cell volume");
  }
  rep.total_volume = m.total_volume();
  return rep;
}

int connected_components(const SubdomainMesh& m, std::vector<int>* labels)
{
  std::vector<int> label(static_cast<std::size_t>(m.num_cells()), -1);
  int count = 0;
  std::queue<int> q;
  for (int s = 0; s < m.num_cells(); ++s) {
    if (label[s] >= 0) {
      continue;
    }
    label[s] = count;
    q.push(s);
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      for (int f : m.faces_of(c)) {
        const auto& fc = m.face_cells[f];
        const int other = fc[0] == c ? fc[1] : fc[0];
        if (other >= 0 && label[other] < 0) {
          label[other] = count;
          q.push(other);
        }
      }
    }
    ++count;
  }
  if (labels != nullptr) {
    *labels = std::move(label);
  }
  return count;
}

} // namespace mdres
