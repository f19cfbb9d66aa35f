#include "mdres/fv.hpp"

#include "mdres/errors.hpp"

#include "../detail/parallel.hpp"

#include <Eigen/Dense>

namespace mdres {

namespace {

using Triplet = Eigen::Triplet<double>;
constexpr int kChunk = 512;

int local_index(const SubdomainMesh& m, int cell, int face)
{
  const auto cf = m.faces_of(cell);
  for (int i = 0; i <= m.dim; ++i) {
    if (cf[i] == face) {
      return i;
    }
  }
  throw AssemblyMismatch("face " + std::to_string(face) + " is not a face of cell " + std::to_string(cell));
}

SpMat from_chunks(int rows, int cols, const std::vector<std::vector<Triplet>>& chunks)
{
  std::size_t total = 0;
  for (const auto& c : chunks) {
    total += c.size();
  }
  std::vector<Triplet> all;
  all.reserve(total);
  for (const auto& c : chunks) {
    all.insert(all.end(), c.begin(), c.end());
  }
  SpMat m(rows, cols);
  m.setFromTriplets(all.begin(), all.end());
  return m;
}

SpMat boundary_identity(const SubdomainMesh& m)
{
  std::vector<Triplet> t;
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.is_boundary(f)) {
      t.emplace_back(f, f, 1.0);
    }
  }
  SpMat b(m.num_faces(), m.num_faces());
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

/// Continuity point of the subface of face f attached to vertex v.
Vec3 subface_point(const SubdomainMesh& m, int f, int v)
{
  const auto fn = m.face(f);
  const Vec3& pv = m.nodes[v];
  if (m.dim == 1) {
    return pv;
  }
  if (m.dim == 2) {
    const int w = fn[0] == v ? fn[1] : fn[0];
    return 0.75 * pv + 0.25 * m.nodes[w];
  }
  // centroid of the quadrilateral (v, edge midpoints, face centroid)
  Vec3 others = Vec3::Zero();
  for (int n : fn) {
    if (n != v) {
      others += m.nodes[n];
    }
  }
  return (11.0 / 18.0) * pv + (7.0 / 36.0) * others;
}

} // namespace

void MaterialField::validate(const SubdomainMesh& mesh) const
{
  if (static_cast<int>(sigma.size()) != mesh.num_cells()) {
    throw InvalidGeometry("material field has " + std::to_string(sigma.size()) + " entries for " +
                          std::to_string(mesh.num_cells()) + " cells");
  }
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw InvalidGeometry("conductivity must be positive and finite");
    }
  }
}

const char* scheme_name(Scheme s) { return s == Scheme::Tpfa ? "tpfa" : "mpfa"; }

Scheme parse_scheme(const std::string& name)
{
  if (name == "tpfa") {
    return Scheme::Tpfa;
  }
  if (name == "mpfa") {
    return Scheme::Mpfa;
  }
  throw ConfigError("unknown scheme '" + name + "' (expected tpfa or mpfa)");
}

SpMat divergence(const SubdomainMesh& m)
{
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(m.num_faces()) * 2);
  for (int f = 0; f < m.num_faces(); ++f) {
    t.emplace_back(m.face_cells[f][0], f, 1.0);
    if (m.face_cells[f][1] >= 0) {
      t.emplace_back(m.face_cells[f][1], f, -1.0);
    }
  }
  SpMat d(m.num_cells(), m.num_faces());
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

double half_transmissibility(const SubdomainMesh& m, int cell, int local_face, double sigma)
{
  const int f = m.faces_of(cell)[local_face];
  const Vec3 d = m.face_centers[f] - m.cell_centers[cell];
  return sigma * m.face_areas[f] * d.dot(m.outward_normal(cell, local_face)) / d.squaredNorm();
}

DiscreteOperator tpfa_assemble(const SubdomainMesh& m, const MaterialField& mat, const AssemblyOptions& opt)
{
  mat.validate(m);
  const int nf = m.num_faces();
  const int nchunks = (nf + kChunk - 1) / kChunk;
  std::vector<std::vector<Triplet>> chunks(static_cast<std::size_t>(nchunks));
  std::vector<std::vector<int>> bad(static_cast<std::size_t>(nchunks));
  detail::parallel_for(nchunks, opt.threads, [&](int ch) {
    auto& t = chunks[ch];
    for (int f = ch * kChunk; f < std::min(nf, (ch + 1) * kChunk); ++f) {
      if (m.is_boundary(f)) {
        continue;
      }
      const int k = m.face_cells[f][0];
      const int l = m.face_cells[f][1];
      const double ak = half_transmissibility(m, k, local_index(m, k, f), mat.sigma[k]);
      const double al = half_transmissibility(m, l, local_index(m, l, f), mat.sigma[l]);
      if (!(ak > 0.0) || !(al > 0.0)) {
        bad[ch].push_back(f);
      }
      const double tr = ak * al / (ak + al);
      t.emplace_back(f, k, tr);
      t.emplace_back(f, l, -tr);
    }
  });
  DiscreteOperator op;
  op.flux = from_chunks(nf, m.num_cells(), chunks);
  op.bound_flux = boundary_identity(m);
  op.div = divergence(m);
  for (const auto& b : bad) {
    op.ill_conditioned_faces.insert(op.ill_conditioned_faces.end(), b.begin(), b.end());
  }
  return op;
}

DiscreteOperator mpfa_o_assemble(const SubdomainMesh& m, const MaterialField& mat, const AssemblyOptions& opt)
{
  mat.validate(m);
  const int dim = m.dim;
  const NodeCells nc = node_cells(m);
  const int nv = m.num_nodes();
  const int nchunks = (nv + kChunk - 1) / kChunk;
  std::vector<std::vector<Triplet>> flux_chunks(static_cast<std::size_t>(nchunks));
  std::vector<std::vector<Triplet>> bound_chunks(static_cast<std::size_t>(nchunks));

  detail::parallel_for(nchunks, opt.threads, [&](int ch) {
    struct Subface {
      int face;
      double area;
      Vec3 point;
    };
    struct Subcell {
      int cell;
      std::array<int, 3> sub{};   // local subface ids
      std::array<int, 3> local{}; // local face index in the cell
      Eigen::Matrix<double, 3, Eigen::Dynamic> grad; // 3 x dim
    };
    std::vector<Subface> subs;
    std::vector<Subcell> subcells;
    std::vector<int> bfaces;

    for (int v = ch * kChunk; v < std::min(nv, (ch + 1) * kChunk); ++v) {
      const auto cells = nc.of(v);
      if (cells.empty()) {
        continue;
      }
      subs.clear();
      subcells.clear();
      bfaces.clear();
      auto sub_of = [&](int f) {
        for (std::size_t s = 0; s < subs.size(); ++s) {
          if (subs[s].face == f) {
            return static_cast<int>(s);
          }
        }
        subs.push_back({f, m.face_areas[f] / dim, subface_point(m, f, v)});
        return static_cast<int>(subs.size()) - 1;
      };
      for (int c : cells) {
        Subcell sc;
        sc.cell = c;
        const auto cn = m.cell(c);
        const auto cf = m.faces_of(c);
        int k = 0;
        for (int i = 0; i <= dim; ++i) {
          if (cn[i] != v) {
            sc.local[k] = i;
            sc.sub[k] = sub_of(cf[i]);
            ++k;
          }
        }
        Eigen::Matrix<double, Eigen::Dynamic, 3> d(dim, 3);
        for (int r = 0; r < dim; ++r) {
          d.row(r) = (subs[sc.sub[r]].point - m.cell_centers[c]).transpose();
        }
        const Eigen::MatrixXd gram = d * d.transpose();
        sc.grad = d.transpose() * gram.inverse();
        subcells.push_back(std::move(sc));
      }
      const int ns = static_cast<int>(subs.size());
      const int ncell = static_cast<int>(subcells.size());
      std::vector<int> bcol(static_cast<std::size_t>(ns), -1);
      for (int s = 0; s < ns; ++s) {
        if (m.is_boundary(subs[s].face)) {
          bcol[s] = static_cast<int>(bfaces.size());
          bfaces.push_back(subs[s].face);
        }
      }
      const int nb = static_cast<int>(bfaces.size());

      // w(j, k): flux weights of subcell j through its k-th subface
      std::vector<Eigen::VectorXd> w(static_cast<std::size_t>(ncell) * dim);
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ns, ns);
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(ns, ncell);
      Eigen::MatrixXd cq = Eigen::MatrixXd::Zero(ns, std::max(nb, 1));
      for (int j = 0; j < ncell; ++j) {
        const Subcell& sc = subcells[j];
        for (int k = 0; k < dim; ++k) {
          const int s = sc.sub[k];
          const Vec3& n = m.outward_normal(sc.cell, sc.local[k]);
          Eigen::VectorXd wk = -mat.sigma[sc.cell] * subs[s].area * (sc.grad.transpose() * n);
          for (int r = 0; r < dim; ++r) {
            a(s, sc.sub[r]) += wk[r];
          }
          b(s, j) += wk.sum();
          w[static_cast<std::size_t>(j) * dim + k] = std::move(wk);
        }
      }
      for (int s = 0; s < ns; ++s) {
        if (bcol[s] >= 0) {
          cq(s, bcol[s]) = subs[s].area / m.face_areas[subs[s].face];
        }
      }
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
      const double amax = a.cwiseAbs().maxCoeff();
      if (!(lu.matrixLU().diagonal().cwiseAbs().minCoeff() >= 1e-13 * amax)) {
        throw SingularInteractionRegion(v);
      }
      const Eigen::MatrixXd x = lu.solve(b);
      const Eigen::MatrixXd y = nb > 0 ? Eigen::MatrixXd(lu.solve(cq)) : Eigen::MatrixXd();

      for (int j = 0; j < ncell; ++j) {
        const Subcell& sc = subcells[j];
        for (int k = 0; k < dim; ++k) {
          const int s = sc.sub[k];
          const int f = subs[s].face;
          if (m.is_boundary(f) || m.face_cells[f][0] != sc.cell) {
            continue;
          }
          const Eigen::VectorXd& wk = w[static_cast<std::size_t>(j) * dim + k];
          for (int c = 0; c < ncell; ++c) {
            double coef = c == j ? -wk.sum() : 0.0;
            for (int r = 0; r < dim; ++r) {
              coef += wk[r] * x(sc.sub[r], c);
            }
            if (coef != 0.0) {
              flux_chunks[ch].emplace_back(f, subcells[c].cell, coef);
            }
          }
          for (int bb = 0; bb < nb; ++bb) {
            double coef = 0.0;
            for (int r = 0; r < dim; ++r) {
              coef += wk[r] * y(sc.sub[r], bb);
            }
            if (coef != 0.0) {
              bound_chunks[ch].emplace_back(f, bfaces[bb], coef);
            }
          }
        }
      }
    }
  });

  DiscreteOperator op;
  op.flux = from_chunks(m.num_faces(), m.num_cells(), flux_chunks);
  bound_chunks.emplace_back();
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.is_boundary(f)) {
      bound_chunks.back().emplace_back(f, f, 1.0);
    }
  }
  op.bound_flux = from_chunks(m.num_faces(), m.num_faces(), bound_chunks);
  op.div = divergence(m);
  return op;
}

DiscreteOperator assemble(Scheme scheme, const SubdomainMesh& mesh, const MaterialField& material,
                          const AssemblyOptions& opt)
{
  return scheme == Scheme::Tpfa ? tpfa_assemble(mesh, material, opt) : mpfa_o_assemble(mesh, material, opt);
}

VecX boundary_outflow(const SubdomainMesh& m, const BoundaryFluxSpec& inflow)
{
  VecX q = VecX::Zero(m.num_faces());
  for (const auto& [tag, value] : inflow) {
    bool found = false;
    for (int f = 0; f < m.num_faces(); ++f) {
      if (m.is_boundary(f) && m.face_tags[f] == tag) {
        q[f] -= value * m.face_areas[f];
        found = true;
      }
    }
    if (!found) {
      throw UnknownBoundaryTag(tag);
    }
  }
  return q;
}

VecX neumann_rhs(const SubdomainMesh& m, const BoundaryFluxSpec& inflow)
{
  const VecX q = boundary_outflow(m, inflow);
  VecX b = VecX::Zero(m.num_cells());
  for (int f = 0; f < m.num_faces(); ++f) {
    if (q[f] != 0.0) {
      b[m.face_cells[f][0]] -= q[f];
    }
  }
  return b;
}

VecX reconstruct_fluxes(const DiscreteOperator& op, const VecX& phi) { return op.face_fluxes(phi); }

VecX reconstruct_fluxes(const DiscreteOperator& op, const VecX& phi, const VecX& q)
{
  return op.face_fluxes(phi, q);
}

VecX balance_residual(const DiscreteOperator& op, const VecX& face_flux, const VecX& sources)
{
  return op.div * face_flux - sources;
}

std::vector<Vec3> cell_current_density(const SubdomainMesh& m, const VecX& face_flux)
{
  std::vector<Vec3> j(static_cast<std::size_t>(m.num_cells()), Vec3::Zero());
  for (int c = 0; c < m.num_cells(); ++c) {
    Vec3 acc = Vec3::Zero();
    for (int f : m.faces_of(c)) {
      acc += m.face_sign(c, f) * face_flux[f] * (m.face_centers[f] - m.cell_centers[c]);
    }
    j[c] = acc / m.cell_volumes[c];
  }
  return j;
}

} // namespace mdres
