#include "mdres/msh_io.hpp"

#include "mdres/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace mdres {

namespace {

/// Whitespace tokenizer that remembers the line each token came from.
class TokenStream {
public:
  explicit TokenStream(std::istream& in)
  {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) {
        if (tok.front() == '"') {
          // quoted physical names may contain blanks
          while (tok.back() != '"' || tok.size() == 1) {
            std::string more;
            if (!(ls >> more)) {
              break;
            }
            tok += " " + more;
          }
        }
        tokens_.push_back({tok, lineno});
      }
    }
    last_line_ = lineno;
  }

  [[nodiscard]] bool done() const { return pos_ >= tokens_.size(); }
  [[nodiscard]] int line() const { return done() ? last_line_ : tokens_[pos_].line; }

  const std::string& next()
  {
    if (done()) {
      throw ParseError("unexpected end of file", last_line_);
    }
    return tokens_[pos_++].text;
  }

  void expect(const std::string& word)
  {
    const int l = line();
    const std::string& t = next();
    if (t != word) {
      throw ParseError("expected '" + word + "' but found '" + t + "'", l);
    }
  }

  long integer()
  {
    const int l = line();
    const std::string& t = next();
    long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
      throw ParseError("expected an integer, found '" + t + "'", l);
    }
    return v;
  }

  double real()
  {
    const int l = line();
    const std::string& t = next();
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) {
        throw std::invalid_argument(t);
      }
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected a number, found '" + t + "'", l);
    }
  }

  void skip_to(const std::string& word)
  {
    while (next() != word) {
    }
  }

private:
  struct Token {
    std::string text;
    int line;
  };
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int last_line_ = 0;
};

int element_dim(long type)
{
  switch (type) {
  case 1:
    return 1;
  case 2:
    return 2;
  case 4:
    return 3;
  default:
    return -1;
  }
}

struct RawElement {
  int dim;
  int tag;
  int line;
  std::vector<int> nodes; // 0-based indices
};

} // namespace

SubdomainMesh read_msh(std::istream& in)
{
  TokenStream ts(in);
  bool have_format = false;
  bool have_nodes = false;
  bool have_elements = false;
  std::map<std::pair<int, int>, int> entity_physical; // (dim, entity) -> physical tag
  std::unordered_map<long, int> node_index;
  std::vector<Vec3> nodes;
  std::vector<RawElement> elements;

  while (!ts.done()) {
    const int section_line = ts.line();
    const std::string section = ts.next();
    if (section == "$MeshFormat") {
      const int l = ts.line();
      const std::string version = ts.next();
      if (version != "4.1") {
        throw ParseError("unsupported MSH version " + version + " (only 4.1 is read)", l);
      }
      const int fl = ts.line();
      if (ts.integer() != 0) {
        throw ParseError("binary MSH files are not supported", fl);
      }
      ts.integer(); // data size
      ts.expect("$EndMeshFormat");
      have_format = true;
    } else if (section == "$PhysicalNames") {
      ts.skip_to("$EndPhysicalNames");
    } else if (section == "$Entities") {
      const long np = ts.integer();
      const long ncurve = ts.integer();
      const long nsurf = ts.integer();
      const long nvol = ts.integer();
      for (long i = 0; i < np; ++i) {
        const int tag = static_cast<int>(ts.integer());
        for (int k = 0; k < 3; ++k) {
          ts.real();
        }
        const long nphys = ts.integer();
        for (long p = 0; p < nphys; ++p) {
          const int phys = static_cast<int>(ts.integer());
          if (p == 0) {
            entity_physical[{0, tag}] = phys;
          }
        }
      }
      const std::array<long, 3> counts{ncurve, nsurf, nvol};
      for (int d = 1; d <= 3; ++d) {
        for (long i = 0; i < counts[d - 1]; ++i) {
          const int tag = static_cast<int>(ts.integer());
          for (int k = 0; k < 6; ++k) {
            ts.real();
          }
          const long nphys = ts.integer();
          for (long p = 0; p < nphys; ++p) {
            const int phys = static_cast<int>(ts.integer());
            if (p == 0) {
              entity_physical[{d, tag}] = phys;
            }
          }
          const long nb = ts.integer();
          for (long b = 0; b < nb; ++b) {
            ts.integer();
          }
        }
      }
      ts.expect("$EndEntities");
    } else if (section == "$Nodes") {
      const long nblocks = ts.integer();
      const long nnodes = ts.integer();
      ts.integer();
      ts.integer();
      nodes.reserve(static_cast<std::size_t>(nnodes));
      for (long b = 0; b < nblocks; ++b) {
        ts.integer();
        ts.integer();
        const int pl = ts.line();
        if (ts.integer() != 0) {
          throw ParseError("parametric node blocks are not supported", pl);
        }
        const long count = ts.integer();
        std::vector<long> ids(static_cast<std::size_t>(count));
        for (auto& id : ids) {
          const int l = ts.line();
          id = ts.integer();
          if (!node_index.emplace(id, static_cast<int>(nodes.size() + (&id - ids.data()))).second) {
            throw ParseError("duplicate node tag " + std::to_string(id), l);
          }
        }
        for (long i = 0; i < count; ++i) {
          const double x = ts.real();
          const double y = ts.real();
          const double z = ts.real();
          nodes.emplace_back(x, y, z);
        }
      }
      if (static_cast<long>(nodes.size()) != nnodes) {
        throw ParseError("node count does not match the $Nodes header", section_line);
      }
      ts.expect("$EndNodes");
      have_nodes = true;
    } else if (section == "$Elements") {
      if (!have_nodes) {
        throw ParseError("$Elements before $Nodes", section_line);
      }
      const long nblocks = ts.integer();
      ts.integer();
      ts.integer();
      ts.integer();
      for (long b = 0; b < nblocks; ++b) {
        const int edim = static_cast<int>(ts.integer());
        const int etag = static_cast<int>(ts.integer());
        const int tl = ts.line();
        const long type = ts.integer();
        const long count = ts.integer();
        const int d = element_dim(type);
        if (d < 0) {
          throw ParseError("unsupported element type " + std::to_string(type) +
                               " (only 1 = line, 2 = triangle, 4 = tetrahedron)",
                           tl);
        }
        if (d != edim) {
          throw ParseError("element type does not match entity dimension", tl);
        }
        const auto it = entity_physical.find({edim, etag});
        const int tag = it != entity_physical.end() ? it->second : etag;
        for (long e = 0; e < count; ++e) {
          RawElement el{d, tag, ts.line(), {}};
          ts.integer(); // element tag
          for (int k = 0; k <= d; ++k) {
            const int l = ts.line();
            const long id = ts.integer();
            const auto ni = node_index.find(id);
            if (ni == node_index.end()) {
              throw ParseError("element references missing node " + std::to_string(id), l);
            }
            el.nodes.push_back(ni->second);
          }
          elements.push_back(std::move(el));
        }
      }
      ts.expect("$EndElements");
      have_elements = true;
    } else {
      throw ParseError("unsupported section " + section, section_line);
    }
  }
  if (!have_format || !have_nodes || !have_elements) {
    throw ParseError("file lacks $MeshFormat, $Nodes or $Elements", ts.line());
  }

  int dim = 0;
  for (const auto& e : elements) {
    dim = std::max(dim, e.dim);
  }
  if (dim == 0) {
    throw ParseError("file contains no elements", ts.line());
  }
  std::vector<int> cells;
  std::vector<int> cell_tags;
  for (const auto& e : elements) {
    if (e.dim != dim) {
      continue;
    }
    if (dim == 3) {
      const Vec3& a = nodes[e.nodes[0]];
      const double det =
          (nodes[e.nodes[1]] - a).dot((nodes[e.nodes[2]] - a).cross(nodes[e.nodes[3]] - a));
      if (det <= 0.0) {
        throw ParseError("inverted or flat tetrahedron", e.line);
      }
    }
    cells.insert(cells.end(), e.nodes.begin(), e.nodes.end());
    cell_tags.push_back(e.tag);
  }

  SubdomainMesh mesh;
  try {
    mesh = make_mesh(dim, std::move(nodes), std::move(cells), std::move(cell_tags));
  } catch (const DegenerateCell& err) {
    throw ParseError("degenerate element (cell " + std::to_string(err.cell()) + ")", ts.line());
  }

  std::map<std::vector<int>, int> face_lookup;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto fn = mesh.face(f);
    face_lookup.emplace(std::vector<int>(fn.begin(), fn.end()), f);
  }
  for (const auto& e : elements) {
    if (e.dim != dim - 1) {
      continue;
    }
    std::vector<int> key = e.nodes;
    std::sort(key.begin(), key.end());
    const auto it = face_lookup.find(key);
    if (it != face_lookup.end()) {
      mesh.face_tags[it->second] = e.tag;
    }
  }
  return mesh;
}

SubdomainMesh load_msh(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return read_msh(in);
}

void write_msh(const SubdomainMesh& mesh, std::ostream& out)
{
  static constexpr std::array<int, 4> kType{0, 1, 2, 4};
  const int dim = mesh.dim;
  std::map<int, std::vector<int>> cells_by_tag;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cells_by_tag[mesh.cell_tags.empty() ? 0 : mesh.cell_tags[c]].push_back(c);
  }
  std::map<int, std::vector<int>> faces_by_tag;
  if (dim > 1) {
    for (int f = 0; f < mesh.num_faces(); ++f) {
      if (mesh.face_tags[f] != tags::kNone) {
        faces_by_tag[mesh.face_tags[f]].push_back(f);
      }
    }
  }
  const std::size_t nblocks = cells_by_tag.size() + faces_by_tag.size();
  std::size_t nelem = static_cast<std::size_t>(mesh.num_cells());
  for (const auto& [t, fs] : faces_by_tag) {
    nelem += fs.size();
  }

  char buf[128];
  out << "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n1 " << mesh.num_nodes() << " 1 " << mesh.num_nodes() << "\n";
  out << dim << " 1 0 " << mesh.num_nodes() << "\n";
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    out << n + 1 << "\n";
  }
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  out << "$EndNodes\n";
  out << "$Elements\n" << nblocks << " " << nelem << " 1 " << nelem << "\n";
  std::size_t id = 1;
  for (const auto& [tag, cs] : cells_by_tag) {
    out << dim << " " << tag << " " << kType[dim] << " " << cs.size() << "\n";
    for (int c : cs) {
      out << id++;
      for (int n : mesh.cell(c)) {
        out << " " << n + 1;
      }
      out << "\n";
    }
  }
  for (const auto& [tag, fs] : faces_by_tag) {
    out << dim - 1 << " " << tag << " " << kType[dim - 1] << " " << fs.size() << "\n";
    for (int f : fs) {
      out << id++;
      for (int n : mesh.face(f)) {
        out << " " << n + 1;
      }
      out << "\n";
    }
  }
  out << "$EndElements\n";
}

void write_msh(const SubdomainMesh& mesh, const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  write_msh(mesh, out);
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

} // namespace mdres
