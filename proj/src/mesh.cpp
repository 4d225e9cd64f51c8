#include "chns/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "chns/errors.hpp"

namespace chns {
namespace {

double signed_area(Vec2 a, Vec2 b, Vec2 c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Vec2 outward_normal(Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len = d.norm();
  return {d.y / len, -d.x / len};
}

bool on_open_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = d.dot(d);
  const double cross = d.x * (p.y - a.y) - d.y * (p.x - a.x);
  if (std::abs(cross) > 1e-12 * len2) return false;
  const double t = (p - a).dot(d) / len2;
  return t > 1e-12 && t < 1.0 - 1e-12;
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> elements,
           double max_shape_ratio)
    : vertices_(std::move(vertices)), elements_(std::move(elements)) {
  const int nv = static_cast<int>(vertices_.size());
  if (elements_.empty()) throw TopologyError("mesh has no elements");

  std::set<std::array<int, 3>> seen;
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    auto& el = elements_[e];
    for (int v : el) {
      if (v < 0 || v >= nv) {
        throw TopologyError("element " + std::to_string(e) + " references vertex " +
                            std::to_string(v) + " out of range");
      }
    }
    auto key = el;
    std::sort(key.begin(), key.end());
    if (key[0] == key[1] || key[1] == key[2]) {
      throw TopologyError("element " + std::to_string(e) + " repeats a vertex");
    }
    if (!seen.insert(key).second) {
      throw TopologyError("element " + std::to_string(e) + " is repeated");
    }
    double a = signed_area(vertices_[el[0]], vertices_[el[1]], vertices_[el[2]]);
    if (a < 0.0) {
      std::swap(el[1], el[2]);
      a = -a;
    }
    const double scale = std::max({(vertices_[el[1]] - vertices_[el[0]]).norm(),
                                   (vertices_[el[2]] - vertices_[el[1]]).norm(),
                                   (vertices_[el[0]] - vertices_[el[2]]).norm()});
    if (a <= 1e-14 * scale * scale) {
      throw TopologyError("element " + std::to_string(e) + " is degenerate");
    }
    areas_.push_back(a);
    diameters_.push_back(scale);
    h_max_ = std::max(h_max_, scale);

    const Vec2 p0 = vertices_[el[0]];
    const Vec2 d1 = vertices_[el[1]] - p0;
    const Vec2 d2 = vertices_[el[2]] - p0;
    const double det = d1.x * d2.y - d2.x * d1.y;
    // J = [d1 d2]; inverse row-major.
    inv_jac_.push_back({d2.y / det, -d2.x / det, -d1.y / det, d1.x / det});
  }

  struct Incidence {
    int element;
    int local;
  };
  std::map<std::pair<int, int>, std::vector<Incidence>> edges;
  for (int e = 0; e < static_cast<int>(elements_.size()); ++e) {
    for (int k = 0; k < 3; ++k) {
      const int a = elements_[e][k];
      const int b = elements_[e][(k + 1) % 3];
      edges[{std::min(a, b), std::max(a, b)}].push_back({e, k});
    }
  }

  for (const auto& [key, inc] : edges) {
    if (inc.size() > 2) {
      throw TopologyError("edge (" + std::to_string(key.first) + "," +
                          std::to_string(key.second) + ") shared by more than two elements");
    }
    if (inc.size() == 2) {
      const Incidence& m = inc[0].element < inc[1].element ? inc[0] : inc[1];
      const Incidence& p = inc[0].element < inc[1].element ? inc[1] : inc[0];
      InteriorFace f;
      f.minus = m.element;
      f.plus = p.element;
      f.local_minus = m.local;
      f.local_plus = p.local;
      f.vertices = {elements_[m.element][m.local], elements_[m.element][(m.local + 1) % 3]};
      // Consistently oriented neighbours traverse a shared edge in opposite directions.
      if (elements_[p.element][p.local] != f.vertices[1]) {
        throw TopologyError("inconsistent orientation across edge");
      }
      const Vec2 a = vertices_[f.vertices[0]];
      const Vec2 b = vertices_[f.vertices[1]];
      f.normal = outward_normal(a, b);
      f.length = (b - a).norm();
      interior_.push_back(f);
    } else {
      const Incidence& m = inc[0];
      BoundaryFace f;
      f.element = m.element;
      f.local = m.local;
      f.vertices = {elements_[m.element][m.local], elements_[m.element][(m.local + 1) % 3]};
      const Vec2 a = vertices_[f.vertices[0]];
      const Vec2 b = vertices_[f.vertices[1]];
      f.normal = outward_normal(a, b);
      f.length = (b - a).norm();
      boundary_.push_back(f);
    }
  }

  // A vertex in the interior of a boundary edge is a hanging node.
  for (const auto& f : boundary_) {
    const Vec2 a = vertices_[f.vertices[0]];
    const Vec2 b = vertices_[f.vertices[1]];
    for (int v = 0; v < nv; ++v) {
      if (v == f.vertices[0] || v == f.vertices[1]) continue;
      if (on_open_segment(vertices_[v], a, b)) {
        throw TopologyError("hanging node " + std::to_string(v) + " on edge (" +
                            std::to_string(f.vertices[0]) + "," +
                            std::to_string(f.vertices[1]) + ")");
      }
    }
  }

  for (int e = 0; e < static_cast<int>(elements_.size()); ++e) {
    if (shape_ratio(e) > max_shape_ratio) {
      throw TopologyError("element " + std::to_string(e) + " exceeds shape-regularity bound");
    }
  }
}

double Mesh::total_area() const {
  double s = 0.0;
  for (double a : areas_) s += a;
  return s;
}

std::array<Vec2, 3> Mesh::element_vertices(int e) const {
  const auto& el = elements_[e];
  return {vertices_[el[0]], vertices_[el[1]], vertices_[el[2]]};
}

Vec2 Mesh::to_reference(int e, Vec2 x) const {
  const auto& J = inv_jac_[e];
  const Vec2 d = x - vertices_[elements_[e][0]];
  return {J[0] * d.x + J[1] * d.y, J[2] * d.x + J[3] * d.y};
}

Vec2 Mesh::to_physical(int e, Vec2 ref) const {
  const auto v = element_vertices(e);
  return v[0] + ref.x * (v[1] - v[0]) + ref.y * (v[2] - v[0]);
}

double Mesh::shape_ratio(int e) const {
  const auto v = element_vertices(e);
  const double perimeter = (v[1] - v[0]).norm() + (v[2] - v[1]).norm() + (v[0] - v[2]).norm();
  const double inradius = 2.0 * areas_[e] / perimeter;
  return diameters_[e] / inradius;
}

Mesh structured_unit_square(int n) {
  if (n < 1) throw std::invalid_argument("structured_unit_square: n must be >= 1");
  std::vector<Vec2> verts;
  verts.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      verts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  std::vector<std::array<int, 3>> elems;
  elems.reserve(2 * n * n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      elems.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      elems.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(std::move(verts), std::move(elems));
}

Mesh read_mesh(std::istream& in) {
  std::string token;
  std::size_t nv = 0;
  std::size_t ne = 0;
  if (!(in >> token) || token != "vertices" || !(in >> nv)) {
    throw ParseError("mesh: expected 'vertices N' header");
  }
  std::vector<Vec2> verts(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (!(in >> verts[i].x >> verts[i].y)) {
      throw ParseError("mesh: bad vertex line " + std::to_string(i));
    }
  }
  if (!(in >> token) || token != "elements" || !(in >> ne)) {
    throw ParseError("mesh: expected 'elements M' header");
  }
  std::vector<std::array<int, 3>> elems(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    if (!(in >> elems[i][0] >> elems[i][1] >> elems[i][2])) {
      throw ParseError("mesh: bad element line " + std::to_string(i));
    }
  }
  if (in >> token) throw ParseError("mesh: trailing content '" + token + "'");
  return Mesh(std::move(verts), std::move(elems));
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("mesh: cannot open " + path.string());
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  std::ostringstream s;
  s.precision(17);
  s << "vertices " << mesh.num_vertices() << "\n";
  for (const auto& v : mesh.vertices()) s << v.x << " " << v.y << "\n";
  s << "elements " << mesh.num_elements() << "\n";
  for (const auto& e : mesh.elements()) s << e[0] << " " << e[1] << " " << e[2] << "\n";
  out << s.str();
}

}  // namespace chns
