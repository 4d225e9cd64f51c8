#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

namespace chns {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

/// Face shared by two elements. `normal` points from `minus` into `plus`.
/// Local face k of an element is the edge (v_k, v_{k+1 mod 3}).
struct InteriorFace {
  int minus = -1;
  int plus = -1;
  int local_minus = -1;
  int local_plus = -1;
  std::array<int, 2> vertices{};
  Vec2 normal;
  double length = 0.0;
};

struct BoundaryFace {
  int element = -1;
  int local = -1;
  std::array<int, 2> vertices{};
  Vec2 normal;  // outward
  double length = 0.0;
};

/// Conforming triangulation of a polygonal domain. Immutable after
/// construction. Elements are stored counterclockwise.
class Mesh {
 public:
  /// Builds connectivity from raw vertex/element arrays. Clockwise elements
  /// are reoriented. Throws TopologyError on degenerate, repeated, or
  /// nonconforming elements.
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> elements,
       double max_shape_ratio = 50.0);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& elements() const { return elements_; }
  const std::vector<InteriorFace>& interior_faces() const { return interior_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_; }

  std::size_t num_elements() const { return elements_.size(); }
  std::size_t num_vertices() const { return vertices_.size(); }

  double area(int e) const { return areas_[e]; }
  double diameter(int e) const { return diameters_[e]; }
  double h_max() const { return h_max_; }
  double total_area() const;

  /// Element vertex coordinates in storage order.
  std::array<Vec2, 3> element_vertices(int e) const;

  /// Reference coordinates (xi, eta) of physical point x in element e, with
  /// x = v0 + xi (v1 - v0) + eta (v2 - v0).
  Vec2 to_reference(int e, Vec2 x) const;
  Vec2 to_physical(int e, Vec2 ref) const;

  /// Row-major inverse Jacobian of the reference map: grad_x = J^{-T} grad_ref.
  const std::array<double, 4>& inverse_jacobian(int e) const { return inv_jac_[e]; }
  double jacobian_determinant(int e) const { return 2.0 * areas_[e]; }

  /// diameter / inradius for element e.
  double shape_ratio(int e) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<InteriorFace> interior_;
  std::vector<BoundaryFace> boundary_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  std::vector<std::array<double, 4>> inv_jac_;
  double h_max_ = 0.0;
};

/// 2 n^2 right triangles tiling [0,1]^2 (each cell split along its
/// lower-left to upper-right diagonal).
Mesh structured_unit_square(int n);

/// Text format: `vertices N` / N lines `x y` / `elements M` / M lines `i j k`.
Mesh load_mesh(const std::filesystem::path& path);
Mesh read_mesh(std::istream& in);
void write_mesh(std::ostream& out, const Mesh& mesh);

}  // namespace chns
