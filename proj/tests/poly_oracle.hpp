#pragma once
// Exact integration oracle for the DG forms on small meshes. Fields are
// elementwise polynomials in monomial form; every integral is computed in
// closed form (affine pull-back of monomials, i! j! / (i + j + 2)! on the
// reference triangle, antiderivatives on edges). Shares no code with the
// assembly beyond the Vec2 type.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "chns/dgspace.hpp"
#include "chns/mesh.hpp"

namespace oracle {

using chns::Vec2;

constexpr int kMaxDeg = 10;

/// Bivariate polynomial sum a_ij x^i y^j, i + j <= kMaxDeg.
struct Poly {
  std::array<double, (kMaxDeg + 1) * (kMaxDeg + 1)> a{};

  double& at(int i, int j) { return a[i * (kMaxDeg + 1) + j]; }
  double at(int i, int j) const { return a[i * (kMaxDeg + 1) + j]; }

  static Poly constant(double c) {
    Poly p;
    p.at(0, 0) = c;
    return p;
  }
  static Poly affine(double c0, double cx, double cy) {
    Poly p;
    p.at(0, 0) = c0;
    p.at(1, 0) = cx;
    p.at(0, 1) = cy;
    return p;
  }

  double operator()(Vec2 x) const {
    double s = 0.0, xp = 1.0;
    for (int i = 0; i <= kMaxDeg; ++i, xp *= x.x) {
      double yp = 1.0;
      for (int j = 0; i + j <= kMaxDeg; ++j, yp *= x.y) s += at(i, j) * xp * yp;
    }
    return s;
  }
  Poly dx() const {
    Poly p;
    for (int i = 1; i <= kMaxDeg; ++i)
      for (int j = 0; i + j <= kMaxDeg; ++j) p.at(i - 1, j) = i * at(i, j);
    return p;
  }
  Poly dy() const {
    Poly p;
    for (int i = 0; i <= kMaxDeg; ++i)
      for (int j = 1; i + j <= kMaxDeg; ++j) p.at(i, j - 1) = j * at(i, j);
    return p;
  }
};

inline Poly operator+(const Poly& p, const Poly& q) {
  Poly r;
  for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] = p.a[k] + q.a[k];
  return r;
}
inline Poly operator-(const Poly& p, const Poly& q) {
  Poly r;
  for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] = p.a[k] - q.a[k];
  return r;
}
inline Poly operator*(double s, const Poly& p) {
  Poly r;
  for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] = s * p.a[k];
  return r;
}
inline Poly operator*(const Poly& p, const Poly& q) {
  Poly r;
  for (int i = 0; i <= kMaxDeg; ++i)
    for (int j = 0; i + j <= kMaxDeg; ++j) {
      if (p.at(i, j) == 0.0) continue;
      for (int k = 0; i + k <= kMaxDeg; ++k)
        for (int l = 0; i + j + k + l <= kMaxDeg; ++l) r.at(i + k, j + l) += p.at(i, j) * q.at(k, l);
    }
  return r;
}

struct VPoly {
  Poly x, y;
};
inline Poly dot(const VPoly& u, const VPoly& v) { return u.x * v.x + u.y * v.y; }
inline Poly dot(const VPoly& u, Vec2 n) { return n.x * u.x + n.y * u.y; }
inline Poly div(const VPoly& u) { return u.x.dx() + u.y.dy(); }
inline Poly grad_dot(const Poly& p, const Poly& q) { return p.dx() * q.dx() + p.dy() * q.dy(); }
inline Poly grad_n(const Poly& p, Vec2 n) { return n.x * p.dx() + n.y * p.dy(); }

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// Composes p with the affine map (xi, eta) -> a + xi b + eta c.
inline Poly pull_back(const Poly& p, Vec2 a, Vec2 b, Vec2 c) {
  const Poly X = Poly::affine(a.x, b.x, c.x);
  const Poly Y = Poly::affine(a.y, b.y, c.y);
  std::array<Poly, kMaxDeg + 1> xp, yp;
  xp[0] = yp[0] = Poly::constant(1.0);
  for (int k = 1; k <= kMaxDeg; ++k) {
    xp[k] = xp[k - 1] * X;
    yp[k] = yp[k - 1] * Y;
  }
  Poly r;
  for (int i = 0; i <= kMaxDeg; ++i)
    for (int j = 0; i + j <= kMaxDeg; ++j)
      if (p.at(i, j) != 0.0) r = r + p.at(i, j) * (xp[i] * yp[j]);
  return r;
}

/// Exact integral over the triangle (A, B, C).
inline double integrate_triangle(const Poly& p, const std::array<Vec2, 3>& t) {
  const Vec2 b{t[1].x - t[0].x, t[1].y - t[0].y};
  const Vec2 c{t[2].x - t[0].x, t[2].y - t[0].y};
  const Poly r = pull_back(p, t[0], b, c);
  const double det = std::abs(b.x * c.y - b.y * c.x);
  double s = 0.0;
  for (int i = 0; i <= kMaxDeg; ++i)
    for (int j = 0; i + j <= kMaxDeg; ++j)
      s += r.at(i, j) * factorial(i) * factorial(j) / factorial(i + j + 2);
  return det * s;
}

/// Coefficients in s of p(P + s (Q - P)), s in [0, 1].
inline std::array<double, kMaxDeg + 1> restrict_to_edge(const Poly& p, Vec2 P, Vec2 Q) {
  const Poly r = pull_back(p, P, {Q.x - P.x, Q.y - P.y}, {0.0, 0.0});
  std::array<double, kMaxDeg + 1> u{};
  for (int i = 0; i <= kMaxDeg; ++i) u[i] = r.at(i, 0);
  return u;
}

/// Exact integral of p over the segment s in [s0, s1] of edge PQ (arc length).
inline double integrate_edge(const Poly& p, Vec2 P, Vec2 Q, double s0 = 0.0, double s1 = 1.0) {
  const auto u = restrict_to_edge(p, P, Q);
  double s = 0.0;
  for (int k = 0; k <= kMaxDeg; ++k) s += u[k] * (std::pow(s1, k + 1) - std::pow(s0, k + 1)) / (k + 1);
  return std::hypot(Q.x - P.x, Q.y - P.y) * s;
}

/// Real roots in (0, 1) of a polynomial in s of degree <= 2.
inline std::vector<double> roots_01(const std::array<double, kMaxDeg + 1>& u) {
  for (int k = 3; k <= kMaxDeg; ++k) {
    if (std::abs(u[k]) > 1e-13) throw std::runtime_error("oracle: indicator degree above 2");
  }
  std::vector<double> r;
  const double a = u[2], b = u[1], c = u[0];
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return r;
  if (std::abs(a) <= 1e-14 * scale) {
    if (std::abs(b) > 1e-14 * scale) r.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      // Cancellation-free form of the quadratic formula.
      const double qq = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      r.push_back(qq / a);
      if (qq != 0.0) r.push_back(c / qq);
    }
  }
  std::vector<double> inside;
  for (double x : r)
    if (x > 1e-12 && x < 1.0 - 1e-12) inside.push_back(x);
  return inside;
}

inline double eval_edge_poly(const std::array<double, kMaxDeg + 1>& u, double s) {
  double r = 0.0;
  for (int k = kMaxDeg; k >= 0; --k) r = r * s + u[k];
  return r;
}

/// Topology rebuilt from scratch: elements as vertex triples.
struct OracleMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> elements;

  struct Edge {
    int minus, plus;  // plus = -1 on the boundary
    Vec2 P, Q;
    Vec2 normal;      // unit, out of `minus`
    double length() const { return std::hypot(Q.x - P.x, Q.y - P.y); }
  };

  std::array<Vec2, 3> tri(int e) const {
    return {vertices[elements[e][0]], vertices[elements[e][1]], vertices[elements[e][2]]};
  }

  Vec2 centroid(int e) const {
    const auto t = tri(e);
    return {(t[0].x + t[1].x + t[2].x) / 3.0, (t[0].y + t[1].y + t[2].y) / 3.0};
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (int e = 0; e < static_cast<int>(elements.size()); ++e) {
      for (int k = 0; k < 3; ++k) {
        const int a = elements[e][k], b = elements[e][(k + 1) % 3];
        int other = -1;
        for (int f = 0; f < static_cast<int>(elements.size()); ++f) {
          if (f == e) continue;
          const auto& el = elements[f];
          if (std::count(el.begin(), el.end(), a) && std::count(el.begin(), el.end(), b)) other = f;
        }
        if (other >= 0 && other < e) continue;  // counted from the lower index
        Edge ed{e, other, vertices[a], vertices[b], {}};
        const double L = ed.length();
        Vec2 n{(ed.Q.y - ed.P.y) / L, -(ed.Q.x - ed.P.x) / L};
        const Vec2 mid{(ed.P.x + ed.Q.x) / 2, (ed.P.y + ed.Q.y) / 2};
        const Vec2 c = centroid(e);
        if (n.x * (mid.x - c.x) + n.y * (mid.y - c.y) < 0) n = {-n.x, -n.y};
        ed.normal = n;
        out.push_back(ed);
      }
    }
    return out;
  }

  int locate(Vec2 x) const {
    for (int e = 0; e < static_cast<int>(elements.size()); ++e) {
      const auto t = tri(e);
      auto cross = [](Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
      const double d0 = cross(t[0], t[1], x), d1 = cross(t[1], t[2], x), d2 = cross(t[2], t[0], x);
      const bool neg = d0 < -1e-14 || d1 < -1e-14 || d2 < -1e-14;
      const bool pos = d0 > 1e-14 || d1 > 1e-14 || d2 > 1e-14;
      if (!(neg && pos)) return e;
    }
    return -1;
  }
};

using ScalarPW = std::vector<Poly>;  // one polynomial per element
using VectorPW = std::vector<VPoly>;

inline Poly random_poly(int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Poly p;
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) p.at(i, j) = U(rng);
  return p;
}

inline ScalarPW random_scalar(const OracleMesh& m, int degree, std::mt19937_64& rng) {
  ScalarPW f;
  for (std::size_t e = 0; e < m.elements.size(); ++e) f.push_back(random_poly(degree, rng));
  return f;
}

inline VectorPW random_vector(const OracleMesh& m, int degree, std::mt19937_64& rng) {
  VectorPW f;
  for (std::size_t e = 0; e < m.elements.size(); ++e) f.push_back({random_poly(degree, rng), random_poly(degree, rng)});
  return f;
}

// Average and jump on an edge; boundary: both equal the interior trace.
inline Poly avg(const ScalarPW& f, const OracleMesh::Edge& ed) {
  return ed.plus < 0 ? f[ed.minus] : 0.5 * (f[ed.minus] + f[ed.plus]);
}
inline Poly jump(const ScalarPW& f, const OracleMesh::Edge& ed) {
  return ed.plus < 0 ? f[ed.minus] : f[ed.minus] - f[ed.plus];
}
inline ScalarPW comp(const VectorPW& v, int k) {
  ScalarPW out;
  for (const auto& p : v) out.push_back(k == 0 ? p.x : p.y);
  return out;
}

inline double a_D(const OracleMesh& m, double sigma, const ScalarPW& c, const ScalarPW& chi) {
  double s = 0.0;
  for (std::size_t e = 0; e < m.elements.size(); ++e) s += integrate_triangle(grad_dot(c[e], chi[e]), m.tri(e));
  for (const auto& ed : m.edges()) {
    if (ed.plus < 0) continue;
    const Poly gc = 0.5 * (grad_n(c[ed.minus], ed.normal) + grad_n(c[ed.plus], ed.normal));
    const Poly gx = 0.5 * (grad_n(chi[ed.minus], ed.normal) + grad_n(chi[ed.plus], ed.normal));
    const Poly integrand = (-1.0) * (gc * jump(chi, ed)) - gx * jump(c, ed) +
                           (sigma / ed.length()) * (jump(c, ed) * jump(chi, ed));
    s += integrate_edge(integrand, ed.P, ed.Q);
  }
  return s;
}

inline double a_eps(const OracleMesh& m, double sigma, const VectorPW& v, const VectorPW& th) {
  double s = 0.0;
  for (int k = 0; k < 2; ++k) {
    const ScalarPW vk = comp(v, k), tk = comp(th, k);
    for (std::size_t e = 0; e < m.elements.size(); ++e) s += integrate_triangle(grad_dot(vk[e], tk[e]), m.tri(e));
    for (const auto& ed : m.edges()) {
      auto avg_grad_n = [&](const ScalarPW& f) {
        return ed.plus < 0 ? grad_n(f[ed.minus], ed.normal)
                           : 0.5 * (grad_n(f[ed.minus], ed.normal) + grad_n(f[ed.plus], ed.normal));
      };
      const Poly integrand = (-1.0) * (avg_grad_n(vk) * jump(tk, ed)) - avg_grad_n(tk) * jump(vk, ed) +
                             (sigma / ed.length()) * (jump(vk, ed) * jump(tk, ed));
      s += integrate_edge(integrand, ed.P, ed.Q);
    }
  }
  return s;
}

inline double b_P(const OracleMesh& m, const ScalarPW& p, const VectorPW& th) {
  double s = 0.0;
  for (std::size_t e = 0; e < m.elements.size(); ++e) s -= integrate_triangle(p[e] * div(th[e]), m.tri(e));
  for (const auto& ed : m.edges()) {
    const Poly thn_minus = dot(th[ed.minus], ed.normal);
    const Poly jump_thn = ed.plus < 0 ? thn_minus : thn_minus - dot(th[ed.plus], ed.normal);
    s += integrate_edge(avg(p, ed) * jump_thn, ed.P, ed.Q);
  }
  return s;
}

inline double a_A(const OracleMesh& m, const ScalarPW& c, const VectorPW& v, const ScalarPW& chi) {
  double s = 0.0;
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const VPoly g{chi[e].dx(), chi[e].dy()};
    s -= integrate_triangle(c[e] * dot(v[e], g), m.tri(e));
  }
  for (const auto& ed : m.edges()) {
    if (ed.plus < 0) continue;
    const Poly vn = 0.5 * (dot(v[ed.minus], ed.normal) + dot(v[ed.plus], ed.normal));
    s += integrate_edge(avg(c, ed) * vn * jump(chi, ed), ed.P, ed.Q);
  }
  return s;
}

inline double b_I(const OracleMesh& m, const ScalarPW& c, const ScalarPW& mu, const VectorPW& th) {
  double s = 0.0;
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const VPoly g{mu[e].dx(), mu[e].dy()};
    s -= integrate_triangle(c[e] * dot(g, th[e]), m.tri(e));
  }
  for (const auto& ed : m.edges()) {
    if (ed.plus < 0) continue;
    const Poly thn = 0.5 * (dot(th[ed.minus], ed.normal) + dot(th[ed.plus], ed.normal));
    s += integrate_edge(avg(c, ed) * jump(mu, ed) * thn, ed.P, ed.Q);
  }
  return s;
}

inline double a_C(const OracleMesh& m, const VectorPW& w, const VectorPW& v, const VectorPW& z, const VectorPW& th) {
  double s = 0.0;
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    // (v . grad z) . theta + 1/2 div v (z . theta)
    const Poly conv = (v[e].x * z[e].x.dx() + v[e].y * z[e].x.dy()) * th[e].x +
                      (v[e].x * z[e].y.dx() + v[e].y * z[e].y.dy()) * th[e].y;
    s += integrate_triangle(conv + 0.5 * (div(v[e]) * dot(z[e], th[e])), m.tri(e));
  }
  const auto edges = m.edges();
  for (const auto& ed : edges) {
    // -1/2 [v . n_e] {z . theta}
    const Poly vn_minus = dot(v[ed.minus], ed.normal);
    Poly jump_vn = vn_minus, avg_zt = dot(z[ed.minus], th[ed.minus]);
    if (ed.plus >= 0) {
      jump_vn = vn_minus - dot(v[ed.plus], ed.normal);
      avg_zt = 0.5 * (avg_zt + dot(z[ed.plus], th[ed.plus]));
    }
    s -= 0.5 * integrate_edge(jump_vn * avg_zt, ed.P, ed.Q);

    // Upwind part, seen from each adjacent element with its outward normal.
    for (int side = 0; side < (ed.plus < 0 ? 1 : 2); ++side) {
      const int in = side == 0 ? ed.minus : ed.plus;
      const int out = side == 0 ? ed.plus : ed.minus;
      const Vec2 nE = side == 0 ? ed.normal : Vec2{-ed.normal.x, -ed.normal.y};
      const Poly w_avg_n = out < 0 ? dot(w[in], nE) : 0.5 * (dot(w[in], nE) + dot(w[out], nE));
      const Poly v_avg_n = out < 0 ? dot(v[in], nE) : 0.5 * (dot(v[in], nE) + dot(v[out], nE));
      const VPoly z_ext = out < 0 ? VPoly{} : z[out];
      const Poly diff_dot = dot(VPoly{z[in].x - z_ext.x, z[in].y - z_ext.y}, th[in]);
      const auto wu = restrict_to_edge(w_avg_n, ed.P, ed.Q);
      const auto vu = restrict_to_edge(v_avg_n, ed.P, ed.Q);
      std::vector<double> cuts = {0.0, 1.0};
      for (double r : roots_01(wu)) cuts.push_back(r);
      for (double r : roots_01(vu)) cuts.push_back(r);
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        if (cuts[k + 1] - cuts[k] <= 0.0 || eval_edge_poly(wu, mid) >= 0.0) continue;
        const double sign = eval_edge_poly(vu, mid) < 0.0 ? -1.0 : 1.0;
        s += sign * integrate_edge(v_avg_n * diff_dot, ed.P, ed.Q, cuts[k], cuts[k + 1]);
      }
    }
  }
  return s;
}

/// Discrete field interpolating a piecewise polynomial of degree <= q exactly.
inline chns::ScalarField to_field(const OracleMesh& m, const ScalarPW& f,
                                  std::shared_ptr<const chns::ScalarSpace> space) {
  return chns::l2_project([&](Vec2 x) { return f[m.locate(x)](x); }, std::move(space));
}

inline chns::VectorField to_field(const OracleMesh& m, const VectorPW& f,
                                  std::shared_ptr<const chns::VectorSpace> space) {
  return chns::l2_project(
      [&](Vec2 x) {
        const auto& p = f[m.locate(x)];
        return Vec2{p.x(x), p.y(x)};
      },
      std::move(space));
}

/// Two triangles forming a skewed convex quadrilateral.
inline OracleMesh two_elements() {
  return {{{0.0, 0.0}, {1.0, 0.1}, {0.2, 0.9}, {1.1, 1.2}}, {{0, 1, 2}, {1, 3, 2}}};
}

}  // namespace oracle
