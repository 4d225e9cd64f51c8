#include "chns/forms.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <unsupported/Eigen/SparseExtra>
#include <vector>

#include "chns/errors.hpp"

namespace chns {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

constexpr int kMaxLocal = 64;

struct Tab {
  int n = 0;
  double phi[kMaxLocal];
  Vec2 grad[kMaxLocal];
};

Tab tabulate(const ScalarSpace& space, int e, Vec2 x, bool with_grad = true) {
  Tab t;
  t.n = space.dofs_per_element();
  const Vec2 ref = space.mesh().to_reference(e, x);
  space.values_ref(e, ref, std::span<double>(t.phi, t.n));
  if (with_grad) space.gradients_ref(e, ref, std::span<Vec2>(t.grad, t.n));
  return t;
}

template <class F>
void for_each_volume_point(const ScalarSpace& space, int e, const QuadratureRule& rule, F&& f) {
  const Mesh& mesh = space.mesh();
  const double detj = mesh.jacobian_determinant(e);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    f(mesh.to_physical(e, rule.points[q]), rule.weights[q] * detj);
  }
}

template <class F>
void for_each_face_point(const Mesh& mesh, const std::array<int, 2>& verts,
                         const QuadratureRule& rule, double s0, double s1, F&& f) {
  const double len = (mesh.vertices()[verts[1]] - mesh.vertices()[verts[0]]).norm();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = s0 + (s1 - s0) * rule.points[q].x;
    f(face_point(mesh, verts, s), rule.weights[q] * (s1 - s0) * len);
  }
}

template <class F>
void for_each_face_point(const Mesh& mesh, const std::array<int, 2>& verts,
                         const QuadratureRule& rule, F&& f) {
  for_each_face_point(mesh, verts, rule, 0.0, 1.0, std::forward<F>(f));
}

// Interior zeros of a polynomial of degree <= `degree` on [0,1], given as a
// callable. Used to split faces where the upwind indicator changes sign.
std::vector<double> sign_breakpoints(const std::function<double(double)>& g, int degree) {
  std::vector<double> cuts{0.0, 1.0};
  if (degree < 1) return cuts;
  const int m = degree + 1;
  Eigen::MatrixXd V(m, m);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    const double s = static_cast<double>(i) / degree;
    double p = 1.0;
    for (int k = 0; k < m; ++k) {
      V(i, k) = p;
      p *= s;
    }
    y[i] = g(s);
  }
  Eigen::VectorXd a = V.colPivHouseholderQr().solve(y);
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return cuts;
  int d = degree;
  while (d > 0 && std::abs(a[d]) <= 1e-13 * scale) --d;
  if (d == 0) return cuts;
  std::vector<double> roots;
  if (d == 1) {
    roots.push_back(-a[0] / a[1]);
  } else {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) C(i, d - 1) = -a[i] / a[d];
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    for (int i = 0; i < d; ++i) {
      const auto r = es.eigenvalues()[i];
      if (std::abs(r.imag()) <= 1e-10) roots.push_back(r.real());
    }
  }
  for (double r : roots) {
    if (r > 1e-12 && r < 1.0 - 1e-12) cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

// Breakpoints of both indicators: the upwind set follows {w}.n, the weight
// |{v}.n| has its own kinks.
std::vector<double> merge_breakpoints(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

SparseMatrix from_triplets(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Scalar SIPG/NIPG block for one scalar component; `dof` maps element
// local dofs to global rows/cols (component-aware for vector spaces).
template <class DofMap>
void add_interior_penalty(const ScalarSpace& space, double sigma, PenaltyVariant variant,
                          bool include_boundary, bool consistency, DofMap&& dof, Triplets& trip) {
  const Mesh& mesh = space.mesh();
  const int n = space.dofs_per_element();
  const double cons = consistency ? 1.0 : 0.0;
  const double sym = cons * (variant == PenaltyVariant::Symmetric ? 1.0 : -1.0);

  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for_each_volume_point(space, e, space.volume_rule(), [&](Vec2 x, double w) {
      const Tab t = tabulate(space, e, x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) local(i, j) += w * t.grad[i].dot(t.grad[j]);
    });
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) trip.emplace_back(dof(e, i), dof(e, j), local(i, j));
  }

  for (const auto& f : mesh.interior_faces()) {
    const double pen = sigma / f.length;
    const int els[2] = {f.minus, f.plus};
    const double sgn[2] = {1.0, -1.0};
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for_each_face_point(mesh, f.vertices, space.face_rule(), [&](Vec2 x, double w) {
      const Tab t[2] = {tabulate(space, f.minus, x), tabulate(space, f.plus, x)};
      for (int si = 0; si < 2; ++si) {
        for (int i = 0; i < n; ++i) {
          const double jump_i = sgn[si] * t[si].phi[i];
          const double avg_dn_i = 0.5 * t[si].grad[i].dot(f.normal);
          for (int sj = 0; sj < 2; ++sj) {
            for (int j = 0; j < n; ++j) {
              const double jump_j = sgn[sj] * t[sj].phi[j];
              const double avg_dn_j = 0.5 * t[sj].grad[j].dot(f.normal);
              local(si * n + i, sj * n + j) +=
                  w * (-cons * avg_dn_j * jump_i - sym * avg_dn_i * jump_j + pen * jump_i * jump_j);
            }
          }
        }
      }
    });
    for (int si = 0; si < 2; ++si)
      for (int i = 0; i < n; ++i)
        for (int sj = 0; sj < 2; ++sj)
          for (int j = 0; j < n; ++j)
            trip.emplace_back(dof(els[si], i), dof(els[sj], j), local(si * n + i, sj * n + j));
  }

  if (!include_boundary) return;
  for (const auto& f : mesh.boundary_faces()) {
    const double pen = sigma / f.length;
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for_each_face_point(mesh, f.vertices, space.face_rule(), [&](Vec2 x, double w) {
      const Tab t = tabulate(space, f.element, x);
      for (int i = 0; i < n; ++i) {
        const double dn_i = t.grad[i].dot(f.normal);
        for (int j = 0; j < n; ++j) {
          const double dn_j = t.grad[j].dot(f.normal);
          local(i, j) += w * (-cons * dn_j * t.phi[i] - sym * dn_i * t.phi[j] + pen * t.phi[i] * t.phi[j]);
        }
      }
    });
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        trip.emplace_back(dof(f.element, i), dof(f.element, j), local(i, j));
  }
}

}  // namespace

SparseMatrix assemble_mass(const ScalarSpace& space) {
  const Mesh& mesh = space.mesh();
  const int n = space.dofs_per_element();
  Triplets trip;
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for_each_volume_point(space, e, space.volume_rule(), [&](Vec2 x, double w) {
      const Tab t = tabulate(space, e, x, false);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) local(i, j) += w * t.phi[i] * t.phi[j];
    });
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) trip.emplace_back(space.dof(e, i), space.dof(e, j), local(i, j));
  }
  return from_triplets(space.total_dofs(), space.total_dofs(), trip);
}

SparseMatrix assemble_mass(const VectorSpace& space) {
  const SparseMatrix ms = assemble_mass(space.component());
  const auto& sc = space.component();
  const int n = sc.dofs_per_element();
  Triplets trip;
  for (int k = 0; k < ms.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(ms, k); it; ++it) {
      const int ei = static_cast<int>(it.row()) / n;
      const int ej = static_cast<int>(it.col()) / n;
      const int li = static_cast<int>(it.row()) % n;
      const int lj = static_cast<int>(it.col()) % n;
      for (int c = 0; c < 2; ++c) trip.emplace_back(space.dof(ei, c, li), space.dof(ej, c, lj), it.value());
    }
  }
  return from_triplets(space.total_dofs(), space.total_dofs(), trip);
}

SparseMatrix assemble_a_D(const ScalarSpace& space, double sigma, PenaltyVariant variant) {
  if (!(sigma > 0.0)) throw std::invalid_argument("assemble_a_D: sigma must be positive");
  Triplets trip;
  add_interior_penalty(space, sigma, variant, false, true,
                       [&](int e, int i) { return space.dof(e, i); }, trip);
  return from_triplets(space.total_dofs(), space.total_dofs(), trip);
}

SparseMatrix assemble_dg_gram(const ScalarSpace& space, double sigma) {
  Triplets trip;
  add_interior_penalty(space, sigma, PenaltyVariant::Symmetric, false, false,
                       [&](int e, int i) { return space.dof(e, i); }, trip);
  return from_triplets(space.total_dofs(), space.total_dofs(), trip);
}

SparseMatrix assemble_dg_gram(const VectorSpace& space, double sigma) {
  Triplets trip;
  for (int c = 0; c < 2; ++c) {
    add_interior_penalty(space.component(), sigma, PenaltyVariant::Symmetric, true, false,
                         [&](int e, int i) { return space.dof(e, c, i); }, trip);
  }
  return from_triplets(space.total_dofs(), space.total_dofs(), trip);
}

SparseMatrix assemble_a_eps(const VectorSpace& space, double sigma, PenaltyVariant variant) {
  if (!(sigma > 0.0)) throw std::invalid_argument("assemble_a_eps: sigma must be positive");
  Triplets trip;
  for (int c = 0; c < 2; ++c) {
    add_interior_penalty(space.component(), sigma, variant, true, true,
                         [&](int e, int i) { return space.dof(e, c, i); }, trip);
  }
  return from_triplets(space.total_dofs(), space.total_dofs(), trip);
}

SparseMatrix assemble_b_P(const ScalarSpace& pressure, const VectorSpace& velocity) {
  const Mesh& mesh = velocity.mesh();
  const auto& vs = velocity.component();
  const int np = pressure.dofs_per_element();
  const int nv = vs.dofs_per_element();
  Triplets trip;

  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    for_each_volume_point(vs, e, vs.volume_rule(), [&](Vec2 x, double w) {
      const Tab tp = tabulate(pressure, e, x, false);
      const Tab tv = tabulate(vs, e, x);
      for (int i = 0; i < np; ++i) {
        for (int j = 0; j < nv; ++j) {
          trip.emplace_back(pressure.dof(e, i), velocity.dof(e, 0, j), -w * tp.phi[i] * tv.grad[j].x);
          trip.emplace_back(pressure.dof(e, i), velocity.dof(e, 1, j), -w * tp.phi[i] * tv.grad[j].y);
        }
      }
    });
  }

  for (const auto& f : mesh.interior_faces()) {
    const int els[2] = {f.minus, f.plus};
    const double sgn[2] = {1.0, -1.0};
    for_each_face_point(mesh, f.vertices, vs.face_rule(), [&](Vec2 x, double w) {
      const Tab tp[2] = {tabulate(pressure, f.minus, x, false), tabulate(pressure, f.plus, x, false)};
      const Tab tv[2] = {tabulate(vs, f.minus, x, false), tabulate(vs, f.plus, x, false)};
      for (int si = 0; si < 2; ++si) {
        for (int i = 0; i < np; ++i) {
          const double avg = 0.5 * tp[si].phi[i];
          for (int sj = 0; sj < 2; ++sj) {
            for (int j = 0; j < nv; ++j) {
              const double jump = sgn[sj] * tv[sj].phi[j];
              trip.emplace_back(pressure.dof(els[si], i), velocity.dof(els[sj], 0, j),
                                w * avg * jump * f.normal.x);
              trip.emplace_back(pressure.dof(els[si], i), velocity.dof(els[sj], 1, j),
                                w * avg * jump * f.normal.y);
            }
          }
        }
      }
    });
  }

  for (const auto& f : mesh.boundary_faces()) {
    for_each_face_point(mesh, f.vertices, vs.face_rule(), [&](Vec2 x, double w) {
      const Tab tp = tabulate(pressure, f.element, x, false);
      const Tab tv = tabulate(vs, f.element, x, false);
      for (int i = 0; i < np; ++i) {
        for (int j = 0; j < nv; ++j) {
          trip.emplace_back(pressure.dof(f.element, i), velocity.dof(f.element, 0, j),
                            w * tp.phi[i] * tv.phi[j] * f.normal.x);
          trip.emplace_back(pressure.dof(f.element, i), velocity.dof(f.element, 1, j),
                            w * tp.phi[i] * tv.phi[j] * f.normal.y);
        }
      }
    });
  }
  return from_triplets(pressure.total_dofs(), velocity.total_dofs(), trip);
}

SparseMatrix assemble_a_A(const ScalarField& c, const VectorSpace& velocity) {
  const ScalarSpace& ss = *c.space;
  const ScalarSpace& vs = velocity.component();
  const Mesh& mesh = ss.mesh();
  const int ns = ss.dofs_per_element();
  const int nv = vs.dofs_per_element();
  Triplets trip;

  // -(c v, grad chi)_E
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    for_each_volume_point(ss, e, ss.volume_rule(), [&](Vec2 x, double w) {
      const Tab ts = tabulate(ss, e, x);
      const Tab tv = tabulate(vs, e, x, false);
      const double cv = c.value(e, x);
      for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nv; ++j) {
          const double a = -w * cv * tv.phi[j];
          trip.emplace_back(ss.dof(e, i), velocity.dof(e, 0, j), a * ts.grad[i].x);
          trip.emplace_back(ss.dof(e, i), velocity.dof(e, 1, j), a * ts.grad[i].y);
        }
      }
    });
  }

  // {c} {v . n_e} [chi] on interior faces
  for (const auto& f : mesh.interior_faces()) {
    const int els[2] = {f.minus, f.plus};
    const double sgn[2] = {1.0, -1.0};
    for_each_face_point(mesh, f.vertices, ss.face_rule(), [&](Vec2 x, double w) {
      const Tab ts[2] = {tabulate(ss, f.minus, x, false), tabulate(ss, f.plus, x, false)};
      const Tab tv[2] = {tabulate(vs, f.minus, x, false), tabulate(vs, f.plus, x, false)};
      const double cavg = 0.5 * (c.value(f.minus, x) + c.value(f.plus, x));
      for (int si = 0; si < 2; ++si) {
        for (int i = 0; i < ns; ++i) {
          const double jump = sgn[si] * ts[si].phi[i];
          for (int sj = 0; sj < 2; ++sj) {
            for (int j = 0; j < nv; ++j) {
              const double a = w * cavg * 0.5 * tv[sj].phi[j] * jump;
              trip.emplace_back(ss.dof(els[si], i), velocity.dof(els[sj], 0, j), a * f.normal.x);
              trip.emplace_back(ss.dof(els[si], i), velocity.dof(els[sj], 1, j), a * f.normal.y);
            }
          }
        }
      }
    });
  }
  return from_triplets(ss.total_dofs(), velocity.total_dofs(), trip);
}

SparseMatrix assemble_b_I(const ScalarField& c, const ScalarSpace& mu_space,
                          const VectorSpace& velocity) {
  const ScalarSpace& vs = velocity.component();
  const Mesh& mesh = mu_space.mesh();
  const int nm = mu_space.dofs_per_element();
  const int nv = vs.dofs_per_element();
  Triplets trip;

  // -(c grad mu, theta)_E
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    for_each_volume_point(mu_space, e, mu_space.volume_rule(), [&](Vec2 x, double w) {
      const Tab tm = tabulate(mu_space, e, x);
      const Tab tv = tabulate(vs, e, x, false);
      const double cv = c.value(e, x);
      for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nm; ++j) {
          const double a = -w * cv * tv.phi[i];
          trip.emplace_back(velocity.dof(e, 0, i), mu_space.dof(e, j), a * tm.grad[j].x);
          trip.emplace_back(velocity.dof(e, 1, i), mu_space.dof(e, j), a * tm.grad[j].y);
        }
      }
    });
  }

  // {c} [mu] {theta . n_e} on interior faces
  for (const auto& f : mesh.interior_faces()) {
    const int els[2] = {f.minus, f.plus};
    const double sgn[2] = {1.0, -1.0};
    for_each_face_point(mesh, f.vertices, mu_space.face_rule(), [&](Vec2 x, double w) {
      const Tab tm[2] = {tabulate(mu_space, f.minus, x, false), tabulate(mu_space, f.plus, x, false)};
      const Tab tv[2] = {tabulate(vs, f.minus, x, false), tabulate(vs, f.plus, x, false)};
      const double cavg = 0.5 * (c.value(f.minus, x) + c.value(f.plus, x));
      for (int si = 0; si < 2; ++si) {
        for (int i = 0; i < nv; ++i) {
          const double avg = 0.5 * tv[si].phi[i];
          for (int sj = 0; sj < 2; ++sj) {
            for (int j = 0; j < nm; ++j) {
              const double a = w * cavg * sgn[sj] * tm[sj].phi[j] * avg;
              trip.emplace_back(velocity.dof(els[si], 0, i), mu_space.dof(els[sj], j), a * f.normal.x);
              trip.emplace_back(velocity.dof(els[si], 1, i), mu_space.dof(els[sj], j), a * f.normal.y);
            }
          }
        }
      }
    });
  }
  return from_triplets(velocity.total_dofs(), mu_space.total_dofs(), trip);
}

SparseMatrix assemble_a_C(const VectorField& w, const VectorField& v) {
  const VectorSpace& X = *v.space;
  const ScalarSpace& vs = X.component();
  const Mesh& mesh = vs.mesh();
  const int n = vs.dofs_per_element();
  Triplets trip;

  auto add_same_component = [&](int ei, int i, int ej, int j, double a) {
    trip.emplace_back(X.dof(ei, 0, i), X.dof(ej, 0, j), a);
    trip.emplace_back(X.dof(ei, 1, i), X.dof(ej, 1, j), a);
  };

  // (v . grad z, theta)_E + 1/2 (div v z, theta)_E
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for_each_volume_point(vs, e, vs.volume_rule(), [&](Vec2 x, double wt) {
      const Tab t = tabulate(vs, e, x);
      const Vec2 vv = v.value(e, x);
      const double div = v.divergence(e, x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          local(i, j) += wt * (vv.dot(t.grad[j]) + 0.5 * div * t.phi[j]) * t.phi[i];
    });
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) add_same_component(e, i, e, j, local(i, j));
  }

  const int wdeg = w.space->degree();
  const int vdeg = X.degree();

  for (const auto& f : mesh.interior_faces()) {
    const int els[2] = {f.minus, f.plus};
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    auto wn = [&](double s) {
      const Vec2 x = face_point(mesh, f.vertices, s);
      return 0.5 * (w.value(f.minus, x) + w.value(f.plus, x)).dot(f.normal);
    };
    auto vn = [&](double s) {
      const Vec2 x = face_point(mesh, f.vertices, s);
      return 0.5 * (v.value(f.minus, x) + v.value(f.plus, x)).dot(f.normal);
    };
    const auto cuts = merge_breakpoints(sign_breakpoints(wn, wdeg), sign_breakpoints(vn, vdeg));
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      for_each_face_point(mesh, f.vertices, vs.face_rule(), cuts[k], cuts[k + 1], [&](Vec2 x, double wt) {
        const Tab t[2] = {tabulate(vs, f.minus, x, false), tabulate(vs, f.plus, x, false)};
        const Vec2 wm = w.value(f.minus, x);
        const Vec2 wp = w.value(f.plus, x);
        const Vec2 vm = v.value(f.minus, x);
        const Vec2 vp = v.value(f.plus, x);
        const double wavg_n = 0.5 * (wm + wp).dot(f.normal);
        const double vavg_n = 0.5 * (vm + vp).dot(f.normal);
        const double vjump_n = (vm - vp).dot(f.normal);
        // -1/2 [v . n] {z . theta}: same-side pairs only.
        for (int s = 0; s < 2; ++s)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              local(s * n + i, s * n + j) += -0.25 * wt * vjump_n * t[s].phi[i] * t[s].phi[j];
        // Upwind: inflow side `in` sees |{v} . n_E| (z_in - z_out) . theta_in.
        if (wavg_n != 0.0) {
          const int in = wavg_n < 0.0 ? 0 : 1;
          const int out = 1 - in;
          const double a = wt * std::abs(vavg_n);
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
              local(in * n + i, in * n + j) += a * t[in].phi[i] * t[in].phi[j];
              local(in * n + i, out * n + j) -= a * t[in].phi[i] * t[out].phi[j];
            }
          }
        }
      });
    }
    for (int si = 0; si < 2; ++si)
      for (int i = 0; i < n; ++i)
        for (int sj = 0; sj < 2; ++sj)
          for (int j = 0; j < n; ++j)
            add_same_component(els[si], i, els[sj], j, local(si * n + i, sj * n + j));
  }

  for (const auto& f : mesh.boundary_faces()) {
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    auto wn = [&](double s) {
      return w.value(f.element, face_point(mesh, f.vertices, s)).dot(f.normal);
    };
    auto vn = [&](double s) {
      return v.value(f.element, face_point(mesh, f.vertices, s)).dot(f.normal);
    };
    const auto cuts = merge_breakpoints(sign_breakpoints(wn, wdeg), sign_breakpoints(vn, vdeg));
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      for_each_face_point(mesh, f.vertices, vs.face_rule(), cuts[k], cuts[k + 1], [&](Vec2 x, double wt) {
        const Tab t = tabulate(vs, f.element, x, false);
        const double w_n = w.value(f.element, x).dot(f.normal);
        const double v_n = v.value(f.element, x).dot(f.normal);
        // Boundary: jump and average are the trace, exterior trace is zero.
        double coef = -0.5 * v_n;
        if (w_n < 0.0) coef += std::abs(v_n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) local(i, j) += wt * coef * t.phi[i] * t.phi[j];
      });
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) add_same_component(f.element, i, f.element, j, local(i, j));
  }
  return from_triplets(X.total_dofs(), X.total_dofs(), trip);
}

AssembledForms AssembledForms::build(const ScalarSpace& scalar, const VectorSpace& velocity,
                                     const ScalarSpace& pressure, double sigma) {
  AssembledForms f;
  f.sigma = sigma;
  f.mass_c = assemble_mass(scalar);
  f.mass_v = assemble_mass(velocity);
  f.a_D = assemble_a_D(scalar, sigma);
  f.a_eps = assemble_a_eps(velocity, sigma);
  f.b_P = assemble_b_P(pressure, velocity);
  return f;
}

double eval_a_D(const ScalarSpace& space, double sigma, const ScalarField& c, const ScalarField& chi) {
  return chi.coeffs.dot(assemble_a_D(space, sigma) * c.coeffs);
}

double eval_a_eps(double sigma, const VectorField& v, const VectorField& theta) {
  return theta.coeffs.dot(assemble_a_eps(*v.space, sigma) * v.coeffs);
}

double eval_b_P(const ScalarField& p, const VectorField& theta) {
  return p.coeffs.dot(assemble_b_P(*p.space, *theta.space) * theta.coeffs);
}

double eval_a_A(const ScalarField& c, const VectorField& v, const ScalarField& chi) {
  return chi.coeffs.dot(assemble_a_A(c, *v.space) * v.coeffs);
}

double eval_b_I(const ScalarField& c, const ScalarField& mu, const VectorField& theta) {
  return theta.coeffs.dot(assemble_b_I(c, *mu.space, *theta.space) * mu.coeffs);
}

double eval_a_C(const VectorField& w, const VectorField& v, const VectorField& z,
                const VectorField& theta) {
  return theta.coeffs.dot(assemble_a_C(w, v) * z.coeffs);
}

Eigen::VectorXd constant_vector(const ScalarSpace& space) {
  return constant_field(std::make_shared<ScalarSpace>(space), 1.0).coeffs;
}

Eigen::VectorXd mean_functional(const ScalarSpace& space) {
  const Mesh& mesh = space.mesh();
  const int n = space.dofs_per_element();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(space.total_dofs());
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    for_each_volume_point(space, e, space.volume_rule(), [&](Vec2 x, double w) {
      const Tab t = tabulate(space, e, x, false);
      for (int i = 0; i < n; ++i) m[space.dof(e, i)] += w * t.phi[i];
    });
  }
  return m;
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m) {
  if (!Eigen::saveMarket(m, path.string())) {
    throw std::runtime_error("write_matrix_market: cannot write " + path.string());
  }
}

}  // namespace chns
