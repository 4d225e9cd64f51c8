#include "chns/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chns/errors.hpp"
#include "chns/projections.hpp"

namespace chns {
namespace {

template <class F>
void for_each_elevated_volume_point(const ScalarSpace& sp, F&& f) {
  const Mesh& mesh = sp.mesh();
  const auto& rule = sp.elevated_volume_rule();
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    const double detj = mesh.jacobian_determinant(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      f(e, mesh.to_physical(e, rule.points[q]), rule.weights[q] * detj);
    }
  }
}

template <class Face, class F>
void for_each_face_rule_point(const Mesh& mesh, const Face& face, const QuadratureRule& rule, F&& f) {
  for (std::size_t q = 0; q < rule.size(); ++q) {
    f(face_point(mesh, face.vertices, rule.points[q].x), rule.weights[q] * face.length);
  }
}

// Orthonormal basis of the Euclidean complement of `k`.
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& k) {
  const Eigen::Index n = k.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(k.normalized());
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Q.rightCols(n - 1);
}

double min_generalized_eigenvalue(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd As = 0.5 * (A + A.transpose());
  const Eigen::MatrixXd Bs = 0.5 * (B + B.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(As, Bs, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SingularSystemError("generalized eigensolver failed");
  return es.eigenvalues().minCoeff();
}

}  // namespace

// Evaluated by quadrature rather than through the Gram matrix, so that the
// norm of a large constant is zero to roundoff instead of sqrt(roundoff).
double dg_norm(const ScalarField& f, double sigma) {
  return dg_error(f, [](Vec2) { return Vec2{0.0, 0.0}; }, sigma);
}

double dg_norm(const VectorField& f, double sigma) {
  return dg_error(
      f, [](Vec2) { return Vec2{0.0, 0.0}; },
      [](Vec2) { return std::array<Vec2, 2>{}; }, sigma);
}

double total_mass(const ScalarField& c) { return integral(c); }

double chemical_energy(const ScalarField& c, const Potential& potential) {
  double s = 0.0;
  for_each_elevated_volume_point(*c.space, [&](int e, Vec2 x, double w) {
    s += w * potential.phi(c.value(e, x));
  });
  return s;
}

EnergyReport discrete_energy(const ScalarField& c, const VectorField& v, const Potential& potential,
                             double kappa, const SparseMatrix& a_D) {
  EnergyReport r;
  const SparseMatrix mv = assemble_mass(*v.space);
  r.kinetic = 0.5 * v.coeffs.dot(mv * v.coeffs);
  r.chemical = chemical_energy(c, potential);
  r.interfacial = 0.5 * kappa * c.coeffs.dot(a_D * c.coeffs);
  r.total = r.kinetic + r.chemical + r.interfacial;
  return r;
}

EnergyReport discrete_energy(const ScalarField& c, const VectorField& v, const Potential& potential,
                             double kappa, double sigma) {
  return discrete_energy(c, v, potential, kappa, assemble_a_D(*c.space, sigma));
}

double l2_error(const ScalarField& f, const ScalarFunction& exact) {
  double s = 0.0;
  for_each_elevated_volume_point(*f.space, [&](int e, Vec2 x, double w) {
    const double d = f.value(e, x) - exact(x);
    s += w * d * d;
  });
  return std::sqrt(s);
}

double l2_error(const VectorField& f, const VectorFunction& exact) {
  double s = 0.0;
  for_each_elevated_volume_point(f.space->component(), [&](int e, Vec2 x, double w) {
    const Vec2 d = f.value(e, x) - exact(x);
    s += w * d.dot(d);
  });
  return std::sqrt(s);
}

double dg_error(const ScalarField& f, const GradientFunction& exact_grad, double sigma) {
  const ScalarSpace& sp = *f.space;
  const Mesh& mesh = sp.mesh();
  double s = 0.0;
  for_each_elevated_volume_point(sp, [&](int e, Vec2 x, double w) {
    const Vec2 d = f.gradient(e, x) - exact_grad(x);
    s += w * d.dot(d);
  });
  for (const auto& face : mesh.interior_faces()) {
    for_each_face_rule_point(mesh, face, sp.elevated_face_rule(), [&](Vec2 x, double w) {
      const double j = f.value(face.minus, x) - f.value(face.plus, x);
      s += sigma / face.length * w * j * j;
    });
  }
  return std::sqrt(s);
}

double dg_error(const VectorField& f, const VectorFunction& exact,
                const std::function<std::array<Vec2, 2>(Vec2)>& exact_grad, double sigma) {
  const ScalarSpace& sp = f.space->component();
  const Mesh& mesh = sp.mesh();
  double s = 0.0;
  for_each_elevated_volume_point(sp, [&](int e, Vec2 x, double w) {
    const auto gh = f.gradient(e, x);
    const auto g = exact_grad(x);
    for (int k = 0; k < 2; ++k) {
      const Vec2 d = gh[k] - g[k];
      s += w * d.dot(d);
    }
  });
  for (const auto& face : mesh.interior_faces()) {
    for_each_face_rule_point(mesh, face, sp.elevated_face_rule(), [&](Vec2 x, double w) {
      const Vec2 j = f.value(face.minus, x) - f.value(face.plus, x);
      s += sigma / face.length * w * j.dot(j);
    });
  }
  for (const auto& face : mesh.boundary_faces()) {
    for_each_face_rule_point(mesh, face, sp.elevated_face_rule(), [&](Vec2 x, double w) {
      const Vec2 j = f.value(face.element, x) - exact(x);
      s += sigma / face.length * w * j.dot(j);
    });
  }
  return std::sqrt(s);
}

double estimate_coercivity(const Eigen::MatrixXd& A, const Eigen::MatrixXd& G,
                           const std::optional<Eigen::VectorXd>& kernel) {
  if (!kernel) return min_generalized_eigenvalue(A, G);
  const Eigen::MatrixXd Z = complement_basis(*kernel);
  return min_generalized_eigenvalue(Z.transpose() * A * Z, Z.transpose() * G * Z);
}

double estimate_infsup(const Eigen::MatrixXd& B, const Eigen::MatrixXd& G, const Eigen::MatrixXd& Mp,
                       const std::optional<Eigen::VectorXd>& pressure_kernel) {
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw SingularSystemError("estimate_infsup: Gram not SPD");
  const Eigen::MatrixXd GinvBt = llt.solve(B.transpose());
  Eigen::MatrixXd S = B * GinvBt;
  Eigen::MatrixXd M = Mp;
  if (pressure_kernel) {
    const Eigen::MatrixXd Z = complement_basis(Mp * *pressure_kernel);
    S = Z.transpose() * S * Z;
    M = Z.transpose() * Mp * Z;
  }
  return std::sqrt(std::max(0.0, min_generalized_eigenvalue(S, M)));
}

ScalarField random_field(std::shared_ptr<const ScalarSpace> space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(std::move(space));
  for (Eigen::Index i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = u(rng);
  return f;
}

VectorField random_field(std::shared_ptr<const VectorSpace> space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorField f(std::move(space));
  for (Eigen::Index i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = u(rng);
  return f;
}

ScalarFunction smooth_random_function(std::mt19937_64& rng, int modes) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  struct Term {
    double a, kx, ky, px, py;
  };
  std::vector<Term> terms;
  for (int k = 0; k <= modes; ++k) {
    for (int l = 0; l <= modes; ++l) {
      terms.push_back({u(rng) / (1.0 + k + l), k * std::numbers::pi, l * std::numbers::pi, ph(rng), ph(rng)});
    }
  }
  return [terms](Vec2 x) {
    double s = 0.0;
    for (const Term& t : terms) s += t.a * std::cos(t.kx * x.x + t.px) * std::cos(t.ky * x.y + t.py);
    return s;
  };
}

double probe_boundedness_a_A(std::shared_ptr<const ScalarSpace> scalar,
                             std::shared_ptr<const VectorSpace> velocity, double sigma, int samples,
                             std::mt19937_64& rng) {
  const SparseMatrix gs = assemble_dg_gram(*scalar, sigma);
  const SparseMatrix gv = assemble_dg_gram(*velocity, sigma);
  const Eigen::VectorXd mean = mean_functional(*scalar);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const ScalarField c = l2_project(smooth_random_function(rng), scalar);
    const auto vx = smooth_random_function(rng), vy = smooth_random_function(rng);
    const VectorField v = l2_project([&](Vec2 x) { return Vec2{vx(x), vy(x)}; }, velocity);
    const ScalarField chi = l2_project(smooth_random_function(rng), scalar);
    const double nc = std::sqrt(c.coeffs.dot(gs * c.coeffs)) + std::abs(mean.dot(c.coeffs));
    const double nv = std::sqrt(v.coeffs.dot(gv * v.coeffs));
    const double nchi = std::sqrt(chi.coeffs.dot(gs * chi.coeffs));
    if (nc * nv * nchi == 0.0) continue;
    const double a = chi.coeffs.dot(assemble_a_A(c, *velocity) * v.coeffs);
    worst = std::max(worst, std::abs(a) / (nc * nv * nchi));
  }
  return worst;
}

ConstantProbes probe_constants(std::shared_ptr<const ScalarSpace> scalar,
                               std::shared_ptr<const VectorSpace> velocity,
                               std::shared_ptr<const ScalarSpace> pressure, double sigma,
                               int boundedness_samples, unsigned seed) {
  ConstantProbes r;
  const Eigen::MatrixXd aD = Eigen::MatrixXd(assemble_a_D(*scalar, sigma));
  const Eigen::MatrixXd gS = Eigen::MatrixXd(assemble_dg_gram(*scalar, sigma));
  r.k_alpha = estimate_coercivity(aD, gS, constant_vector(*scalar));

  const Eigen::MatrixXd aE = Eigen::MatrixXd(assemble_a_eps(*velocity, sigma));
  const Eigen::MatrixXd gV = Eigen::MatrixXd(assemble_dg_gram(*velocity, sigma));
  r.k_eps = estimate_coercivity(aE, gV);

  const Eigen::MatrixXd B = Eigen::MatrixXd(assemble_b_P(*pressure, *velocity));
  const Eigen::MatrixXd Mp = Eigen::MatrixXd(assemble_mass(*pressure));
  r.beta = estimate_infsup(B, gV, Mp, constant_vector(*pressure));

  std::mt19937_64 rng(seed);
  if (boundedness_samples > 0) {
    r.c_gamma = probe_boundedness_a_A(scalar, velocity, sigma, boundedness_samples, rng);
  }
  return r;
}

std::vector<double> elementwise_mass_residuals(const ScalarField& c_new, const ScalarField& c_old,
                                               const ScalarField& mu, const VectorField& v,
                                               double tau, double sigma,
                                               const ScalarFunction* forcing) {
  const ScalarSpace& sp = *c_new.space;
  const Mesh& mesh = sp.mesh();
  std::vector<double> r(mesh.num_elements(), 0.0);
  for_each_elevated_volume_point(sp, [&](int e, Vec2 x, double w) {
    r[e] += w * (c_new.value(e, x) - c_old.value(e, x)) / tau;
    if (forcing) r[e] -= w * (*forcing)(x);
  });
  for (const auto& f : mesh.interior_faces()) {
    for_each_face_rule_point(mesh, f, sp.elevated_face_rule(), [&](Vec2 x, double w) {
      const double dmu = 0.5 * (mu.gradient(f.minus, x) + mu.gradient(f.plus, x)).dot(f.normal);
      const double cavg = 0.5 * (c_old.value(f.minus, x) + c_old.value(f.plus, x));
      const double vn = 0.5 * (v.value(f.minus, x) + v.value(f.plus, x)).dot(f.normal);
      const double pen = sigma / f.length * (mu.value(f.minus, x) - mu.value(f.plus, x));
      const double flux = w * (-dmu + cavg * vn + pen);
      // n_E = n_e on the minus side and -n_e on the plus side.
      r[f.minus] += flux;
      r[f.plus] -= flux;
    });
  }
  return r;
}

}  // namespace chns
