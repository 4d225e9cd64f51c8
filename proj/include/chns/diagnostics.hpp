#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <vector>

#include "chns/dgspace.hpp"
#include "chns/forms.hpp"
#include "chns/potential.hpp"

namespace chns {

/// Discrete energy F_h = 1/2 (v, v) + (Phi(c), 1) + kappa/2 a_D(c, c).
struct EnergyReport {
  double kinetic = 0.0;
  double chemical = 0.0;
  double interfacial = 0.0;
  double total = 0.0;
};

/// DG semi-norm: scalar version uses interior faces only, vector version
/// also boundary faces. Penalty weight sigma / h_e as in assembly.
double dg_norm(const ScalarField& f, double sigma);
double dg_norm(const VectorField& f, double sigma);

/// (c, 1).
double total_mass(const ScalarField& c);

/// (Phi(c), 1) with the elevated rule; the stepper uses the same rule for
/// its Phi' terms.
double chemical_energy(const ScalarField& c, const Potential& potential);

EnergyReport discrete_energy(const ScalarField& c, const VectorField& v, const Potential& potential,
                             double kappa, const SparseMatrix& a_D);
EnergyReport discrete_energy(const ScalarField& c, const VectorField& v, const Potential& potential,
                             double kappa, double sigma);

/// Error norms against smooth exact data (elevated quadrature). The exact
/// function is continuous, so only the discrete field contributes jumps.
double l2_error(const ScalarField& f, const ScalarFunction& exact);
double l2_error(const VectorField& f, const VectorFunction& exact);
double dg_error(const ScalarField& f, const GradientFunction& exact_grad, double sigma);
/// Vector version; boundary jump is the trace of f minus the exact trace.
double dg_error(const VectorField& f, const VectorFunction& exact,
                const std::function<std::array<Vec2, 2>(Vec2)>& exact_grad, double sigma);

/// Smallest generalized eigenvalue of (A, G), optionally on the Euclidean
/// complement of `kernel` (a direction annihilated by both A and G).
double estimate_coercivity(const Eigen::MatrixXd& A, const Eigen::MatrixXd& G,
                           const std::optional<Eigen::VectorXd>& kernel = std::nullopt);

/// inf over p of sup over theta of (p^T B theta) / (|p|_Mp |theta|_G).
/// If `pressure_kernel` is given, p ranges over its Mp-orthogonal complement.
double estimate_infsup(const Eigen::MatrixXd& B, const Eigen::MatrixXd& G, const Eigen::MatrixXd& Mp,
                       const std::optional<Eigen::VectorXd>& pressure_kernel = std::nullopt);

struct ConstantProbes {
  double k_alpha = 0.0;    // coercivity of a_D on the zero-mean complement
  double k_eps = 0.0;      // coercivity of a_eps on X_h
  double beta = 0.0;       // inf-sup of b_P on zero-mean Q_h
  double c_gamma = 0.0;    // sampled boundedness constant of a_A
};

/// Runs all eigenprobes on the given discretization (dense; desk scale only).
ConstantProbes probe_constants(std::shared_ptr<const ScalarSpace> scalar,
                               std::shared_ptr<const VectorSpace> velocity,
                               std::shared_ptr<const ScalarSpace> pressure, double sigma,
                               int boundedness_samples = 100, unsigned seed = 1);

/// Random trigonometric polynomial sum a_kl cos(k pi x + phase) cos(l pi y + phase'),
/// 0 <= k, l <= modes, with amplitudes decaying like 1 / (1 + k + l).
ScalarFunction smooth_random_function(std::mt19937_64& rng, int modes = 3);

/// Largest sampled |a_A(c, v, chi)| / ((|c|_DG + |(c,1)|) |v|_DG |chi|_DG)
/// over projections of smooth random functions. Fields with independent
/// random coefficients are grid-scale noise, for which the ratio decays like
/// h^3 and says nothing about the constant.
double probe_boundedness_a_A(std::shared_ptr<const ScalarSpace> scalar,
                             std::shared_ptr<const VectorSpace> velocity, double sigma, int samples,
                             std::mt19937_64& rng);

/// Per-element mass balance of the c-equation tested with the indicator of
/// each element:
///   1/tau (c^n - c^{n-1}, 1)_E - <{grad mu} . n_E>_dE + <{c^{n-1}} {v} . n_E>_dE
///   + sigma/h_e <mu^int - mu^ext>_dE - (f_c, 1)_E
/// over interior faces of E (the c-equation carries no boundary terms).
std::vector<double> elementwise_mass_residuals(const ScalarField& c_new, const ScalarField& c_old,
                                               const ScalarField& mu, const VectorField& v,
                                               double tau, double sigma,
                                               const ScalarFunction* forcing = nullptr);

/// Random field with uniform coefficients in [-1, 1].
ScalarField random_field(std::shared_ptr<const ScalarSpace> space, std::mt19937_64& rng);
VectorField random_field(std::shared_ptr<const VectorSpace> space, std::mt19937_64& rng);

}  // namespace chns
