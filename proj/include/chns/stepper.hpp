#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "chns/diagnostics.hpp"
#include "chns/dgspace.hpp"
#include "chns/forms.hpp"
#include "chns/potential.hpp"
#include "chns/projections.hpp"

namespace chns {

/// Spaces S_h (degree q), X_h (degree q), Q_h (degree q-1) on one mesh plus
/// the operators that do not depend on the lagged fields.
class Discretization {
 public:
  Discretization(std::shared_ptr<const Mesh> mesh, int degree, double sigma);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return scalar_->degree(); }
  double sigma() const { return forms_.sigma; }
  const std::shared_ptr<const ScalarSpace>& scalar() const { return scalar_; }
  const std::shared_ptr<const VectorSpace>& velocity() const { return velocity_; }
  const std::shared_ptr<const ScalarSpace>& pressure() const { return pressure_; }
  const AssembledForms& forms() const { return forms_; }
  const SparseMatrix& scalar_gram() const { return gram_s_; }
  const SparseMatrix& vector_gram() const { return gram_v_; }
  const Eigen::VectorXd& pressure_mean() const { return pressure_mean_; }
  const EllipticProjector& projector() const { return *projector_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const ScalarSpace> scalar_;
  std::shared_ptr<const VectorSpace> velocity_;
  std::shared_ptr<const ScalarSpace> pressure_;
  AssembledForms forms_;
  SparseMatrix gram_s_;
  SparseMatrix gram_v_;
  Eigen::VectorXd pressure_mean_;
  std::unique_ptr<EllipticProjector> projector_;
};

struct SchemeParams {
  double tau = 1e-2;
  double kappa = 1e-2;
  double mu_s = 1.0;
  Potential potential = Potential::ginzburg_landau();
  double newton_atol = 1e-10;
  double newton_rtol = 1e-12;
  int newton_max_iterations = 50;
  int max_halvings = 8;

  /// Throws ConfigError naming the offending parameter.
  void validate() const;
};

/// Source terms of the mass and momentum equations, evaluated at t^n.
struct Forcing {
  std::function<double(Vec2, double)> mass;
  std::function<Vec2(Vec2, double)> momentum;
  /// Set when the exact mass source integrates to zero: the quadrature defect
  /// of (f_c, 1) is removed so the discrete mass stays constant to roundoff.
  bool mass_source_mean_free = false;
};

struct StepDiagnostics {
  double mass = 0.0;
  EnergyReport energy;
  double mu_dg = 0.0;
  double v_dg = 0.0;
  int newton_iterations = 0;
  double residual_norm = 0.0;
};

/// (c_h^n, mu_h^n, v_h^n, p_h^n) and diagnostics. mu and p are zero at n = 0.
struct TimeStepState {
  int step = 0;
  double time = 0.0;
  ScalarField c;
  ScalarField mu;
  VectorField v;
  ScalarField p;
  StepDiagnostics diag;
};

/// Nonlinear algebraic system of one time step, unknown ordering
/// [c | mu | v | p | lambda], lambda the multiplier of the pressure mean.
/// Everything except (Phi+'(c), phi) is linear and assembled once.
class StepSystem {
 public:
  int size() const { return static_cast<int>(rhs_.size()); }
  Eigen::VectorXd residual(const Eigen::VectorXd& x) const;
  SparseMatrix jacobian(const Eigen::VectorXd& x) const;

  Eigen::VectorXd pack(const TimeStepState& s) const;
  void unpack(const Eigen::VectorXd& x, TimeStepState& s) const;

  const SparseMatrix& linear_part() const { return linear_; }

 private:
  friend class Stepper;
  StepSystem() = default;

  // (Phi+'(c), phi_i) and its derivative block, elevated rule.
  Eigen::VectorXd convex_term(const Eigen::VectorXd& c) const;
  SparseMatrix convex_jacobian(const Eigen::VectorXd& c) const;

  const Discretization* disc_ = nullptr;
  const Potential* potential_ = nullptr;
  const Eigen::MatrixXd* tab_ = nullptr;  // basis values at elevated points
  SparseMatrix linear_;
  Eigen::VectorXd rhs_;
  int ns_ = 0, nv_ = 0, np_ = 0;
};

/// Implicit Euler step with Picard-lagged transport and a convex-concave split
/// of the chemical potential. One monolithic Newton solve per step, fresh
/// sparse LU per iteration.
class Stepper {
 public:
  Stepper(std::shared_ptr<const Discretization> disc, SchemeParams params,
          std::optional<Forcing> forcing = std::nullopt);

  const Discretization& discretization() const { return *disc_; }
  const SchemeParams& params() const { return params_; }

  /// c_h^0 = elliptic projection of c0, v_h^0 = L2 projection of v0.
  TimeStepState initialize(const ScalarFunction& c0, const GradientFunction& grad_c0,
                           const VectorFunction& v0) const;
  TimeStepState initialize(const ScalarField& c0, const VectorField& v0) const;

  /// Advances one step. `initial_guess` (packed) defaults to the previous state.
  TimeStepState step(const TimeStepState& prev,
                     const std::optional<Eigen::VectorXd>& initial_guess = std::nullopt) const;

  /// Steps until T_final = N tau; returns the N+1 states including `initial`.
  /// `observer` is invoked after every step.
  std::vector<TimeStepState> run(
      const TimeStepState& initial, double t_final,
      const std::function<void(const TimeStepState&)>& observer = nullptr) const;

  StepSystem system(const TimeStepState& prev) const;

  /// Fills mass, energy, and DG norms of a state.
  void fill_diagnostics(TimeStepState& s) const;

 private:
  std::shared_ptr<const Discretization> disc_;
  SchemeParams params_;
  std::optional<Forcing> forcing_;
  Eigen::MatrixXd elevated_tab_;
};

}  // namespace chns
