#include "chns/stepper.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <string>

#include "chns/errors.hpp"

namespace chns {
namespace {

void add_block(std::vector<Eigen::Triplet<double>>& t, const SparseMatrix& m, int r0, int c0,
               double scale = 1.0) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      t.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()),
                     scale * it.value());
    }
  }
}

// Local element integrals (g(x), phi_i) with the elevated rule and tabulated
// reference values; g receives the element, the physical point and the
// quadrature index.
template <class G>
Eigen::VectorXd elevated_load(const ScalarSpace& sp, const Eigen::MatrixXd& tab, G&& g) {
  const Mesh& mesh = sp.mesh();
  const auto& rule = sp.elevated_volume_rule();
  const int n = sp.dofs_per_element();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sp.total_dofs());
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    const double detj = mesh.jacobian_determinant(e);
    const double scale = 1.0 / std::sqrt(detj);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * detj * scale * g(e, rule.points[q], static_cast<int>(q));
      for (int i = 0; i < n; ++i) out[sp.dof(e, i)] += w * tab(static_cast<Eigen::Index>(q), i);
    }
  }
  return out;
}

// Value of a scalar coefficient vector at elevated point q of element e.
double point_value(const ScalarSpace& sp, const Eigen::MatrixXd& tab, const Eigen::VectorXd& c,
                   int e, int q) {
  const int n = sp.dofs_per_element();
  const double scale = 1.0 / std::sqrt(sp.mesh().jacobian_determinant(e));
  return scale * tab.row(q).dot(c.segment(sp.dof(e, 0), n));
}

}  // namespace

Discretization::Discretization(std::shared_ptr<const Mesh> mesh, int degree, double sigma)
    : mesh_(std::move(mesh)) {
  if (degree < 1) throw ConfigError("space.q", "polynomial degree must be at least 1");
  if (!(sigma > 0.0)) throw ConfigError("space.sigma", "penalty must be positive");
  scalar_ = std::make_shared<ScalarSpace>(mesh_, degree);
  velocity_ = std::make_shared<VectorSpace>(scalar_);
  pressure_ = std::make_shared<ScalarSpace>(mesh_, degree - 1);
  forms_ = AssembledForms::build(*scalar_, *velocity_, *pressure_, sigma);
  gram_s_ = assemble_dg_gram(*scalar_, sigma);
  gram_v_ = assemble_dg_gram(*velocity_, sigma);
  pressure_mean_ = mean_functional(*pressure_);
  projector_ = std::make_unique<EllipticProjector>(scalar_, sigma);
}

void SchemeParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("scheme.tau", "must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("model.kappa", "must be positive");
  if (!(mu_s > 0.0) || !std::isfinite(mu_s)) throw ConfigError("model.mu_s", "must be positive");
  if (!(newton_atol >= 0.0) || !(newton_rtol >= 0.0) || newton_atol + newton_rtol <= 0.0) {
    throw ConfigError("newton.atol", "tolerances must be nonnegative, not both zero");
  }
  if (newton_max_iterations < 1) throw ConfigError("newton.max_iterations", "must be at least 1");
  if (max_halvings < 0) throw ConfigError("newton.max_halvings", "must be nonnegative");
}

// ---------------------------------------------------------------------------

Eigen::VectorXd StepSystem::convex_term(const Eigen::VectorXd& c) const {
  const ScalarSpace& sp = *disc_->scalar();
  return elevated_load(sp, *tab_, [&](int e, Vec2, int q) {
    return potential_->dphi_plus(point_value(sp, *tab_, c, e, q));
  });
}

SparseMatrix StepSystem::convex_jacobian(const Eigen::VectorXd& c) const {
  const ScalarSpace& sp = *disc_->scalar();
  const Mesh& mesh = sp.mesh();
  const auto& rule = sp.elevated_volume_rule();
  const int n = sp.dofs_per_element();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(mesh.num_elements()) * n * n);
  Eigen::MatrixXd local(n, n);
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    local.setZero();
    // |J| * (|J|^{-1/2})^2 = 1
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto qi = static_cast<Eigen::Index>(q);
      const double d2 = potential_->d2phi_plus(point_value(sp, *tab_, c, e, static_cast<int>(q)));
      local.noalias() += rule.weights[q] * d2 * tab_->row(qi).transpose() * tab_->row(qi);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) t.emplace_back(sp.dof(e, i), sp.dof(e, j), local(i, j));
    }
  }
  SparseMatrix m(sp.total_dofs(), sp.total_dofs());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::VectorXd StepSystem::residual(const Eigen::VectorXd& x) const {
  Eigen::VectorXd r = linear_ * x - rhs_;
  r.segment(ns_, ns_) += convex_term(x.head(ns_));
  return r;
}

SparseMatrix StepSystem::jacobian(const Eigen::VectorXd& x) const {
  const SparseMatrix jc = convex_jacobian(x.head(ns_));
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(linear_.nonZeros() + jc.nonZeros()));
  add_block(t, linear_, 0, 0);
  add_block(t, jc, ns_, 0);
  SparseMatrix j(size(), size());
  j.setFromTriplets(t.begin(), t.end());
  return j;
}

Eigen::VectorXd StepSystem::pack(const TimeStepState& s) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(size());
  x.segment(0, ns_) = s.c.coeffs;
  if (s.mu.coeffs.size() == ns_) x.segment(ns_, ns_) = s.mu.coeffs;
  x.segment(2 * ns_, nv_) = s.v.coeffs;
  if (s.p.coeffs.size() == np_) x.segment(2 * ns_ + nv_, np_) = s.p.coeffs;
  return x;
}

void StepSystem::unpack(const Eigen::VectorXd& x, TimeStepState& s) const {
  s.c = ScalarField(disc_->scalar(), x.segment(0, ns_));
  s.mu = ScalarField(disc_->scalar(), x.segment(ns_, ns_));
  s.v = VectorField(disc_->velocity(), x.segment(2 * ns_, nv_));
  s.p = ScalarField(disc_->pressure(), x.segment(2 * ns_ + nv_, np_));
}

// ---------------------------------------------------------------------------

Stepper::Stepper(std::shared_ptr<const Discretization> disc, SchemeParams params,
                 std::optional<Forcing> forcing)
    : disc_(std::move(disc)), params_(std::move(params)), forcing_(std::move(forcing)) {
  params_.validate();
  const ScalarSpace& sp = *disc_->scalar();
  const auto& rule = sp.elevated_volume_rule();
  const int n = sp.dofs_per_element();
  elevated_tab_.resize(static_cast<Eigen::Index>(rule.size()), n);
  std::vector<double> phi(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    sp.reference_basis().values(rule.points[q], phi);
    for (int i = 0; i < n; ++i) elevated_tab_(static_cast<Eigen::Index>(q), i) = phi[i];
  }
}

TimeStepState Stepper::initialize(const ScalarFunction& c0, const GradientFunction& grad_c0,
                                  const VectorFunction& v0) const {
  return initialize(disc_->projector().project(c0, grad_c0), l2_project(v0, disc_->velocity()));
}

TimeStepState Stepper::initialize(const ScalarField& c0, const VectorField& v0) const {
  TimeStepState s;
  s.c = c0.space == disc_->scalar() ? c0 : ScalarField(disc_->scalar(), c0.coeffs);
  s.v = v0.space == disc_->velocity() ? v0 : VectorField(disc_->velocity(), v0.coeffs);
  if (s.c.coeffs.size() != disc_->scalar()->total_dofs() ||
      s.v.coeffs.size() != disc_->velocity()->total_dofs()) {
    throw std::invalid_argument("initial data does not match the discretization");
  }
  s.mu = ScalarField(disc_->scalar());
  s.p = ScalarField(disc_->pressure());
  fill_diagnostics(s);
  return s;
}

StepSystem Stepper::system(const TimeStepState& prev) const {
  const Discretization& d = *disc_;
  const AssembledForms& f = d.forms();
  const double tau = params_.tau;
  const double t_new = prev.time + tau;

  StepSystem sys;
  sys.disc_ = disc_.get();
  sys.potential_ = &params_.potential;
  sys.tab_ = &elevated_tab_;
  sys.ns_ = d.scalar()->total_dofs();
  sys.nv_ = d.velocity()->total_dofs();
  sys.np_ = d.pressure()->total_dofs();
  const int ns = sys.ns_, nv = sys.nv_, np = sys.np_;
  const int oc = 0, om = ns, ov = 2 * ns, op = 2 * ns + nv, ol = op + np;
  const int size = ol + 1;

  const SparseMatrix a_A = assemble_a_A(prev.c, *d.velocity());
  const SparseMatrix b_I = assemble_b_I(prev.c, *d.scalar(), *d.velocity());
  const SparseMatrix a_C = assemble_a_C(prev.v, prev.v);

  std::vector<Eigen::Triplet<double>> t;
  add_block(t, f.mass_c, oc, oc, 1.0 / tau);
  add_block(t, f.a_D, oc, om);
  add_block(t, a_A, oc, ov);

  add_block(t, f.a_D, om, oc, params_.kappa);
  add_block(t, f.mass_c, om, om, -1.0);

  add_block(t, f.mass_v, ov, ov, 1.0 / tau);
  add_block(t, a_C, ov, ov);
  add_block(t, f.a_eps, ov, ov, params_.mu_s);
  const SparseMatrix bpt = f.b_P.transpose();
  add_block(t, bpt, ov, op);
  add_block(t, b_I, ov, om, -1.0);

  add_block(t, f.b_P, op, ov);
  const Eigen::VectorXd& m = d.pressure_mean();
  for (int i = 0; i < np; ++i) {
    if (m[i] != 0.0) {
      t.emplace_back(op + i, ol, m[i]);
      t.emplace_back(ol, op + i, m[i]);
    }
  }
  sys.linear_.resize(size, size);
  sys.linear_.setFromTriplets(t.begin(), t.end());

  const ScalarSpace& sp = *d.scalar();
  sys.rhs_ = Eigen::VectorXd::Zero(size);
  sys.rhs_.segment(oc, ns) = f.mass_c * prev.c.coeffs / tau;
  sys.rhs_.segment(om, ns) = -elevated_load(sp, elevated_tab_, [&](int e, Vec2, int q) {
    return params_.potential.dphi_minus(point_value(sp, elevated_tab_, prev.c.coeffs, e, q));
  });
  sys.rhs_.segment(ov, nv) = f.mass_v * prev.v.coeffs / tau;

  if (forcing_) {
    const Mesh& mesh = sp.mesh();
    if (forcing_->mass) {
      Eigen::VectorXd load = elevated_load(sp, elevated_tab_, [&](int e, Vec2 ref, int) {
        return forcing_->mass(mesh.to_physical(e, ref), t_new);
      });
      if (forcing_->mass_source_mean_free) {
        const Eigen::VectorXd one = constant_vector(sp);
        load -= (one.dot(load) / mesh.total_area()) * (f.mass_c * one);
      }
      sys.rhs_.segment(oc, ns) += load;
    }
    if (forcing_->momentum) {
      for (int k = 0; k < 2; ++k) {
        const Eigen::VectorXd load = elevated_load(sp, elevated_tab_, [&](int e, Vec2 ref, int) {
          const Vec2 fv = forcing_->momentum(mesh.to_physical(e, ref), t_new);
          return k == 0 ? fv.x : fv.y;
        });
        const int n = sp.dofs_per_element();
        for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
          for (int i = 0; i < n; ++i) {
            sys.rhs_[ov + d.velocity()->dof(e, k, i)] += load[sp.dof(e, i)];
          }
        }
      }
    }
  }
  return sys;
}

TimeStepState Stepper::step(const TimeStepState& prev,
                            const std::optional<Eigen::VectorXd>& initial_guess) const {
  const StepSystem sys = system(prev);
  Eigen::VectorXd x = initial_guess ? *initial_guess : sys.pack(prev);
  if (x.size() != sys.size()) throw std::invalid_argument("initial guess has the wrong size");

  Eigen::VectorXd r = sys.residual(x);
  double rnorm = r.norm();
  const double r0 = rnorm;
  int iters = 0;
  Eigen::SparseLU<SparseMatrix> lu;
  bool analyzed = false;
  while (!(rnorm <= params_.newton_atol || rnorm <= params_.newton_rtol * r0)) {
    if (iters == params_.newton_max_iterations) {
      throw NewtonDivergence("Newton did not converge in " + std::to_string(iters) +
                             " iterations at t = " + std::to_string(prev.time + params_.tau) +
                             " (residual " + std::to_string(rnorm) + ")");
    }
    SparseMatrix jac = sys.jacobian(x);
    jac.makeCompressed();
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) {
      throw SingularSystemError("Newton Jacobian factorization failed: " + lu.lastErrorMessage());
    }
    const Eigen::VectorXd dx = lu.solve(-r);
    if (!dx.allFinite()) throw SingularSystemError("Newton update is not finite");

    // Halve the step until the residual decreases; the last trial is kept
    // when none does.
    double alpha = 1.0;
    Eigen::VectorXd x_try = x + dx;
    Eigen::VectorXd r_try = sys.residual(x_try);
    for (int h = 0; h < params_.max_halvings && !(r_try.norm() < rnorm); ++h) {
      alpha *= 0.5;
      x_try = x + alpha * dx;
      r_try = sys.residual(x_try);
    }
    x = std::move(x_try);
    r = std::move(r_try);
    rnorm = r.norm();
    ++iters;
    if (!std::isfinite(rnorm)) throw NewtonDivergence("Newton residual is not finite");
  }

  TimeStepState s;
  s.step = prev.step + 1;
  s.time = prev.time + params_.tau;
  sys.unpack(x, s);
  fill_diagnostics(s);
  s.diag.newton_iterations = iters;
  s.diag.residual_norm = rnorm;
  return s;
}

std::vector<TimeStepState> Stepper::run(
    const TimeStepState& initial, double t_final,
    const std::function<void(const TimeStepState&)>& observer) const {
  const double steps_real = (t_final - initial.time) / params_.tau;
  const long steps = std::lround(steps_real);
  if (steps < 0 || std::abs(steps_real - static_cast<double>(steps)) > 1e-8 * std::max(1.0, steps_real)) {
    throw ConfigError("scheme.T", "final time must be a nonnegative integer multiple of tau");
  }
  std::vector<TimeStepState> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(initial);
  for (long n = 0; n < steps; ++n) {
    out.push_back(step(out.back()));
    if (observer) observer(out.back());
  }
  return out;
}

void Stepper::fill_diagnostics(TimeStepState& s) const {
  const Discretization& d = *disc_;
  s.diag.mass = total_mass(s.c);
  EnergyReport en;
  en.kinetic = 0.5 * s.v.coeffs.dot(d.forms().mass_v * s.v.coeffs);
  en.chemical = chemical_energy(s.c, params_.potential);
  en.interfacial = 0.5 * params_.kappa * s.c.coeffs.dot(d.forms().a_D * s.c.coeffs);
  en.total = en.kinetic + en.chemical + en.interfacial;
  s.diag.energy = en;
  s.diag.mu_dg = s.mu.coeffs.size() ? dg_norm(s.mu, d.sigma()) : 0.0;
  s.diag.v_dg = dg_norm(s.v, d.sigma());
}

}  // namespace chns
