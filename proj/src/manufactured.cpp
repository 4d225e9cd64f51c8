#include "chns/manufactured.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "chns/diagnostics.hpp"
#include "chns/errors.hpp"

namespace chns {
namespace {
#include "manufactured_generated.inc"
}  // namespace

Forcing ManufacturedCase::forcing() const {
  Forcing f;
  f.mass = f_c;
  f.momentum = f_v;
  f.mass_source_mean_free = true;
  return f;
}

ManufacturedCase builtin_case(double kappa, double mu_s) {
  ManufacturedCase m;
  m.name = "builtin";
  m.kappa = kappa;
  m.mu_s = mu_s;
  m.potential = Potential::ginzburg_landau();
  auto at = [kappa, mu_s](Vec2 x, double t) { return manufactured_values(x.x, x.y, t, kappa, mu_s); };
  m.c = [at](Vec2 x, double t) { return at(x, t).c; };
  m.mu = [at](Vec2 x, double t) { return at(x, t).mu; };
  m.p = [at](Vec2 x, double t) { return at(x, t).p; };
  m.grad_c = [at](Vec2 x, double t) {
    const auto r = at(x, t);
    return Vec2{r.c_x, r.c_y};
  };
  m.grad_mu = [at](Vec2 x, double t) {
    const auto r = at(x, t);
    return Vec2{r.mu_x, r.mu_y};
  };
  m.v = [at](Vec2 x, double t) {
    const auto r = at(x, t);
    return Vec2{r.v0, r.v1};
  };
  m.grad_v = [at](Vec2 x, double t) {
    const auto r = at(x, t);
    return std::array<Vec2, 2>{Vec2{r.v0_x, r.v0_y}, Vec2{r.v1_x, r.v1_y}};
  };
  m.f_c = [at](Vec2 x, double t) { return at(x, t).f_c; };
  m.f_v = [at](Vec2 x, double t) {
    const auto r = at(x, t);
    return Vec2{r.f_v0, r.f_v1};
  };
  return m;
}

ManufacturedCase stationary_case(double cbar, double kappa, double mu_s, Potential potential) {
  ManufacturedCase m;
  m.name = "stationary";
  m.kappa = kappa;
  m.mu_s = mu_s;
  m.potential = potential;
  const double mu = potential.dphi(cbar);
  m.c = [cbar](Vec2, double) { return cbar; };
  m.mu = [mu](Vec2, double) { return mu; };
  m.p = [](Vec2, double) { return 0.0; };
  m.grad_c = [](Vec2, double) { return Vec2{}; };
  m.grad_mu = [](Vec2, double) { return Vec2{}; };
  m.v = [](Vec2, double) { return Vec2{}; };
  m.grad_v = [](Vec2, double) { return std::array<Vec2, 2>{}; };
  m.f_c = [](Vec2, double) { return 0.0; };
  m.f_v = [](Vec2, double) { return Vec2{}; };
  return m;
}

double ConvergenceTable::error(const ConvergenceRow& r, const std::string& column) {
  if (column == "err_c_dg") return r.err_c_dg;
  if (column == "err_v_l2") return r.err_v_l2;
  if (column == "err_v_dg_acc") return r.err_v_dg_acc;
  if (column == "err_mu_dg_acc") return r.err_mu_dg_acc;
  throw std::invalid_argument("unknown error column " + column);
}

std::vector<std::optional<double>> ConvergenceTable::eoc(const std::string& column, double floor) const {
  std::vector<std::optional<double>> out(rows.size());
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double a = error(rows[k - 1], column), b = error(rows[k], column);
    if (a > floor && b > floor) out[k] = std::log2(a / b);
  }
  return out;
}

void ConvergenceTable::write_csv(std::ostream& out) const {
  out << "n,h,tau,err_c_dg,err_v_l2,err_v_dg_acc,err_mu_dg_acc";
  for (const char* c : kErrorColumns) out << ",eoc_" << (std::string(c).substr(4));
  out << "\n";
  std::vector<std::vector<std::optional<double>>> rates;
  for (const char* c : kErrorColumns) rates.push_back(eoc(c));
  const auto old_precision = out.precision(17);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    out << r.n << ',' << r.h << ',' << r.tau << ',' << r.err_c_dg << ',' << r.err_v_l2 << ','
        << r.err_v_dg_acc << ',' << r.err_mu_dg_acc;
    for (const auto& col : rates) {
      out << ',';
      if (col[k]) out << *col[k];
      else out << "nan";
    }
    out << "\n";
  }
  out.precision(old_precision);
}

ConvergenceTable run_convergence(const ManufacturedCase& mcase, const ConvergenceOptions& opts,
                                 const std::function<void(const ConvergenceRow&)>& progress) {
  if (opts.runs.empty()) throw std::invalid_argument("run_convergence: no runs");
  const int q = opts.degree;
  const double sigma = opts.sigma > 0.0 ? opts.sigma : 10.0 * q * q;
  ConvergenceTable table;
  for (const ConvergenceRun& run : opts.runs) {
    const auto start = std::chrono::steady_clock::now();
    auto mesh = std::make_shared<Mesh>(structured_unit_square(run.n));
    auto disc = std::make_shared<Discretization>(mesh, q, sigma);
    SchemeParams params;
    params.tau = run.tau;
    params.kappa = mcase.kappa;
    params.mu_s = mcase.mu_s;
    params.potential = mcase.potential;
    Stepper stepper(disc, params, mcase.forcing());

    ConvergenceRow row;
    row.n = run.n;
    row.h = mesh->h_max();
    row.tau = run.tau;
    const TimeStepState init = stepper.initialize([&](Vec2 x) { return mcase.c(x, 0.0); },
                                                  [&](Vec2 x) { return mcase.grad_c(x, 0.0); },
                                                  [&](Vec2 x) { return mcase.v(x, 0.0); });
    const double mass0 = init.diag.mass;
    auto record = [&](const TimeStepState& s) {
      const double t = s.time;
      row.err_c_dg = std::max(row.err_c_dg, dg_error(s.c, [&](Vec2 x) { return mcase.grad_c(x, t); }, sigma));
      row.err_v_l2 = std::max(row.err_v_l2, l2_error(s.v, [&](Vec2 x) { return mcase.v(x, t); }));
      row.max_mass_drift = std::max(row.max_mass_drift, std::abs(s.diag.mass - mass0));
      if (s.step > 0) {
        const double ev = dg_error(
            s.v, [&](Vec2 x) { return mcase.v(x, t); }, [&](Vec2 x) { return mcase.grad_v(x, t); }, sigma);
        const double em = dg_error(s.mu, [&](Vec2 x) { return mcase.grad_mu(x, t); }, sigma);
        row.err_v_dg_acc += run.tau * ev * ev;
        row.err_mu_dg_acc += run.tau * em * em;
        ++row.steps;
      }
    };
    record(init);
    // Only the current state is kept; the trajectory can be long.
    TimeStepState state = init;
    const double steps_real = opts.t_final / run.tau;
    const long steps = std::lround(steps_real);
    if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > 1e-8 * steps_real) {
      throw ConfigError("mms.T", "final time must be a positive integer multiple of tau");
    }
    for (long k = 0; k < steps; ++k) {
      state = stepper.step(state);
      record(state);
    }
    row.err_v_dg_acc = std::sqrt(row.err_v_dg_acc);
    row.err_mu_dg_acc = std::sqrt(row.err_mu_dg_acc);
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (progress) progress(row);
    table.rows.push_back(row);
  }
  return table;
}

ConvergenceOptions spatial_study(int degree, const std::vector<int>& meshes, double factor, int multiple) {
  if (meshes.empty()) throw std::invalid_argument("spatial_study: no meshes");
  ConvergenceOptions o;
  o.degree = degree;
  // tau = factor h_max^q with h_max = sqrt(2) / n; steps = multiple n^q.
  const double hq_n = std::pow(std::sqrt(2.0), degree);
  o.t_final = factor * hq_n * multiple;
  for (int n : meshes) {
    const double nq = std::pow(static_cast<double>(n), degree);
    o.runs.push_back({n, o.t_final / (multiple * nq)});
  }
  return o;
}

ConvergenceOptions temporal_study(int degree, int n, double t_final, const std::vector<int>& steps) {
  ConvergenceOptions o;
  o.degree = degree;
  o.t_final = t_final;
  for (int k : steps) o.runs.push_back({n, t_final / k});
  return o;
}

}  // namespace chns
