// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number, e.g. `acceptance 1 2 10`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "chns/driver.hpp"
#include "chns/initial_data.hpp"
#include "poly_oracle.hpp"

using namespace chns;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double spread(const std::vector<double>& x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return (*hi - *lo) / *hi;
}

const std::vector<double> kSweepTaus = {1e-3, 1e-1, 10.0};

RunConfig sweep_config(double tau) {
  RunConfig cfg;
  cfg.mesh_n = 8;
  cfg.degree = 1;
  cfg.potential_kind = Potential::Kind::GinzburgLandau;
  cfg.preset = InitialPreset::Spinodal;
  cfg.seed = 7;
  cfg.amplitude = 0.2;
  cfg.tau = tau;
  cfg.t_final = 20 * tau;
  return cfg;
}

// Criteria 1-3 share one sweep.
std::map<double, SimulationResult>& sweep(double& seconds) {
  static std::map<double, SimulationResult> results;
  static double elapsed = 0.0;
  if (results.empty()) {
    Timer t;
    for (double tau : kSweepTaus) results.emplace(tau, simulate(sweep_config(tau)));
    elapsed = t.seconds();
  }
  seconds = elapsed;
  return results;
}

Outcome mass_conservation() {
  double secs = 0.0;
  auto& runs = sweep(secs);
  double worst = 0.0;
  for (auto& [tau, r] : runs) worst = std::max(worst, r.mass_drift);
  const double area = make_mesh(sweep_config(1.0))->total_area();
  return {worst <= 1e-11 * area && secs < 60.0,
          fmt("max |mass(n) - mass(0)| = %.2e (limit %.0e), sweep %.1f s", worst, 1e-11 * area, secs)};
}

Outcome energy_dissipation() {
  double secs = 0.0;
  auto& runs = sweep(secs);
  double worst = -INFINITY;
  for (auto& [tau, r] : runs) worst = std::max(worst, r.max_energy_increase);
  return {worst <= 1e-10 && secs < 60.0, fmt("max F(k+1) - F(k) = %.3e over tau in {1e-3, 0.1, 10}", worst)};
}

Outcome stability_bound() {
  const RunConfig base = sweep_config(1.0);
  const auto mesh = make_mesh(base);
  const double sigma = base.effective_sigma();
  auto s = std::make_shared<ScalarSpace>(mesh, 1);
  const ConstantProbes k = probe_constants(s, std::make_shared<VectorSpace>(s),
                                           std::make_shared<ScalarSpace>(mesh, 0), sigma, 0);
  double worst = -INFINITY;
  for (double tau : kSweepTaus) {
    const RunConfig cfg = sweep_config(tau);
    double F0 = 0.0, dissipated = 0.0;
    simulate(cfg, [&](const TimeStepState& st) {
      if (st.step == 0) {
        F0 = st.diag.energy.total;
        return;
      }
      dissipated += tau * (k.k_alpha * st.diag.mu_dg * st.diag.mu_dg +
                           k.k_eps * cfg.mu_s * st.diag.v_dg * st.diag.v_dg);
      const double c_dg = dg_norm(st.c, sigma);
      const double lhs = dissipated + st.diag.energy.kinetic + cfg.kappa * k.k_alpha / 2.0 * c_dg * c_dg +
                         st.diag.energy.chemical;
      worst = std::max(worst, lhs - F0);
    });
  }
  return {worst <= 1e-8, fmt("max (lhs - F_h(c0, v0)) = %.3e, K_alpha = %.4f, K_eps = %.4f", worst, k.k_alpha,
                             k.k_eps)};
}

std::string eoc_list(const std::vector<std::optional<double>>& e) {
  std::string s;
  for (std::size_t i = 1; i < e.size(); ++i) s += (s.empty() ? "" : "/") + (e[i] ? fmt("%.3f", *e[i]) : "n/a");
  return s;
}

bool rates_in(const std::vector<std::optional<double>>& e, double lo, double hi) {
  for (std::size_t i = 1; i < e.size(); ++i)
    if (!e[i] || *e[i] < lo || *e[i] > hi) return false;
  return e.size() > 1;
}

Outcome spatial_convergence() {
  Timer t;
  RunConfig cfg;
  cfg.mms_study = MmsStudy::Spatial;
  cfg.degree = 1;
  cfg.mms_meshes = {4, 8, 16};
  const ConvergenceTable q1 = verify_mms(cfg);
  cfg.degree = 2;
  cfg.mms_meshes = {4, 8};
  const ConvergenceTable q2 = verify_mms(cfg);
  const double secs = t.seconds();
  const auto c1 = q1.eoc("err_c_dg"), m1 = q1.eoc("err_mu_dg_acc");
  const auto c2 = q2.eoc("err_c_dg"), m2 = q2.eoc("err_mu_dg_acc");
  const bool ok = rates_in(c1, 0.8, 1.3) && rates_in(m1, 0.8, 1.3) && rates_in(c2, 1.7, 2.4) &&
                  rates_in(m2, 1.7, 2.4) && secs < 600.0;
  return {ok, "q=1 EOC c " + eoc_list(c1) + ", mu " + eoc_list(m1) + "; q=2 EOC c " + eoc_list(c2) + ", mu " +
                  eoc_list(m2) + fmt("; %.0f s", secs)};
}

Outcome temporal_convergence() {
  Timer t;
  RunConfig cfg;
  cfg.mms_study = MmsStudy::Temporal;
  cfg.degree = 1;
  cfg.mms_n = 32;
  cfg.mms_steps = {4, 8, 16};
  cfg.mms_t_final = 0.5;
  const ConvergenceTable tab = verify_mms(cfg);
  const double secs = t.seconds();
  const auto e = tab.eoc("err_v_l2");
  std::string errs;
  for (const auto& r : tab.rows) errs += (errs.empty() ? "" : "/") + fmt("%.4e", r.err_v_l2);
  return {rates_in(e, 0.8, 1.2) && secs < 600.0,
          "max_n |v - v_h|_L2 = " + errs + ", EOC " + eoc_list(e) + fmt("; %.0f s", secs)};
}

Outcome form_identities() {
  RunConfig cfg;
  cfg.mesh_n = 4;
  const auto mesh = make_mesh(cfg);
  std::mt19937_64 rng(2024);
  double worst_ab = 0.0, worst_c = INFINITY, worst_c_smooth = INFINITY, worst_sym = 0.0;
  for (int q = 1; q <= 2; ++q) {
    const double sigma = 10.0 * q * q;
    auto s = std::make_shared<ScalarSpace>(mesh, q);
    auto v = std::make_shared<VectorSpace>(s);
    for (int k = 0; k < 50; ++k) {
      const ScalarField c = random_field(s, rng), mu = random_field(s, rng);
      const VectorField th = random_field(v, rng);
      const double aA = eval_a_A(c, th, mu);
      worst_ab = std::max(worst_ab, std::abs(aA - eval_b_I(c, mu, th)) / std::max(1.0, std::abs(aA)));
      const VectorField w = random_field(v, rng), z = random_field(v, rng);
      worst_c = std::min(worst_c, eval_a_C(w, w, z, z));
      // Projections of smooth fields have small jumps, so a_C sits near zero.
      const ScalarFunction f0 = smooth_random_function(rng), f1 = smooth_random_function(rng);
      const ScalarFunction g0 = smooth_random_function(rng), g1 = smooth_random_function(rng);
      const VectorField ws = l2_project([&](Vec2 x) { return Vec2{f0(x), f1(x)}; }, v);
      const VectorField zs = l2_project([&](Vec2 x) { return Vec2{g0(x), g1(x)}; }, v);
      const double smooth = eval_a_C(ws, ws, zs, zs);
      worst_c = std::min(worst_c, smooth);
      worst_c_smooth = std::min(worst_c_smooth, smooth);
    }
    for (const SparseMatrix& A : {assemble_a_D(*s, sigma), assemble_a_eps(*v, sigma)}) {
      const Eigen::MatrixXd D(A);
      worst_sym = std::max(worst_sym, (D - D.transpose()).cwiseAbs().maxCoeff() / D.cwiseAbs().maxCoeff());
    }
  }
  return {worst_ab <= 1e-12 && worst_c >= -1e-12 && worst_sym <= 1e-12,
          fmt("max |a_A - b_I| / max(1, |a_A|) = %.2e (100 triples), min a_C(v,v,z,z) = %.3e (200 pairs, %.3e smooth), "
              "max |A - A^T| / max |A| = %.2e",
              worst_ab, worst_c, worst_c_smooth, worst_sym)};
}

Outcome probes() {
  bool ok = true;
  std::string detail;
  for (int q = 1; q <= 2; ++q) {
    std::vector<double> ka, ke, beta;
    for (int n : {2, 4, 8}) {
      RunConfig c;
      c.mesh_n = n;
      const auto mesh = make_mesh(c);
      auto s = std::make_shared<ScalarSpace>(mesh, q);
      const ConstantProbes p = probe_constants(s, std::make_shared<VectorSpace>(s),
                                               std::make_shared<ScalarSpace>(mesh, q - 1), 10.0 * q * q, 0);
      ka.push_back(p.k_alpha);
      ke.push_back(p.k_eps);
      beta.push_back(p.beta);
    }
    auto positive = [](const std::vector<double>& x) { return *std::min_element(x.begin(), x.end()) > 0.0; };
    ok = ok && positive(ka) && positive(ke) && positive(beta) && spread(ka) <= 0.2 && spread(ke) <= 0.2 &&
         spread(beta) <= 0.2;
    detail += fmt("%sq=%d K_alpha %.4f..%.4f (%.1f%%), K_eps %.4f..%.4f (%.1f%%), beta %.4f..%.4f (%.1f%%)",
                  q == 1 ? "" : "; ", q, ka.front(), ka.back(), 100 * spread(ka), ke.front(), ke.back(),
                  100 * spread(ke), beta.front(), beta.back(), 100 * spread(beta));
  }
  return {ok, detail};
}

double state_distance(const TimeStepState& a, const TimeStepState& b, double sigma) {
  const ScalarField dc(a.c.space, a.c.coeffs - b.c.coeffs), dm(a.mu.space, a.mu.coeffs - b.mu.coeffs);
  const VectorField dv(a.v.space, a.v.coeffs - b.v.coeffs);
  const ScalarField dp(a.p.space, a.p.coeffs - b.p.coeffs);
  auto sq = [](double x) { return x * x; };
  // DG seminorms plus L2 parts, so constant offsets are not invisible.
  return std::sqrt(sq(dg_norm(dc, sigma)) + sq(dg_norm(dm, sigma)) + sq(dg_norm(dv, sigma)) + dc.coeffs.squaredNorm() +
                   dm.coeffs.squaredNorm() + dp.coeffs.squaredNorm());
}

Outcome unique_solvability() {
  RunConfig c;
  c.mesh_n = 8;
  const auto mesh = make_mesh(c);
  const double sigma = 10.0;
  auto disc = std::make_shared<Discretization>(mesh, 1, sigma);
  const SpinodalSeed seed(5, 0.3, 0.1);
  double worst = 0.0;
  int newton_a = 0, newton_b = 0;
  for (double tau : {1e-2, 1.0}) {
    for (auto pot : {Potential::ginzburg_landau(), Potential::logarithmic(1.0, 2.0, 0.05)}) {
      SchemeParams sp;
      sp.tau = tau;
      sp.potential = pot;
      const Stepper stepper(disc, sp);
      const TimeStepState s0 = stepper.initialize(seed.function(), seed.gradient_function(),
                                                  [](Vec2) { return Vec2{}; });
      // Guess A: the previous state (the default). Guess B: zero.
      const TimeStepState a = stepper.step(s0);
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(stepper.system(s0).size());
      const TimeStepState b = stepper.step(s0, zero);
      worst = std::max(worst, state_distance(a, b, sigma));
      newton_a = std::max(newton_a, a.diag.newton_iterations);
      newton_b = std::max(newton_b, b.diag.newton_iterations);
    }
  }
  return {worst <= 1e-8, fmt("max distance between solutions from two guesses = %.2e (Newton its %d vs %d)", worst,
                             newton_a, newton_b)};
}

Outcome elementwise_mass() {
  RunConfig cfg = sweep_config(1e-2);
  cfg.amplitude = 0.3;
  const auto mesh = make_mesh(cfg);
  std::set<int> boundary;
  for (const auto& f : mesh->boundary_faces()) boundary.insert(f.element);
  double worst = 0.0, max_v = 0.0;
  std::optional<TimeStepState> prev;
  simulate(cfg, [&](const TimeStepState& st) {
    if (prev) {
      const auto r = elementwise_mass_residuals(st.c, prev->c, st.mu, st.v, cfg.tau, cfg.effective_sigma());
      for (int e = 0; e < static_cast<int>(r.size()); ++e)
        if (!boundary.count(e)) worst = std::max(worst, std::abs(r[e]));
      max_v = std::max(max_v, st.v.coeffs.cwiseAbs().maxCoeff());
    }
    prev = st;
  });
  return {worst <= 1e-10 && max_v > 0.0,
          fmt("max interior-element residual = %.2e over 20 steps (max |v| coeff %.1e)", worst, max_v)};
}

Outcome oracle_equivalence() {
  const oracle::OracleMesh om = oracle::two_elements();
  const auto mesh = std::make_shared<Mesh>(om.vertices, om.elements);
  std::mt19937_64 rng(10);
  double worst = 0.0;
  std::string where;
  auto check = [&](const char* name, int q, double lib, double ref) {
    const double err = std::abs(lib - ref) / std::max(1.0, std::abs(ref));
    if (err > worst) {
      worst = err;
      where = fmt("%s q=%d", name, q);
    }
  };
  for (int q = 1; q <= 2; ++q) {
    const double sigma = 10.0 * q * q;
    auto s = std::make_shared<ScalarSpace>(mesh, q);
    auto p = std::make_shared<ScalarSpace>(mesh, q - 1);
    auto v = std::make_shared<VectorSpace>(s);
    for (int trial = 0; trial < 20; ++trial) {
      const auto c = oracle::random_scalar(om, q, rng), chi = oracle::random_scalar(om, q, rng);
      const auto pr = oracle::random_scalar(om, q - 1, rng);
      const auto w = oracle::random_vector(om, q, rng), u = oracle::random_vector(om, q, rng);
      const auto z = oracle::random_vector(om, q, rng), th = oracle::random_vector(om, q, rng);
      const ScalarField C = oracle::to_field(om, c, s), Chi = oracle::to_field(om, chi, s);
      const ScalarField P = oracle::to_field(om, pr, p);
      const VectorField W = oracle::to_field(om, w, v), U = oracle::to_field(om, u, v);
      const VectorField Z = oracle::to_field(om, z, v), Th = oracle::to_field(om, th, v);
      check("a_D", q, eval_a_D(*s, sigma, C, Chi), oracle::a_D(om, sigma, c, chi));
      check("a_eps", q, eval_a_eps(sigma, U, Th), oracle::a_eps(om, sigma, u, th));
      check("b_P", q, eval_b_P(P, Th), oracle::b_P(om, pr, th));
      check("a_A", q, eval_a_A(C, U, Chi), oracle::a_A(om, c, u, chi));
      check("b_I", q, eval_b_I(C, Chi, Th), oracle::b_I(om, c, chi, th));
      check("a_C", q, eval_a_C(W, U, Z, Th), oracle::a_C(om, w, u, z, th));
      check("a_C", q, eval_a_C(U, U, Z, Th), oracle::a_C(om, u, u, z, th));
    }
  }
  return {worst <= 1e-12, fmt("max error / max(1, |value|) = %.2e (worst: %s), 280 evaluations", worst,
                              where.empty() ? "none" : where.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"mass conservation", mass_conservation},
      {"energy dissipation", energy_dissipation},
      {"stability bound", stability_bound},
      {"spatial convergence", spatial_convergence},
      {"temporal convergence", temporal_convergence},
      {"form identities", form_identities},
      {"coercivity and inf-sup probes", probes},
      {"unique solvability", unique_solvability},
      {"elementwise mass balance", elementwise_mass},
      {"oracle equivalence", oracle_equivalence},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    Timer t;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2d %-30s %s  %s [%.1f s]\n", id, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), t.seconds());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
