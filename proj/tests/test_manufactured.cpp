#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "chns/quadrature.hpp"

#include "chns/manufactured.hpp"

using namespace chns;

namespace {
const double kPi = std::numbers::pi;
const double kKappa = 0.05;
const double kMuS = 0.7;

// Independent hand-derived closed forms.
double c_hand(Vec2 x, double t) { return std::exp(-t) * std::cos(kPi * x.x) * std::cos(kPi * x.y); }
double mu_hand(Vec2 x, double t) {
  const double c = c_hand(x, t);
  return c * c * c - c + 2 * kPi * kPi * kKappa * c;
}
Vec2 v_hand(Vec2 x, double t) {
  const double sx = std::sin(kPi * x.x), sy = std::sin(kPi * x.y);
  const double cx = std::cos(kPi * x.x), cy = std::cos(kPi * x.y);
  return {std::exp(-t) * 2 * kPi * sx * sx * sy * cy, -std::exp(-t) * 2 * kPi * sx * cx * sy * sy};
}

template <class F>
double lap_fd(F f, Vec2 x, double h) {
  return (f(x + Vec2{h, 0}) + f(x - Vec2{h, 0}) + f(x + Vec2{0, h}) + f(x - Vec2{0, h}) - 4 * f(x)) / (h * h);
}
template <class F>
Vec2 grad_fd(F f, Vec2 x, double h) {
  return {(f(x + Vec2{h, 0}) - f(x - Vec2{h, 0})) / (2 * h), (f(x + Vec2{0, h}) - f(x - Vec2{0, h})) / (2 * h)};
}
}  // namespace

TEST(Manufactured, GeneratedFormsMatchIndependentPaths) {
  const ManufacturedCase m = builtin_case(kKappa, kMuS);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int k = 0; k < 50; ++k) {
    const Vec2 x{u(rng), u(rng)};
    const double t = u(rng);
    EXPECT_NEAR(m.c(x, t), c_hand(x, t), 1e-14);
    EXPECT_NEAR(m.mu(x, t), mu_hand(x, t), 1e-13);
    EXPECT_NEAR(m.v(x, t).x, v_hand(x, t).x, 1e-13);
    EXPECT_NEAR(m.v(x, t).y, v_hand(x, t).y, 1e-13);
    EXPECT_NEAR(m.p(x, t), std::exp(-t) * std::cos(kPi * x.x), 1e-14);

    const double h = 1e-4;
    auto cf = [&](Vec2 y) { return m.c(y, t); };
    auto muf = [&](Vec2 y) { return m.mu(y, t); };
    const Vec2 gc = grad_fd(cf, x, h), gmu = grad_fd(muf, x, h);
    EXPECT_NEAR(m.grad_c(x, t).x, gc.x, 1e-6);
    EXPECT_NEAR(m.grad_mu(x, t).y, gmu.y, 1e-6);
    const auto gv = m.grad_v(x, t);
    const Vec2 gv0 = grad_fd([&](Vec2 y) { return m.v(y, t).x; }, x, h);
    const Vec2 gv1 = grad_fd([&](Vec2 y) { return m.v(y, t).y; }, x, h);
    EXPECT_NEAR(gv[0].x, gv0.x, 1e-6);
    EXPECT_NEAR(gv[0].y, gv0.y, 1e-6);
    EXPECT_NEAR(gv[1].x, gv1.x, 1e-6);
    EXPECT_NEAR(gv[1].y, gv1.y, 1e-6);

    // f_c = dc/dt - lap mu + v . grad c, by finite differences.
    const double hl = 1e-3;
    const double dt = (m.c(x, t + h) - m.c(x, t - h)) / (2 * h);
    const double fc = dt - lap_fd(muf, x, hl) + m.v(x, t).dot(m.grad_c(x, t));
    EXPECT_NEAR(m.f_c(x, t), fc, 2e-4 * std::max(1.0, std::abs(fc)));

    // f_v = dv/dt + (v . grad) v - mu_s lap v + grad p + c grad mu.
    const Vec2 v = m.v(x, t);
    const Vec2 dvdt = (m.v(x, t + h) - m.v(x, t - h)) * (1.0 / (2 * h));
    const Vec2 conv{v.dot(gv[0]), v.dot(gv[1])};
    const Vec2 lapv{lap_fd([&](Vec2 y) { return m.v(y, t).x; }, x, hl),
                    lap_fd([&](Vec2 y) { return m.v(y, t).y; }, x, hl)};
    const Vec2 gp = grad_fd([&](Vec2 y) { return m.p(y, t); }, x, h);
    const Vec2 fv = dvdt + conv - lapv * kMuS + gp + m.grad_mu(x, t) * m.c(x, t);
    EXPECT_NEAR(m.f_v(x, t).x, fv.x, 2e-4 * std::max(1.0, std::abs(fv.x)));
    EXPECT_NEAR(m.f_v(x, t).y, fv.y, 2e-4 * std::max(1.0, std::abs(fv.y)));
  }
}

TEST(Manufactured, InvariantAudit) {
  const ManufacturedCase m = builtin_case(kKappa, kMuS);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec2 x{u(rng), u(rng)};
    const double t = 2 * u(rng);
    const auto gv = m.grad_v(x, t);
    EXPECT_LE(std::abs(gv[0].x + gv[1].y), 1e-12);
    // Boundary traces on the four sides at the same tangential coordinate.
    const double s = x.x;
    for (const Vec2& b : {Vec2{0, s}, Vec2{1, s}, Vec2{s, 0}, Vec2{s, 1}}) {
      EXPECT_LE(m.v(b, t).norm(), 1e-12);
    }
    for (const Vec2& b : {Vec2{0, s}, Vec2{1, s}}) {
      EXPECT_LE(std::abs(m.grad_c(b, t).x), 1e-12);
      EXPECT_LE(std::abs(m.grad_mu(b, t).x), 1e-12);
    }
    for (const Vec2& b : {Vec2{s, 0}, Vec2{s, 1}}) {
      EXPECT_LE(std::abs(m.grad_c(b, t).y), 1e-12);
      EXPECT_LE(std::abs(m.grad_mu(b, t).y), 1e-12);
    }
  }
}

TEST(Manufactured, MassAndMidpointPotential) {
  const ManufacturedCase m = builtin_case(kKappa, kMuS);
  // (c(0), 1) = 0 and (p, 1) = 0 with a tensor Gauss rule.
  std::vector<double> gx, gw;
  gauss_legendre(20, gx, gw);
  double mass = 0.0, pm = 0.0, fm = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const Vec2 x{0.5 * (gx[i] + 1), 0.5 * (gx[j] + 1)};
      const double w = 0.25 * gw[i] * gw[j];
      mass += w * m.c(x, 0.0);
      pm += w * m.p(x, 0.3);
      fm += w * m.f_c(x, 0.3);
    }
  }
  EXPECT_NEAR(mass, 0.0, 1e-14);
  EXPECT_NEAR(pm, 0.0, 1e-14);
  EXPECT_NEAR(fm, 0.0, 1e-12);
  const double mu = m.mu({0.5, 0.5}, 0.0);
  EXPECT_TRUE(std::isfinite(mu));
  const double c = m.c({0.5, 0.5}, 0.0);
  EXPECT_NEAR(mu, Potential::ginzburg_landau().dphi(c) + 2 * kPi * kPi * kKappa * c, 1e-14);
}

TEST(Manufactured, StationaryCaseIsReproduced) {
  const ManufacturedCase m = stationary_case(0.2, 0.02, 1.0);
  ConvergenceOptions o = temporal_study(1, 4, 0.4, {2, 4});
  const ConvergenceTable t = run_convergence(m, o);
  for (const auto& r : t.rows) {
    EXPECT_LT(r.err_c_dg, 1e-10);
    EXPECT_LT(r.err_v_l2, 1e-10);
    EXPECT_LT(r.err_mu_dg_acc, 1e-10);
    EXPECT_LT(r.err_v_dg_acc, 1e-10);
  }
  for (const char* col : ConvergenceTable::kErrorColumns) {
    for (const auto& e : t.eoc(col)) EXPECT_FALSE(e.has_value());
  }
  std::ostringstream csv;
  t.write_csv(csv);
  EXPECT_NE(csv.str().find("nan"), std::string::npos);
}

TEST(Manufactured, StudyBuilders) {
  const ConvergenceOptions s = spatial_study(1, {4, 8, 16}, 0.1, 2);
  ASSERT_EQ(s.runs.size(), 3u);
  for (const auto& r : s.runs) {
    EXPECT_NEAR(r.tau, 0.1 * std::sqrt(2.0) / r.n, 1e-15);
    const double steps = s.t_final / r.tau;
    EXPECT_NEAR(steps, std::round(steps), 1e-9);
  }
  const ConvergenceOptions s2 = spatial_study(2, {4, 8}, 0.1, 1);
  for (const auto& r : s2.runs) EXPECT_NEAR(r.tau, 0.1 * 2.0 / (r.n * r.n), 1e-15);
  const ConvergenceOptions tt = temporal_study(1, 32, 0.5, {4, 8, 16});
  EXPECT_NEAR(tt.runs[2].tau, 0.5 / 16, 1e-16);
}

TEST(Manufactured, CoarseSpatialTrend) {
  // Cheap sanity check: errors decrease and mass is conserved with forcing.
  const ManufacturedCase m = builtin_case(0.05, 1.0);
  ConvergenceOptions o = spatial_study(1, {2, 4}, 0.1, 2);
  const ConvergenceTable t = run_convergence(m, o);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_LT(t.rows[1].err_c_dg, t.rows[0].err_c_dg);
  for (const auto& r : t.rows) EXPECT_LT(r.max_mass_drift, 1e-12);
  std::ostringstream csv;
  t.write_csv(csv);
  EXPECT_EQ(csv.str().substr(0, 8), "n,h,tau,");
  EXPECT_NE(csv.str().find("eoc_c_dg"), std::string::npos);
}
