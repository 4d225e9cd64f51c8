#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chns/stepper.hpp"

namespace chns {

/// Closed-form (c, mu, v, p)(x, t) with the forcings that make it an exact
/// solution of the model. mu = Phi'(c) - kappa lap(c) holds exactly, so only
/// the mass and momentum equations carry sources.
struct ManufacturedCase {
  std::string name;
  double kappa = 0.0;
  double mu_s = 0.0;
  Potential potential = Potential::ginzburg_landau();
  std::function<double(Vec2, double)> c, mu, p;
  std::function<Vec2(Vec2, double)> grad_c, grad_mu, v;
  std::function<std::array<Vec2, 2>(Vec2, double)> grad_v;
  std::function<double(Vec2, double)> f_c;
  std::function<Vec2(Vec2, double)> f_v;

  Forcing forcing() const;
};

/// Unit square, Ginzburg-Landau: c = e^{-t} cos(pi x) cos(pi y),
/// v = curl(e^{-t} sin^2(pi x) sin^2(pi y)), p = e^{-t} cos(pi x).
ManufacturedCase builtin_case(double kappa, double mu_s);

/// c = cbar, v = 0, p = 0, mu = Phi'(cbar); no forcing.
ManufacturedCase stationary_case(double cbar, double kappa, double mu_s,
                                 Potential potential = Potential::ginzburg_landau());

struct ConvergenceRun {
  int n = 0;        // structured mesh parameter
  double tau = 0.0;
};

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double tau = 0.0;
  int steps = 0;
  double err_c_dg = 0.0;      // max_n |c - c_h|_DG
  double err_v_l2 = 0.0;      // max_n |v - v_h|_L2
  double err_v_dg_acc = 0.0;  // (tau sum_n |v - v_h|_DG^2)^{1/2}
  double err_mu_dg_acc = 0.0; // (tau sum_n |mu - mu_h|_DG^2)^{1/2}
  double max_mass_drift = 0.0;
  double seconds = 0.0;
};

class ConvergenceTable {
 public:
  static constexpr std::array<const char*, 4> kErrorColumns = {"err_c_dg", "err_v_l2", "err_v_dg_acc",
                                                               "err_mu_dg_acc"};

  std::vector<ConvergenceRow> rows;

  static double error(const ConvergenceRow& r, const std::string& column);
  /// log2(e_{k-1} / e_k) for k >= 1; empty for row 0 or when either error is
  /// below `floor` (roundoff-level errors carry no rate).
  std::vector<std::optional<double>> eoc(const std::string& column, double floor = 1e-12) const;

  /// Columns n,h,tau,err_c_dg,err_v_l2,err_v_dg_acc,err_mu_dg_acc,eoc_c_dg,eoc_v_l2,
  /// eoc_v_dg_acc,eoc_mu_dg_acc; undefined rates are written as "nan".
  void write_csv(std::ostream& out) const;
};

struct ConvergenceOptions {
  int degree = 1;
  double sigma = 0.0;  // 0: 10 q^2
  double t_final = 0.0;
  std::vector<ConvergenceRun> runs;
};

/// Runs the forced scheme on each (mesh, tau) pair from the elliptic
/// projection of c(0) and the L2 projection of v(0) and records errors
/// against the exact solution at every t^n.
ConvergenceTable run_convergence(const ManufacturedCase& mcase, const ConvergenceOptions& opts,
                                 const std::function<void(const ConvergenceRow&)>& progress = nullptr);

/// tau = factor h^q with h = h_max of the structured mesh and t_final chosen
/// so that every run takes an integer number of steps (steps = multiple * n^q).
ConvergenceOptions spatial_study(int degree, const std::vector<int>& meshes, double factor, int multiple);
/// Fixed mesh, tau = t_final / k for each k.
ConvergenceOptions temporal_study(int degree, int n, double t_final, const std::vector<int>& steps);

}  // namespace chns
