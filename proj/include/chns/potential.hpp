#pragma once

#include <optional>
#include <string>

namespace chns {

/// Chemical energy density with a convex/concave split Phi = Phi+ + Phi-.
///
/// Ginzburg-Landau:  Phi = (1+c)^2 (1-c)^2 / 4,
///                   Phi+ = (1 + c^4) / 4,  Phi- = -c^2 / 2.
/// Logarithmic:      Phi+ = theta/2 [(1+c) log((1+c)/2) + (1-c) log((1-c)/2)],
///                   Phi- = theta_c/2 (1 - c^2).
///
/// Outside [-1+delta, 1-delta] the logarithmic Phi+ is replaced by its
/// second-order Taylor polynomial at the joint, which keeps Phi+ convex and
/// C^2 on the whole real line. The Ginzburg-Landau Phi+ accepts the same kind
/// of extension beyond |c| = R when a truncation radius is given.
class Potential {
 public:
  enum class Kind { GinzburgLandau, Logarithmic };

  static Potential ginzburg_landau(std::optional<double> trunc_radius = std::nullopt);
  static Potential logarithmic(double theta, double theta_c, double delta_trunc = 0.05);

  Kind kind() const { return kind_; }
  double theta() const { return theta_; }
  double theta_c() const { return theta_c_; }
  double delta_trunc() const { return delta_; }
  std::optional<double> trunc_radius() const { return radius_; }
  std::string name() const;

  double phi(double c) const { return phi_plus(c) + phi_minus(c); }
  double dphi(double c) const { return dphi_plus(c) + dphi_minus(c); }

  double phi_plus(double c) const;
  double dphi_plus(double c) const;
  double d2phi_plus(double c) const;

  double phi_minus(double c) const;
  double dphi_minus(double c) const;
  double d2phi_minus(double c) const;
  /// Phi- is quadratic for both variants.
  double d3phi_minus(double) const { return 0.0; }

 private:
  Potential(Kind kind, double theta, double theta_c, double delta, std::optional<double> radius);

  // Untruncated convex part and derivatives.
  double raw_plus(double c) const;
  double raw_dplus(double c) const;
  double raw_d2plus(double c) const;
  // Joint beyond which Phi+ is extended quadratically, if any.
  std::optional<double> joint() const;

  Kind kind_;
  double theta_ = 0.0;
  double theta_c_ = 0.0;
  double delta_ = 0.0;
  std::optional<double> radius_;
};

}  // namespace chns
