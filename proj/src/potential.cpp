#include "chns/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace chns {

Potential::Potential(Kind kind, double theta, double theta_c, double delta,
                     std::optional<double> radius)
    : kind_(kind), theta_(theta), theta_c_(theta_c), delta_(delta), radius_(radius) {}

Potential Potential::ginzburg_landau(std::optional<double> trunc_radius) {
  if (trunc_radius && !(*trunc_radius > 0.0)) {
    throw std::invalid_argument("Potential: truncation radius must be positive");
  }
  return Potential(Kind::GinzburgLandau, 0.0, 0.0, 0.0, trunc_radius);
}

Potential Potential::logarithmic(double theta, double theta_c, double delta_trunc) {
  if (!(theta > 0.0)) throw std::invalid_argument("Potential: theta must be positive");
  if (!(theta_c > 0.0)) throw std::invalid_argument("Potential: theta_c must be positive");
  if (!(delta_trunc > 0.0 && delta_trunc < 1.0)) {
    throw std::invalid_argument("Potential: delta_trunc must lie in (0,1)");
  }
  return Potential(Kind::Logarithmic, theta, theta_c, delta_trunc, std::nullopt);
}

std::string Potential::name() const {
  return kind_ == Kind::GinzburgLandau ? "ginzburg_landau" : "logarithmic";
}

std::optional<double> Potential::joint() const {
  if (kind_ == Kind::Logarithmic) return 1.0 - delta_;
  return radius_;
}

double Potential::raw_plus(double c) const {
  if (kind_ == Kind::GinzburgLandau) return 0.25 * (1.0 + c * c * c * c);
  return 0.5 * theta_ *
         ((1.0 + c) * std::log(0.5 * (1.0 + c)) + (1.0 - c) * std::log(0.5 * (1.0 - c)));
}

double Potential::raw_dplus(double c) const {
  if (kind_ == Kind::GinzburgLandau) return c * c * c;
  return 0.5 * theta_ * std::log((1.0 + c) / (1.0 - c));
}

double Potential::raw_d2plus(double c) const {
  if (kind_ == Kind::GinzburgLandau) return 3.0 * c * c;
  return theta_ / (1.0 - c * c);
}

double Potential::phi_plus(double c) const {
  if (const auto j = joint(); j && std::abs(c) > *j) {
    const double a = std::copysign(*j, c);
    const double d = c - a;
    return raw_plus(a) + raw_dplus(a) * d + 0.5 * raw_d2plus(a) * d * d;
  }
  return raw_plus(c);
}

double Potential::dphi_plus(double c) const {
  if (const auto j = joint(); j && std::abs(c) > *j) {
    const double a = std::copysign(*j, c);
    return raw_dplus(a) + raw_d2plus(a) * (c - a);
  }
  return raw_dplus(c);
}

double Potential::d2phi_plus(double c) const {
  if (const auto j = joint(); j && std::abs(c) > *j) return raw_d2plus(std::copysign(*j, c));
  return raw_d2plus(c);
}

double Potential::phi_minus(double c) const {
  if (kind_ == Kind::GinzburgLandau) return -0.5 * c * c;
  return 0.5 * theta_c_ * (1.0 - c * c);
}

double Potential::dphi_minus(double c) const {
  if (kind_ == Kind::GinzburgLandau) return -c;
  return -theta_c_ * c;
}

double Potential::d2phi_minus(double) const {
  if (kind_ == Kind::GinzburgLandau) return -1.0;
  return -theta_c_;
}

}  // namespace chns
