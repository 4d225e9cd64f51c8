#include "chns/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace chns {

SpinodalSeed::SpinodalSeed(std::uint64_t seed, double amplitude, double mean, int modes)
    : mean_(mean), modes_(modes) {
  if (modes < 1) throw std::invalid_argument("spinodal seed needs at least one mode");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int m = modes + 1;
  coeffs_.assign(static_cast<std::size_t>(m * m), 0.0);
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      if (k == 0 && l == 0) continue;
      const double a = dist(rng);
      coeffs_[static_cast<std::size_t>(k * m + l)] = a;
      sum += std::abs(a);
    }
  }
  for (double& a : coeffs_) a *= amplitude / sum;
}

double SpinodalSeed::value(Vec2 x) const {
  const double pi = std::numbers::pi;
  const int m = modes_ + 1;
  double s = mean_;
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      s += coeffs_[static_cast<std::size_t>(k * m + l)] * std::cos(k * pi * x.x) * std::cos(l * pi * x.y);
    }
  }
  return s;
}

Vec2 SpinodalSeed::gradient(Vec2 x) const {
  const double pi = std::numbers::pi;
  const int m = modes_ + 1;
  Vec2 g{0.0, 0.0};
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      const double a = coeffs_[static_cast<std::size_t>(k * m + l)];
      g.x -= a * k * pi * std::sin(k * pi * x.x) * std::cos(l * pi * x.y);
      g.y -= a * l * pi * std::cos(k * pi * x.x) * std::sin(l * pi * x.y);
    }
  }
  return g;
}

ScalarFunction SpinodalSeed::function() const {
  return [self = *this](Vec2 x) { return self.value(x); };
}

GradientFunction SpinodalSeed::gradient_function() const {
  return [self = *this](Vec2 x) { return self.gradient(x); };
}

}  // namespace chns
