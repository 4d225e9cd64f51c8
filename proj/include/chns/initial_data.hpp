#pragma once

#include <cstdint>
#include <vector>

#include "chns/dgspace.hpp"

namespace chns {

/// Smooth random field c0 = mean + amplitude * sum_{k,l} a_kl cos(k pi x) cos(l pi y)
/// over 0 <= k, l <= modes, (k, l) != (0, 0), with a_kl uniform in [-1, 1]
/// drawn from a seeded mt19937_64 and normalized so that sum |a_kl| = 1.
/// Every term has zero normal derivative on the unit square.
class SpinodalSeed {
 public:
  SpinodalSeed(std::uint64_t seed, double amplitude, double mean = 0.0, int modes = 4);

  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
  ScalarFunction function() const;
  GradientFunction gradient_function() const;

 private:
  double mean_;
  int modes_;
  std::vector<double> coeffs_;  // (modes+1)^2, row k, column l
};

}  // namespace chns
