#pragma once

#include <random>
#include <stdexcept>

#include "gossip/rng.hpp"

namespace gossip {

/// Inter-arrival distribution of a renewal update process. All supported
/// families have finite first and second moments, available in closed form.
struct RenewalDist {
  enum class Kind { exponential, deterministic, gamma, uniform };

  Kind kind = Kind::exponential;
  double a = 1.0;  // rate | value | shape | lower
  double b = 0.0;  // unused | unused | scale | upper

  static RenewalDist exponential(double rate) {
    if (rate <= 0) throw std::invalid_argument("exponential: rate must be > 0");
    return {Kind::exponential, rate, 0};
  }
  static RenewalDist deterministic(double d) {
    if (d <= 0) throw std::invalid_argument("deterministic: value must be > 0");
    return {Kind::deterministic, d, 0};
  }
  static RenewalDist gamma(double shape, double scale) {
    if (shape <= 0 || scale <= 0) throw std::invalid_argument("gamma: shape/scale must be > 0");
    return {Kind::gamma, shape, scale};
  }
  static RenewalDist uniform(double lo, double hi) {
    if (!(0 <= lo && lo < hi)) throw std::invalid_argument("uniform: need 0 <= lo < hi");
    return {Kind::uniform, lo, hi};
  }

  double mean() const {
    switch (kind) {
      case Kind::exponential: return 1.0 / a;
      case Kind::deterministic: return a;
      case Kind::gamma: return a * b;
      case Kind::uniform: return 0.5 * (a + b);
    }
    return 0;
  }

  double second_moment() const {
    switch (kind) {
      case Kind::exponential: return 2.0 / (a * a);
      case Kind::deterministic: return a * a;
      case Kind::gamma: return a * (a + 1.0) * b * b;
      case Kind::uniform: return (a * a + a * b + b * b) / 3.0;
    }
    return 0;
  }

  double sample(std::mt19937_64& rng) const {
    switch (kind) {
      case Kind::exponential: return sample_exponential(rng, a);
      case Kind::deterministic: return a;
      case Kind::gamma: {
        std::gamma_distribution<double> d(a, b);
        return d(rng);
      }
      case Kind::uniform: return a + (b - a) * uniform01(rng);
    }
    return 0;
  }
};

}  // namespace gossip
