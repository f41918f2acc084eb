#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "gossip/rng.hpp"

namespace gossip::bayesopt {

/// Stationary squared-exponential kernel with a diagonal jitter.
struct Kernel {
  double signal_var = 1.0;
  double length_scale = 0.25;
  double jitter = 1e-8;

  double operator()(std::span<const double> a, std::span<const double> b) const {
    double d2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return signal_var * std::exp(-d2 / (2.0 * length_scale * length_scale));
  }
};

/// Zero-mean Gaussian-process posterior over reward observations, with the
/// kernel-matrix Cholesky factor cached for repeated queries.
class GpPosterior {
 public:
  GpPosterior() = default;

  static GpPosterior fit(std::vector<std::vector<double>> points, std::vector<double> rewards,
                         Kernel kernel) {
    if (points.empty() || points.size() != rewards.size())
      throw std::invalid_argument("gp_fit: need matching, non-empty points and rewards");
    GpPosterior gp;
    gp.x_ = std::move(points);
    gp.f_ = std::move(rewards);
    gp.kernel_ = kernel;
    const std::size_t m = gp.x_.size();
    gp.chol_.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double v = kernel(gp.x_[i], gp.x_[j]);
        if (i == j) v += kernel.jitter;
        gp.chol_[i * m + j] = v;
      }
    // In-place lower Cholesky.
    for (std::size_t j = 0; j < m; ++j) {
      double d = gp.chol_[j * m + j];
      for (std::size_t k = 0; k < j; ++k) d -= gp.chol_[j * m + k] * gp.chol_[j * m + k];
      if (d <= 0) throw std::runtime_error("gp_fit: kernel matrix singular despite jitter");
      const double root = std::sqrt(d);
      gp.chol_[j * m + j] = root;
      for (std::size_t i = j + 1; i < m; ++i) {
        double v = gp.chol_[i * m + j];
        for (std::size_t k = 0; k < j; ++k) v -= gp.chol_[i * m + k] * gp.chol_[j * m + k];
        gp.chol_[i * m + j] = v / root;
      }
    }
    // alpha = K^-1 f via two triangular solves.
    gp.alpha_ = gp.f_;
    gp.forward(gp.alpha_);
    gp.backward(gp.alpha_);
    return gp;
  }

  std::size_t size() const { return x_.size(); }
  const Kernel& kernel() const { return kernel_; }

  double mean(std::span<const double> q) const {
    double mu = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) mu += kernel_(q, x_[i]) * alpha_[i];
    return mu;
  }

  double variance(std::span<const double> q) const {
    std::vector<double> k(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) k[i] = kernel_(q, x_[i]);
    forward(k);
    double reduction = 0;
    for (double v : k) reduction += v * v;
    return std::max(0.0, kernel_(q, q) - reduction);
  }

 private:
  void forward(std::vector<double>& v) const {  // solve L y = v
    const std::size_t m = x_.size();
    for (std::size_t i = 0; i < m; ++i) {
      double s = v[i];
      for (std::size_t k = 0; k < i; ++k) s -= chol_[i * m + k] * v[k];
      v[i] = s / chol_[i * m + i];
    }
  }
  void backward(std::vector<double>& v) const {  // solve L^T x = v
    const std::size_t m = x_.size();
    for (std::size_t i = m; i-- > 0;) {
      double s = v[i];
      for (std::size_t k = i + 1; k < m; ++k) s -= chol_[k * m + i] * v[k];
      v[i] = s / chol_[i * m + i];
    }
  }

  std::vector<std::vector<double>> x_;
  std::vector<double> f_;
  std::vector<double> alpha_;
  std::vector<double> chol_;
  Kernel kernel_;
};

inline GpPosterior gp_fit(std::vector<std::vector<double>> points, std::vector<double> rewards,
                          Kernel kernel) {
  return GpPosterior::fit(std::move(points), std::move(rewards), kernel);
}

/// Source-rate search space: the box [0, budget]^dim cut by sum(x) <= budget.
struct Domain {
  int dim = 1;
  double budget = 1.0;

  bool contains(std::span<const double> x, double slack = 1e-9) const {
    double sum = 0;
    for (double v : x) {
      if (v < -slack || v > budget + slack) return false;
      sum += v;
    }
    return sum <= budget + slack;
  }

  /// Centroid of the feasible simplex-corner polytope.
  std::vector<double> centroid() const {
    return std::vector<double>(dim, budget / (dim + 1));
  }

  /// Euclidean projection: clamp into the box, then shift onto the budget face
  /// if the sum still exceeds it.
  std::vector<double> project(std::vector<double> x) const {
    for (double& v : x) v = std::clamp(v, 0.0, budget);
    double sum = 0;
    for (double v : x) sum += v;
    if (sum <= budget) return x;
    double lo = 0, hi = *std::max_element(x.begin(), x.end());
    for (int iter = 0; iter < 100; ++iter) {
      const double theta = 0.5 * (lo + hi);
      double s = 0;
      for (double v : x) s += std::clamp(v - theta, 0.0, budget);
      (s > budget ? lo : hi) = theta;
    }
    for (double& v : x) v = std::clamp(v - hi, 0.0, budget);
    return x;
  }

  std::vector<double> sample(std::mt19937_64& rng) const {
    std::vector<double> x(dim);
    for (double& v : x) v = budget * uniform01(rng);
    return project(std::move(x));
  }
};

/// Confidence schedule beta_m ~ O(log m^2) pinned to the delta = 0.1 instance.
inline double default_beta(int m) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return 2.0 * std::log(static_cast<double>(m) * m * pi2 / 0.6);
}

/// Approximate maximizer of mean + sqrt(beta) * sd over the domain, by seeded
/// multi-start projected coordinate search. An empty posterior has a constant
/// acquisition; the centroid is returned by convention.
inline std::vector<double> ucb_select(const GpPosterior* post, double beta, const Domain& domain,
                                      std::uint64_t seed, int starts = 32, int sweeps = 6) {
  if (post == nullptr || post->size() == 0) return domain.centroid();
  const double root_beta = std::sqrt(std::max(0.0, beta));
  auto acquisition = [&](std::span<const double> x) {
    return post->mean(x) + root_beta * std::sqrt(post->variance(x));
  };

  std::mt19937_64 rng(seed);
  std::vector<double> best;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    std::vector<double> x = s == 0 ? domain.centroid() : domain.sample(rng);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      for (int c = 0; c < domain.dim; ++c) {
        double others = 0;
        for (int i = 0; i < domain.dim; ++i)
          if (i != c) others += x[i];
        const double hi = std::min(domain.budget, domain.budget - others);
        // Coarse grid, then one refinement around the best cell.
        double arg = x[c], val = acquisition(x);
        auto scan = [&](double lo_s, double hi_s, int pts) {
          for (int k = 0; k < pts; ++k) {
            x[c] = lo_s + (hi_s - lo_s) * k / (pts - 1);
            const double v = acquisition(x);
            if (v > val) {
              val = v;
              arg = x[c];
            }
          }
        };
        scan(0.0, hi, 25);
        const double cell = hi / 24.0;
        scan(std::max(0.0, arg - cell), std::min(hi, arg + cell), 11);
        x[c] = arg;
      }
    }
    const double v = acquisition(x);
    if (v > best_val) {
      best_val = v;
      best = x;
    }
  }
  return best;
}

struct OptimizeStep {
  int m = 0;
  std::vector<double> point;
  double value = 0;      // observed worst-node age a_hat
  double incumbent = 0;  // best a_hat so far
};

struct OptimizeResult {
  std::vector<double> best_point;
  double best_value = 0;
  std::vector<OptimizeStep> trace;
};

struct OptimizeConfig {
  double length_scale = 0.0;  // <= 0: budget / 4
  double jitter = 1e-8;
  int starts = 32;
};

/// Sequential GP-UCB minimization of the evaluator (which reports the
/// worst-node empirical age for a rate allocation). Deterministic given the
/// seed and a deterministic evaluator.
template <typename Evaluator>
OptimizeResult optimize(Evaluator&& evaluate, int steps, const Domain& domain, std::uint64_t seed,
                        const OptimizeConfig& cfg = {}) {
  if (steps < 1) throw std::invalid_argument("optimize: need at least one step");
  OptimizeResult result;
  std::vector<std::vector<double>> points;
  std::vector<double> rewards;  // f = -a_hat

  for (int m = 1; m <= steps; ++m) {
    std::vector<double> next;
    if (points.empty()) {
      next = domain.centroid();
    } else {
      const double lo = *std::min_element(rewards.begin(), rewards.end());
      const double hi = *std::max_element(rewards.begin(), rewards.end());
      Kernel kernel;
      kernel.length_scale = cfg.length_scale > 0 ? cfg.length_scale : domain.budget / 4.0;
      kernel.signal_var = std::pow(std::max({hi - lo, 0.25 * std::abs(lo), 1e-6}), 2);
      kernel.jitter = cfg.jitter;
      const GpPosterior post = gp_fit(points, rewards, kernel);
      next = ucb_select(&post, default_beta(m), domain, derive_seed(seed, m), cfg.starts);
    }
    const double value = evaluate(std::span<const double>(next));
    points.push_back(next);
    rewards.push_back(-value);
    if (result.trace.empty() || value < result.best_value) {
      result.best_value = value;
      result.best_point = next;
    }
    result.trace.push_back({m, next, value, result.best_value});
  }
  return result;
}

}  // namespace gossip::bayesopt
