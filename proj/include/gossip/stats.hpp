#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gossip {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n-1 denominator).
inline double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_std: need >= 2 samples");
  const double m = mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Standard error of the mean across replications.
inline double standard_error(std::span<const double> xs) {
  return sample_std(xs) / std::sqrt(static_cast<double>(xs.size()));
}

/// Harmonic number H_n, accumulated in extended precision.
inline double harmonic(std::int64_t n) {
  long double h = 0.0L;
  for (std::int64_t k = n; k >= 1; --k) h += 1.0L / static_cast<long double>(k);
  return static_cast<double>(h);
}

struct PowerLawFit {
  double slope = 0;
  double intercept = 0;  // in log-log coordinates
  double r2 = 0;
};

/// Least-squares line through (log x, log y); slope is the scaling exponent.
inline PowerLawFit fit_exponent(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_exponent: need >= 3 points");
  std::vector<double> lx, ly;
  lx.reserve(points.size());
  ly.reserve(points.size());
  for (auto [x, y] : points) {
    if (x <= 0 || y <= 0) throw std::invalid_argument("fit_exponent: values must be positive");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double mx = mean(lx), my = mean(ly);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_exponent: degenerate x values");
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // Constant y: a horizontal line is a perfect fit.
  fit.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace gossip
