#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace deformest {

// One-pass mean/variance (Welford).
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  std::uint64_t count() const { return n_; }

  double mean() const {
    if (n_ < 1) throw std::runtime_error("mean is undefined for an empty sample");
    return mean_;
  }

  double variance() const {
    if (n_ < 2) throw std::runtime_error("variance needs at least two observations");
    return m2_ / static_cast<double>(n_ - 1);
  }

  double stddev() const { return std::sqrt(variance()); }

  double standard_error() const { return std::sqrt(variance() / static_cast<double>(n_)); }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline RunningStats summarize(std::span<const double> xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return s;
}

// Linear-interpolation quantile (Hyndman-Fan type 7), p in [0, 1].
inline double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw std::runtime_error("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = p * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

}  // namespace deformest
