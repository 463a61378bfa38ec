#pragma once

// Recursive Parzen-Rosenblatt estimation on a fixed evaluation grid:
//
//   f_n(x) = (1/n) sum_{i<=n} (1/h_i) K((x - obs_i)/h_i),   h_i = i^{-alpha}
//
// The oracle variant is fed the latent eps_i; the plug-in variant is fed the
// registered values Z_i(theta_{i-1}). Each update costs O(grid size).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "deformest/errors.hpp"
#include "deformest/quadrature.hpp"

namespace deformest {

enum class KernelKind { gaussian, epanechnikov, custom };

struct KernelDiagnostics {
  double mass;            // int K
  double asymmetry;       // max |K(u) - K(-u)| on the check grid
  double second_moment;   // int u^2 K
  double tail_product;    // |u| K(u) at the edge of the checked range
  double min_value;
};

class Kernel {
 public:
  static Kernel gaussian() {
    return Kernel(KernelKind::gaussian, "gaussian",
                  [](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); }, 12.0);
  }

  static Kernel epanechnikov() {
    return Kernel(KernelKind::epanechnikov, "epanechnikov",
                  [](double u) { return std::fabs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0; }, 1.0);
  }

  // support_radius: K vanishes (or is negligible) outside [-r, r].
  static Kernel custom(std::string name, std::function<double(double)> k, double support_radius) {
    return Kernel(KernelKind::custom, std::move(name), std::move(k), support_radius);
  }

  static Kernel by_name(const std::string& name) {
    if (name == "gaussian") return gaussian();
    if (name == "epanechnikov") return epanechnikov();
    throw ConfigError("unknown kernel '" + name + "' (expected gaussian or epanechnikov)");
  }

  double operator()(double u) const { return k_(u); }
  KernelKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double support_radius() const { return radius_; }
  const KernelDiagnostics& diagnostics() const { return diag_; }

 private:
  Kernel(KernelKind kind, std::string name, std::function<double(double)> k, double radius)
      : kind_(kind), name_(std::move(name)), k_(std::move(k)), radius_(radius) {
    diag_ = diagnose();
    constexpr double tol = 1e-8;
    if (std::fabs(diag_.mass - 1.0) > tol || diag_.asymmetry > tol || !std::isfinite(diag_.second_moment) ||
        diag_.tail_product > tol || diag_.min_value < 0.0) {
      throw ConfigError("kernel '" + name_ + "' is not a symmetric probability density with finite variance");
    }
  }

  // Composite Gauss-Legendre over [-r, r] in 64 panels; panel edges sit at 0
  // and +-r, where compact kernels have kinks.
  KernelDiagnostics diagnose() const {
    const auto& rule = gauss_legendre_256();
    constexpr int kPanels = 32;
    KernelDiagnostics d{0.0, 0.0, 0.0, 0.0, 0.0};
    const double w = radius_ / kPanels;
    for (int p = -kPanels; p < kPanels; ++p) {
      const double lo = p * w;
      const auto m = rule.integrate([&](double u) { return std::array<double, 2>{k_(u), u * u * k_(u)}; }, lo,
                                    lo + w);
      d.mass += m[0];
      d.second_moment += m[1];
    }
    for (int i = 0; i <= 400; ++i) {
      const double u = radius_ * i / 400.0;
      d.asymmetry = std::max(d.asymmetry, std::fabs(k_(u) - k_(-u)));
      d.min_value = std::min(d.min_value, std::min(k_(u), k_(-u)));
    }
    d.tail_product = std::max(radius_ * k_(radius_), radius_ * k_(-radius_));
    return d;
  }

  KernelKind kind_;
  std::string name_;
  std::function<double(double)> k_;
  double radius_;
  KernelDiagnostics diag_{};
};

enum class DensityVariant { oracle, plugin, averaged };

inline std::string to_string(DensityVariant v) {
  switch (v) {
    case DensityVariant::oracle: return "oracle";
    case DensityVariant::plugin: return "plugin";
    case DensityVariant::averaged: return "averaged";
  }
  return "?";
}

inline DensityVariant density_variant_by_name(const std::string& s) {
  if (s == "oracle") return DensityVariant::oracle;
  if (s == "plugin") return DensityVariant::plugin;
  if (s == "averaged") return DensityVariant::averaged;
  throw ConfigError("unknown density variant '" + s + "' (expected oracle, plugin or averaged)");
}

class DensityState {
 public:
  DensityState(std::vector<double> grid, double alpha, Kernel kernel, DensityVariant variant)
      : grid_(std::move(grid)), sums_(grid_.size(), 0.0), alpha_(alpha), kernel_(std::move(kernel)),
        variant_(variant) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ConfigError("bandwidth exponent alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
    if (grid_.empty()) throw ConfigError("density grid is empty");
  }

  double bandwidth(std::uint64_t i) const { return std::pow(static_cast<double>(i), -alpha_); }

  void update(double observation) {
    ++n_;
    const double h = bandwidth(n_);
    const double inv_h = 1.0 / h;
    for (std::size_t g = 0; g < grid_.size(); ++g) {
      sums_[g] += inv_h * kernel_((grid_[g] - observation) * inv_h);
    }
  }

  std::vector<double> estimate() const {
    std::vector<double> f(sums_.size(), 0.0);
    if (n_ == 0) return f;
    for (std::size_t g = 0; g < f.size(); ++g) f[g] = sums_[g] / static_cast<double>(n_);
    return f;
  }

  const std::vector<double>& grid() const { return grid_; }
  std::uint64_t count() const { return n_; }
  double alpha() const { return alpha_; }
  const Kernel& kernel() const { return kernel_; }
  DensityVariant variant() const { return variant_; }

 private:
  std::vector<double> grid_;
  std::vector<double> sums_;
  double alpha_;
  Kernel kernel_;
  DensityVariant variant_;
  std::uint64_t n_ = 0;
};

inline DensityState density_update(DensityState state, double observation) {
  state.update(observation);
  return state;
}

// (oracle + plugin) / 2 pointwise.
inline std::vector<double> averaged_estimate(const DensityState& oracle, const DensityState& plugin) {
  if (oracle.grid() != plugin.grid() || oracle.count() != plugin.count() || oracle.alpha() != plugin.alpha() ||
      oracle.kernel().name() != plugin.kernel().name()) {
    throw ConfigError("averaged estimate needs states sharing grid, count, alpha and kernel");
  }
  auto a = oracle.estimate();
  const auto b = plugin.estimate();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.5 * (a[i] + b[i]);
  return a;
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("trapezoid needs equal-length abscissae and values");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace deformest
