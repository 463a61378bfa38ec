#pragma once

#include <array>
#include <cstddef>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace deformest {

// Fixed Gauss-Legendre rule on [-1, 1], materialized with both signs.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  // Maps to [lo, hi] and accumulates f, which may return double or
  // std::array<double, K>.
  template <class F>
  auto integrate(F&& f, double lo, double hi) const {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    using R = decltype(f(mid));
    R acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const R v = f(mid + half * nodes[i]);
      if constexpr (std::is_same_v<R, double>) {
        acc += weights[i] * v;
      } else {
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += weights[i] * v[k];
      }
    }
    if constexpr (std::is_same_v<R, double>) {
      acc *= half;
    } else {
      for (auto& a : acc) a *= half;
    }
    return acc;
  }
};

namespace detail {

template <unsigned Points>
GaussLegendreRule make_rule() {
  using G = boost::math::quadrature::gauss<double, Points>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  GaussLegendreRule r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      r.nodes.push_back(0.0);
      r.weights.push_back(w[i]);
      continue;
    }
    r.nodes.push_back(x[i]);
    r.weights.push_back(w[i]);
    r.nodes.push_back(-x[i]);
    r.weights.push_back(w[i]);
  }
  return r;
}

}  // namespace detail

// 512-point rule used for contrast integrals, and the 256-point companion
// whose difference serves as an error estimate.
inline const GaussLegendreRule& gauss_legendre_512() {
  static const GaussLegendreRule rule = detail::make_rule<512>();
  return rule;
}

inline const GaussLegendreRule& gauss_legendre_256() {
  static const GaussLegendreRule rule = detail::make_rule<256>();
  return rule;
}

}  // namespace deformest
