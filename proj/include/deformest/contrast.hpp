#pragma once

// Oracle values of the Wasserstein contrast
//
//   M(t) = E |phi_t^{-1}(X) - eps|^2 = int_0^1 (phi_t^{-1} o phi_theta o F^{-1}(p) - F^{-1}(p))^2 dp
//
// and its first two derivatives, by quantile quadrature (closed-form F^{-1})
// or plain Monte Carlo. These are ground truth for the estimator tests and
// the source of the identifiability (A5) and curvature (A7) certificates.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deformest/deformations.hpp"
#include "deformest/errors.hpp"
#include "deformest/parallel.hpp"
#include "deformest/quadrature.hpp"
#include "deformest/rng.hpp"
#include "deformest/simulation.hpp"
#include "deformest/stats.hpp"

namespace deformest {

struct ContrastValue {
  double value;
  double error;  // |Q512 - Q256| for quadrature, standard error for Monte Carlo
};

struct ContrastPoint {
  double t;
  ContrastValue M;
  ContrastValue Mprime;
  ContrastValue Msecond;
};

enum class ContrastMethod { quadrature, monte_carlo };

inline std::string to_string(ContrastMethod m) {
  return m == ContrastMethod::quadrature ? "quadrature" : "monte-carlo";
}

namespace detail {

// (Z - eps)^2, -2 dZ (eps - Z), 2 dZ^2 - 2 d2Z (eps - Z) at one epsilon.
inline std::array<double, 3> contrast_integrands(const DeformationFamily& family, double theta, double t,
                                                 double eps) {
  const double x = family.forward(theta, eps);
  const double z = family.inverse(t, x);
  const double dz = family.d_inverse_dt(t, x);
  const double d2z = family.d2_inverse_dt2(t, x);
  const double r = eps - z;
  return {r * r, -2.0 * dz * r, 2.0 * dz * dz - 2.0 * d2z * r};
}

}  // namespace detail

inline ContrastPoint contrast_point(const DeformationFamily& family, double theta,
                                    const SourceDistribution& source, double t) {
  auto f = [&](double p) { return detail::contrast_integrands(family, theta, t, source.quantile(p)); };
  const auto fine = gauss_legendre_512().integrate(f, 0.0, 1.0);
  const auto coarse = gauss_legendre_256().integrate(f, 0.0, 1.0);
  return {t,
          {fine[0], std::fabs(fine[0] - coarse[0])},
          {fine[1], std::fabs(fine[1] - coarse[1])},
          {fine[2], std::fabs(fine[2] - coarse[2])}};
}

inline ContrastValue contrast_M(const DeformationFamily& family, double theta, const SourceDistribution& source,
                                double t) {
  return contrast_point(family, theta, source, t).M;
}

inline ContrastValue contrast_Mprime(const DeformationFamily& family, double theta,
                                     const SourceDistribution& source, double t) {
  return contrast_point(family, theta, source, t).Mprime;
}

inline ContrastValue contrast_Msecond(const DeformationFamily& family, double theta,
                                      const SourceDistribution& source, double t) {
  return contrast_point(family, theta, source, t).Msecond;
}

// Same three quantities from `samples` i.i.d. draws of epsilon. This is the
// only route for sources without a closed-form quantile.
inline ContrastPoint contrast_point_mc(const DeformationFamily& family, double theta,
                                       const SourceDistribution& source, double t, std::size_t samples,
                                       std::uint64_t seed) {
  Rng rng(seed);
  RunningStats m, mp, ms;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto v = detail::contrast_integrands(family, theta, t, source.sample(rng));
    m.add(v[0]);
    mp.add(v[1]);
    ms.add(v[2]);
  }
  return {t, {m.mean(), m.standard_error()}, {mp.mean(), mp.standard_error()}, {ms.mean(), ms.standard_error()}};
}

// (t - theta) M'(t) > 0 on the grid, outside |t - theta| < exclusion.
struct A5Certificate {
  bool holds = true;
  double exclusion = 0.01;
  double min_signed_slope = INFINITY;  // min of (t - theta) M'(t) over checked points
  std::optional<double> first_violation;
};

// Curvature condition M'' >= 1/2 on [a, b], and the contrast gain lambda
// (M -> lambda M) that would restore it.
struct A7Certificate {
  double min_Msecond = INFINITY;
  double argmin = NAN;
  bool holds_at_unit_gain = false;
  std::optional<double> suggested_gain;  // empty when min M'' <= 0: no rescaling helps
  double rescaled_min = NAN;

  bool certifiable() const { return suggested_gain.has_value(); }
};

inline constexpr double kA7Target = 0.5;
inline constexpr double kA7Margin = 1e-9;

inline A7Certificate certify_a7(const std::vector<double>& t, const std::vector<double>& msecond) {
  A7Certificate c;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (msecond[i] < c.min_Msecond) {
      c.min_Msecond = msecond[i];
      c.argmin = t[i];
    }
  }
  c.holds_at_unit_gain = c.min_Msecond >= kA7Target;
  if (c.min_Msecond > 0.0) {
    const double gain = c.holds_at_unit_gain ? 1.0 : kA7Target / c.min_Msecond * (1.0 + kA7Margin);
    c.suggested_gain = gain;
    c.rescaled_min = gain * c.min_Msecond;
  }
  return c;
}

inline A5Certificate certify_a5(const std::vector<double>& t, const std::vector<double>& mprime, double theta,
                                double exclusion = 0.01) {
  A5Certificate c;
  c.exclusion = exclusion;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::fabs(t[i] - theta) < exclusion) continue;
    const double s = (t[i] - theta) * mprime[i];
    c.min_signed_slope = std::min(c.min_signed_slope, s);
    if (!(s > 0.0)) {
      c.holds = false;
      if (!c.first_violation) c.first_violation = t[i];
    }
  }
  return c;
}

struct ContrastReport {
  std::string family;
  double theta = 1.0;
  double a = 0.1;
  double b = 2.0;
  ContrastMethod method = ContrastMethod::quadrature;
  std::vector<double> t;
  std::vector<double> M, Mprime, Msecond;
  std::vector<double> err_M, err_Mprime, err_Msecond;
  A5Certificate a5;
  A7Certificate a7;

  bool a5_holds() const { return a5.holds; }
  double a7_min() const { return a7.min_Msecond; }
};

inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
  if (points == 0) return {};
  if (points == 1) return {lo};
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  g.back() = hi;
  return g;
}

struct ContrastReportOptions {
  std::size_t grid_points = 201;
  ContrastMethod method = ContrastMethod::quadrature;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t mc_seed = 0;
  double a5_exclusion = 0.01;
};

inline ContrastReport contrast_report(const DeformationFamily& family, double theta,
                                      const SourceDistribution& source, double a, double b,
                                      const ContrastReportOptions& opt = {}) {
  if (!(a < b)) throw ConfigError("contrast grid needs a < b");
  ContrastReport r;
  r.family = family.name;
  r.theta = theta;
  r.a = a;
  r.b = b;
  r.method = opt.method;
  r.t = linspace(a, b, opt.grid_points);
  const std::size_t g = r.t.size();
  std::vector<ContrastPoint> pts(g);
  parallel_for(g, [&](std::size_t i) {
    pts[i] = opt.method == ContrastMethod::quadrature
                 ? contrast_point(family, theta, source, r.t[i])
                 : contrast_point_mc(family, theta, source, r.t[i], opt.mc_samples, split_seed(opt.mc_seed, i));
  });
  for (const auto& p : pts) {
    r.M.push_back(p.M.value);
    r.Mprime.push_back(p.Mprime.value);
    r.Msecond.push_back(p.Msecond.value);
    r.err_M.push_back(p.M.error);
    r.err_Mprime.push_back(p.Mprime.error);
    r.err_Msecond.push_back(p.Msecond.error);
  }
  r.a5 = certify_a5(r.t, r.Mprime, theta, opt.a5_exclusion);
  r.a7 = certify_a7(r.t, r.Msecond);
  return r;
}

// Asymptotic variance of sqrt(n)(theta~_n - theta) for the excited recursion
// at contrast gain lambda: sigma^2 / (2 lambda M''(theta) - 1).
inline double clt_variance(const DeformationFamily& family, double theta, const SourceDistribution& source,
                           double sigma2, double gain_lambda = 1.0) {
  if (!(sigma2 >= 0.0)) throw ConfigError("sigma^2 must be >= 0");
  const double curvature = gain_lambda * contrast_Msecond(family, theta, source, theta).value;
  if (!(curvature > 0.5)) {
    throw AssumptionError("excited CLT needs lambda * M''(theta) > 1/2, got " + std::to_string(curvature));
  }
  return sigma2 / (2.0 * curvature - 1.0);
}

// Gain that puts lambda * M''(theta) at `target` (> 1/2 for the CLT).
inline double local_gain(const DeformationFamily& family, double theta, const SourceDistribution& source,
                         double target = 1.0) {
  const double m2 = contrast_Msecond(family, theta, source, theta).value;
  if (!(m2 > 0.0)) throw AssumptionError("M''(theta) is not positive; no local gain exists");
  return target / m2;
}

struct C1Estimate {
  double value;
  double standard_error;
  std::size_t samples;
  std::size_t grid_points;
};

// C1 = 4 E[ sup_{t in [a,b]} |d/dt phi_t^{-1}(phi_theta(eps))|^4 ], sup taken
// over a uniform t-grid.
inline C1Estimate estimate_c1(const DeformationFamily& family, double theta, const SourceDistribution& source,
                              double a, double b, std::size_t grid_points, std::size_t samples,
                              std::uint64_t seed) {
  if (samples < 2) throw ConfigError("C1 estimate needs at least two samples");
  const auto grid = linspace(a, b, grid_points);
  constexpr std::size_t kChunks = 64;
  std::vector<RunningStats> partial(kChunks);
  parallel_for(kChunks, [&](std::size_t c) {
    Rng rng(split_seed(seed, c));
    const std::size_t begin = samples * c / kChunks;
    const std::size_t end = samples * (c + 1) / kChunks;
    for (std::size_t i = begin; i < end; ++i) {
      const double x = family.forward(theta, source.sample(rng));
      double sup = 0.0;
      for (double t : grid) sup = std::max(sup, std::fabs(family.d_inverse_dt(t, x)));
      const double s2 = sup * sup;
      partial[c].add(4.0 * s2 * s2);
    }
  });
  // Ordered merge of chunk means.
  double sumsq_dev = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  for (const auto& p : partial) {
    if (p.count() == 0) continue;
    const double pn = static_cast<double>(p.count());
    const double delta = p.mean() - mean;
    const double total = static_cast<double>(n) + pn;
    mean += delta * pn / total;
    sumsq_dev += (p.count() > 1 ? p.variance() * (pn - 1.0) : 0.0) + delta * delta * static_cast<double>(n) * pn / total;
    n += p.count();
  }
  const double var = sumsq_dev / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n)), samples, grid_points};
}

}  // namespace deformest
