#pragma once

// Parametric deformation families phi_t and the closed-form maps the
// estimator needs: forward map, inverse, and the first two derivatives of the
// inverse with respect to the parameter t.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "deformest/errors.hpp"

namespace deformest {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = true;
  bool hi_open = true;

  bool contains(double x) const {
    const bool above = lo_open ? x > lo : x >= lo;
    const bool below = hi_open ? x < hi : x <= hi;
    return above && below;
  }

  bool interior(double x) const { return x > lo && x < hi; }

  static Interval real_line() { return {}; }
  static Interval positive() { return {0.0, std::numeric_limits<double>::infinity(), true, true}; }
  static Interval closed(double lo, double hi) { return {lo, hi, false, false}; }
};

using ParamMap = std::function<double(double t, double v)>;

// phi_t : I1 -> I2, strictly increasing for each t in param_domain.
// Immutable after construction; safe to share between threads.
struct DeformationFamily {
  std::string name;
  ParamMap forward;         // (t, x) -> phi_t(x)
  ParamMap inverse;         // (t, y) -> phi_t^{-1}(y)
  ParamMap d_inverse_dt;    // (t, y) -> d/dt phi_t^{-1}(y)
  ParamMap d2_inverse_dt2;  // (t, y) -> d2/dt2 phi_t^{-1}(y)
  Interval param_domain;
  Interval x_domain;
  Interval y_domain;
};

// Below this |t| the forward maps use their t -> 0 limits.
inline constexpr double kSmallParameter = 1e-6;

namespace detail {

inline std::string fmt_point(double t, double y) {
  return "(t=" + std::to_string(t) + ", y=" + std::to_string(y) + ")";
}

// Box-Cox inverse in log form: phi_t^{-1}(y) = exp(s(t)), s = log1p(u)/t,
// u = t*y. With c_k = (-1)^{k+1} (k-1)/k,
//   s   = y * sum_{k>=0} (-u)^k / (k+1)
//   s'  = y^2 * sum_{k>=2} c_k u^{k-2}
//   s'' = y^3 * sum_{k>=3} (k-2) c_k u^{k-3}
// The series are used for |u| below kBoxCoxSeries; they also cover t == 0.
inline constexpr double kBoxCoxSeries = 1e-2;
inline constexpr int kBoxCoxTerms = 14;

struct LogInverse {
  double s;
  double ds;
  double d2s;
};

inline LogInverse boxcox_log_inverse(double t, double y, int order) {
  const double u = t * y;
  if (!(u > -1.0)) {
    throw DomainError("Box-Cox inverse undefined: 1 + t*y <= 0 at " + fmt_point(t, y));
  }
  LogInverse out{0.0, 0.0, 0.0};
  if (std::fabs(u) < kBoxCoxSeries) {
    double s = 0.0;
    double p = 1.0;
    for (int k = 0; k < kBoxCoxTerms; ++k) {
      s += p / (k + 1);
      p *= -u;
    }
    out.s = y * s;
    if (order >= 1) {
      double acc = 0.0;
      double pw = 1.0;
      for (int k = 2; k < kBoxCoxTerms + 2; ++k) {
        const double ck = ((k % 2 == 0) ? -1.0 : 1.0) * (k - 1.0) / k;
        acc += ck * pw;
        pw *= u;
      }
      out.ds = y * y * acc;
    }
    if (order >= 2) {
      double acc = 0.0;
      double pw = 1.0;
      for (int k = 3; k < kBoxCoxTerms + 3; ++k) {
        const double ck = ((k % 2 == 0) ? -1.0 : 1.0) * (k - 1.0) / k;
        acc += (k - 2.0) * ck * pw;
        pw *= u;
      }
      out.d2s = y * y * y * acc;
    }
    return out;
  }
  const double l = std::log1p(u);
  out.s = l / t;
  if (order >= 1) {
    const double h1 = u / (1.0 + u) - l;
    out.ds = h1 / (t * t);
  }
  if (order >= 2) {
    const double r = u / (1.0 + u);
    const double h2 = -r * r - 2.0 * r + 2.0 * l;
    out.d2s = h2 / (t * t * t);
  }
  return out;
}

// Arcsinh inverse: phi_t^{-1}(y) = sinh(u)/t = y * S(u), u = t*y, with
// S(u) = sinh(u)/u. Derivatives in t are y^2 S'(u) and y^3 S''(u).
inline constexpr double kArcsinhSeries = 0.5;
inline constexpr double kSinhLimit = 700.0;

inline std::array<double, 3> sinhc_and_derivatives(double u) {
  if (std::fabs(u) < kArcsinhSeries) {
    // S(u) = sum u^{2k}/(2k+1)!
    const double u2 = u * u;
    double s0 = 1.0, s1 = 0.0, s2 = 0.0;
    double fact = 1.0;  // (2k+1)!
    double q = 1.0;     // u^{2k-2}
    for (int k = 1; k < 12; ++k) {
      fact *= (2.0 * k) * (2.0 * k + 1.0);
      s0 += q * u2 / fact;
      s1 += 2.0 * k * q * u / fact;
      s2 += 2.0 * k * (2.0 * k - 1.0) * q / fact;
      q *= u2;
    }
    return {s0, s1, s2};
  }
  const double sh = std::sinh(u);
  const double ch = std::cosh(u);
  return {sh / u, (u * ch - sh) / (u * u), (u * u * sh - 2.0 * u * ch + 2.0 * sh) / (u * u * u)};
}

inline void check_sinh_range(double t, double y) {
  if (!(std::fabs(t * y) <= kSinhLimit)) {
    throw OverflowError("sinh(t*y) overflows at " + fmt_point(t, y));
  }
}

}  // namespace detail

// Box-Cox: phi_t(x) = (x^t - 1)/t, log x at t = 0, for x > 0.
inline double boxcox_forward(double t, double x) {
  if (!(x > 0.0)) throw DomainError("Box-Cox forward map needs x > 0, got " + std::to_string(x));
  const double lx = std::log(x);
  if (std::fabs(t) < kSmallParameter) {
    const double v = t * lx;
    return lx * (1.0 + v / 2.0 + v * v / 6.0);
  }
  return std::expm1(t * lx) / t;
}

// (1 + t*y)^{1/t}, evaluated as exp(log1p(t*y)/t).
inline double boxcox_inverse(double t, double y) {
  return std::exp(detail::boxcox_log_inverse(t, y, 0).s);
}

// (1/t) (y/(1+ty) - log(1+ty)/t) (1+ty)^{1/t}
inline double boxcox_d_inverse_dt(double t, double y) {
  const auto li = detail::boxcox_log_inverse(t, y, 1);
  return std::exp(li.s) * li.ds;
}

inline double boxcox_d2_inverse_dt2(double t, double y) {
  const auto li = detail::boxcox_log_inverse(t, y, 2);
  return std::exp(li.s) * (li.ds * li.ds + li.d2s);
}

// Arcsinh: phi_t(x) = asinh(t x)/t, x at t = 0.
inline double arcsinh_forward(double t, double x) {
  if (std::fabs(t) < kSmallParameter) {
    const double u = t * x;
    return x * (1.0 - u * u / 6.0);
  }
  return std::asinh(t * x) / t;
}

// sinh(t y)/t
inline double arcsinh_inverse(double t, double y) {
  detail::check_sinh_range(t, y);
  return y * detail::sinhc_and_derivatives(t * y)[0];
}

// -(1/t) (sinh(ty)/t - y cosh(ty))
inline double arcsinh_d_inverse_dt(double t, double y) {
  detail::check_sinh_range(t, y);
  return y * y * detail::sinhc_and_derivatives(t * y)[1];
}

// y^2 sinh(ty)/t - 2 y cosh(ty)/t^2 + 2 sinh(ty)/t^3
inline double arcsinh_d2_inverse_dt2(double t, double y) {
  detail::check_sinh_range(t, y);
  return y * y * y * detail::sinhc_and_derivatives(t * y)[2];
}

inline DeformationFamily boxcox_family() {
  return DeformationFamily{
      .name = "boxcox",
      .forward = boxcox_forward,
      .inverse = boxcox_inverse,
      .d_inverse_dt = boxcox_d_inverse_dt,
      .d2_inverse_dt2 = boxcox_d2_inverse_dt2,
      .param_domain = Interval::positive(),
      .x_domain = Interval::positive(),
      // The image depends on t: (-1/t, inf). Inverse calls outside it throw.
      .y_domain = Interval::real_line(),
  };
}

inline DeformationFamily arcsinh_family() {
  return DeformationFamily{
      .name = "arcsinh",
      .forward = arcsinh_forward,
      .inverse = arcsinh_inverse,
      .d_inverse_dt = arcsinh_d_inverse_dt,
      .d2_inverse_dt2 = arcsinh_d2_inverse_dt2,
      .param_domain = Interval::positive(),
      .x_domain = Interval::real_line(),
      .y_domain = Interval::real_line(),
  };
}

inline DeformationFamily family_by_name(const std::string& name) {
  if (name == "boxcox") return boxcox_family();
  if (name == "arcsinh") return arcsinh_family();
  throw ConfigError("unknown deformation family '" + name + "' (expected boxcox or arcsinh)");
}

inline double second_d_inverse_dt2(const DeformationFamily& family, double t, double y) {
  return family.d2_inverse_dt2(t, y);
}

// Finite-difference validation of a family's parameter derivatives. Custom
// families supply their own derivatives; this is the diagnostic for them.
struct DerivativeCheckOptions {
  double step = 1e-6;
  double first_rel_tol = 1e-5;
  double first_abs_floor = 1e-8;
  double second_rel_tol = 1e-4;
  double second_abs_floor = 1e-7;
};

struct DerivativeMismatch {
  double t;
  double y;
  int order;
  double analytic;
  double finite_difference;
};

struct DerivativeCheckReport {
  std::size_t points_checked = 0;
  std::size_t points_skipped = 0;  // (t, y) outside the inverse's domain
  double worst_first_excess = 0.0;  // max |err| / tol, <= 1 means pass
  double worst_second_excess = 0.0;
  std::vector<DerivativeMismatch> mismatches;

  bool passed() const { return mismatches.empty(); }
};

inline bool within_tolerance(double analytic, double reference, double rel, double abs_floor) {
  return std::fabs(analytic - reference) <= rel * std::fabs(reference) + abs_floor;
}

inline DerivativeCheckReport validate_derivatives(const DeformationFamily& family,
                                                  const std::vector<double>& t_grid,
                                                  const std::vector<double>& y_grid,
                                                  const DerivativeCheckOptions& opt = {}) {
  DerivativeCheckReport report;
  const double h = opt.step;
  for (double t : t_grid) {
    for (double y : y_grid) {
      double d1 = 0, d2 = 0, fd1 = 0, fd2 = 0;
      try {
        d1 = family.d_inverse_dt(t, y);
        d2 = family.d2_inverse_dt2(t, y);
        fd1 = (family.inverse(t + h, y) - family.inverse(t - h, y)) / (2.0 * h);
        fd2 = (family.d_inverse_dt(t + h, y) - family.d_inverse_dt(t - h, y)) / (2.0 * h);
      } catch (const DomainError&) {
        ++report.points_skipped;
        continue;
      }
      ++report.points_checked;
      const double tol1 = opt.first_rel_tol * std::fabs(fd1) + opt.first_abs_floor;
      const double tol2 = opt.second_rel_tol * std::fabs(fd2) + opt.second_abs_floor;
      report.worst_first_excess = std::max(report.worst_first_excess, std::fabs(d1 - fd1) / tol1);
      report.worst_second_excess = std::max(report.worst_second_excess, std::fabs(d2 - fd2) / tol2);
      if (std::fabs(d1 - fd1) > tol1) report.mismatches.push_back({t, y, 1, d1, fd1});
      if (std::fabs(d2 - fd2) > tol2) report.mismatches.push_back({t, y, 2, d2, fd2});
    }
  }
  return report;
}

}  // namespace deformest
