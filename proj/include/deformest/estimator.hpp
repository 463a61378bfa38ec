#pragma once

// Projected Robbins-Monro recursion for the deformation parameter:
//
//   theta_{n+1} = clamp(theta_n - gamma_{n+1} (lambda T_{n+1} + V_{n+1}), a, b)
//   T_{n+1}     = -2 d/dt phi_t^{-1}(X_{n+1}) (eps_{n+1} - phi_t^{-1}(X_{n+1})),  t = theta_n
//
// V is N(0, sigma^2) excitation noise, present only in excited mode.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "deformest/deformations.hpp"
#include "deformest/errors.hpp"
#include "deformest/rng.hpp"
#include "deformest/simulation.hpp"

namespace deformest {

// gamma_n = gain / n^exponent. Exponent in (1/2, 1] keeps sum gamma = inf and
// sum gamma^2 < inf.
class StepSchedule {
 public:
  explicit StepSchedule(double gain = 1.0, double exponent = 1.0) : gain_(gain), exponent_(exponent) {
    if (!(gain > 0.0) || !std::isfinite(gain)) {
      throw ConfigError("step gain must be positive, got " + std::to_string(gain));
    }
    if (!(exponent > 0.5 && exponent <= 1.0)) {
      throw ConfigError("step exponent rho must lie in (1/2, 1], got " + std::to_string(exponent));
    }
  }

  double operator()(std::uint64_t n) const {
    if (n == 0) throw ConfigError("step schedule is indexed from n = 1");
    const double nd = static_cast<double>(n);
    return exponent_ == 1.0 ? gain_ / nd : gain_ / std::pow(nd, exponent_);
  }

  double gain() const { return gain_; }
  double exponent() const { return exponent_; }
  bool is_harmonic() const { return gain_ == 1.0 && exponent_ == 1.0; }

 private:
  double gain_;
  double exponent_;
};

inline double project(double x, double a, double b) {
  if (!(a < b)) throw ConfigError("projection interval needs a < b");
  return x < a ? a : (x > b ? b : x);
}

// lambda * T at candidate theta_hat for one pair.
inline double innovation(const DeformationFamily& family, double theta_hat, double epsilon, double x,
                         double gain_lambda = 1.0) {
  const double z = family.inverse(theta_hat, x);
  const double dz = family.d_inverse_dt(theta_hat, x);
  return gain_lambda * (-2.0 * dz * (epsilon - z));
}

struct EstimatorState {
  double theta_hat = 0.0;
  std::uint64_t n = 0;
  double a = 0.0;
  double b = 1.0;
  StepSchedule schedule{};
  double gain_lambda = 1.0;
  std::optional<double> excitation_variance;  // sigma^2 >= 0 when excited
  std::uint64_t skipped = 0;
  std::optional<double> last_innovation;  // lambda T of the last step; empty if skipped
};

struct EstimatorOptions {
  double a = 0.1;
  double b = 2.0;
  StepSchedule schedule{};
  double gain_lambda = 1.0;
  std::optional<double> excitation_variance;
  std::optional<double> theta0;  // default: midpoint of [a, b]
};

inline EstimatorState make_state(const EstimatorOptions& opt) {
  if (!(opt.a < opt.b)) {
    throw ConfigError("projection interval needs a < b, got [" + std::to_string(opt.a) + ", " +
                      std::to_string(opt.b) + "]");
  }
  if (!(opt.gain_lambda > 0.0) || !std::isfinite(opt.gain_lambda)) {
    throw ConfigError("contrast gain lambda must be positive and finite");
  }
  if (opt.excitation_variance && !(*opt.excitation_variance >= 0.0)) {
    throw ConfigError("excitation variance must be >= 0");
  }
  const double theta0 = opt.theta0.value_or(0.5 * (opt.a + opt.b));
  if (!(theta0 >= opt.a && theta0 <= opt.b)) {
    throw ConfigError("initial value " + std::to_string(theta0) + " is outside [a, b]");
  }
  EstimatorState s;
  s.theta_hat = theta0;
  s.a = opt.a;
  s.b = opt.b;
  s.schedule = opt.schedule;
  s.gain_lambda = opt.gain_lambda;
  s.excitation_variance = opt.excitation_variance;
  return s;
}

// One transition. A DomainError from the innovation skips the update
// (theta unchanged, n still advances) and is counted.
inline EstimatorState rm_step(const EstimatorState& state, const DeformationFamily& family, double epsilon,
                              double x, std::optional<double> excitation_draw = std::nullopt) {
  EstimatorState next = state;
  next.n = state.n + 1;
  const double gamma = state.schedule(next.n);
  double t = 0.0;
  try {
    t = innovation(family, state.theta_hat, epsilon, x, state.gain_lambda);
  } catch (const DomainError&) {
    ++next.skipped;
    next.last_innovation.reset();
    return next;
  }
  next.last_innovation = t;
  const double drive = excitation_draw ? t + *excitation_draw : t;
  next.theta_hat = project(state.theta_hat - gamma * drive, state.a, state.b);
  return next;
}

struct StepRecord {
  std::uint64_t n;  // index of the new iterate
  double epsilon;
  double x;
  double theta_before;
  double theta_after;
  std::optional<double> innovation;
};

struct Trajectory {
  std::vector<double> theta_hat;                   // theta_0 .. theta_N
  std::vector<std::optional<double>> innovations;  // entry n is lambda T_n (n >= 1)
  std::vector<bool> skipped;                       // entry n: step n skipped
  std::uint64_t skip_count = 0;
};

using StepObserver = std::function<void(const StepRecord&)>;

// Applies rm_step `horizon` times to fresh pairs from `stream`. Excitation
// draws come from an independent stream seeded with seed ^ kExcitationSalt.
inline Trajectory run(ObservationStream& stream, EstimatorState state, std::uint64_t horizon,
                      const StepObserver& observer = {}) {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  Rng excitation(stream.seed() ^ kExcitationSalt);
  const double sigma = state.excitation_variance ? std::sqrt(*state.excitation_variance) : 0.0;

  Trajectory tr;
  tr.theta_hat.reserve(horizon + 1);
  tr.innovations.reserve(horizon + 1);
  tr.skipped.reserve(horizon + 1);
  tr.theta_hat.push_back(state.theta_hat);
  tr.innovations.emplace_back();
  tr.skipped.push_back(false);

  for (std::uint64_t k = 0; k < horizon; ++k) {
    const auto pair = stream.next_pair();
    std::optional<double> v;
    if (state.excitation_variance) v = sigma * excitation.normal();
    const double before = state.theta_hat;
    const auto before_skips = state.skipped;
    state = rm_step(state, stream.family(), pair.epsilon, pair.x, v);
    const bool skipped = state.skipped != before_skips;
    tr.theta_hat.push_back(state.theta_hat);
    tr.innovations.push_back(state.last_innovation);
    tr.skipped.push_back(skipped);
    if (observer) observer({state.n, pair.epsilon, pair.x, before, state.theta_hat, state.last_innovation});
  }
  tr.skip_count = state.skipped;
  return tr;
}

}  // namespace deformest
