#pragma once

// Seeded replication harness: many independent estimator trajectories,
// aggregated in replicate order so results are bit-reproducible.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "deformest/contrast.hpp"
#include "deformest/deformations.hpp"
#include "deformest/density.hpp"
#include "deformest/errors.hpp"
#include "deformest/estimator.hpp"
#include "deformest/parallel.hpp"
#include "deformest/rng.hpp"
#include "deformest/simulation.hpp"
#include "deformest/stats.hpp"

namespace deformest {

// How the contrast gain lambda is chosen:
//   fixed  - the configured value
//   a7     - the A7 certificate's suggested gain (min lambda M'' >= 1/2 on [a,b])
//   local  - lambda = local_target / M''(theta)
enum class GainPolicy { fixed, a7, local };

struct ExperimentConfig {
  std::string family = "boxcox";
  SourcePairing pairing = SourcePairing::domain_safe;
  std::optional<std::array<double, 2>> source;  // overrides the pairing default
  double theta = 1.0;
  double a = 0.1;
  double b = 2.0;
  std::optional<double> theta0;
  double gain = 1.0;  // step schedule gamma_n = gain / n^rho
  double rho = 1.0;
  GainPolicy lambda_policy = GainPolicy::fixed;
  double lambda = 1.0;
  double local_target = 1.0;
  std::optional<double> sigma2;  // excitation variance; empty = plain recursion
  double alpha = 0.2;
  std::string kernel = "gaussian";
  std::size_t replicates = 200;
  std::vector<std::uint64_t> checkpoints{100, 1000};
  std::uint64_t master_seed = 42;
  std::size_t grid_points = 201;
  std::size_t c1_samples = 1'000'000;
};

inline SourceDistribution source_of(const ExperimentConfig& c) {
  if (c.source) return SourceDistribution::uniform((*c.source)[0], (*c.source)[1]);
  return default_source(c.family, c.pairing);
}

inline std::string to_string(GainPolicy p) {
  switch (p) {
    case GainPolicy::fixed: return "fixed";
    case GainPolicy::a7: return "a7";
    case GainPolicy::local: return "local";
  }
  return "?";
}

// Validation shared by the CLI and the library. Returns warnings (theta
// outside (a, b) is allowed for exploration but voids the theory).
inline std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> warnings;
  family_by_name(c.family);
  if (!(c.a < c.b)) throw ConfigError("a must be < b (got a=" + std::to_string(c.a) + ", b=" + std::to_string(c.b) + ")");
  if (!(c.theta > c.a && c.theta < c.b)) warnings.push_back("theta lies outside (a, b); convergence theory does not apply");
  StepSchedule(c.gain, c.rho);
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1), got " + std::to_string(c.alpha));
  if (c.lambda_policy == GainPolicy::fixed && !(c.lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (c.sigma2 && !(*c.sigma2 >= 0.0)) throw ConfigError("sigma2 must be >= 0");
  if (c.theta0 && !(*c.theta0 >= c.a && *c.theta0 <= c.b)) throw ConfigError("theta0 must lie in [a, b]");
  if (c.grid_points < 2) throw ConfigError("grid_points must be >= 2");
  source_of(c);
  return warnings;
}

inline double initial_value(const ExperimentConfig& c) { return c.theta0.value_or(0.5 * (c.a + c.b)); }

inline A7Certificate a7_certificate(const ExperimentConfig& c) {
  ContrastReportOptions opt;
  opt.grid_points = c.grid_points;
  return contrast_report(family_by_name(c.family), c.theta, source_of(c), c.a, c.b, opt).a7;
}

struct ResolvedGain {
  double lambda;
  std::optional<A7Certificate> a7;
};

inline ResolvedGain resolve_gain(const ExperimentConfig& c) {
  switch (c.lambda_policy) {
    case GainPolicy::fixed:
      return {c.lambda, std::nullopt};
    case GainPolicy::a7: {
      auto cert = a7_certificate(c);
      if (!cert.certifiable()) {
        throw AssumptionError("A7 cannot be certified by rescaling: min M'' = " + std::to_string(cert.min_Msecond) +
                              " at t = " + std::to_string(cert.argmin));
      }
      return {*cert.suggested_gain, cert};
    }
    case GainPolicy::local:
      return {local_gain(family_by_name(c.family), c.theta, source_of(c), c.local_target), std::nullopt};
  }
  throw ConfigError("unknown gain policy");
}

inline EstimatorOptions estimator_options(const ExperimentConfig& c, double lambda) {
  EstimatorOptions o;
  o.a = c.a;
  o.b = c.b;
  o.schedule = StepSchedule(c.gain, c.rho);
  o.gain_lambda = lambda;
  o.excitation_variance = c.sigma2;
  o.theta0 = initial_value(c);
  return o;
}

inline std::uint64_t replicate_seed(std::uint64_t master, std::size_t index) { return split_seed(master, index); }

struct ReplicateResult {
  std::uint64_t seed;
  std::vector<double> errors;  // theta_n - theta at each checkpoint
  std::uint64_t skipped;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::size_t> counts;
};

// Freedman-Diaconis bin width 2 IQR n^{-1/3}; one bin when the IQR vanishes.
inline Histogram freedman_diaconis(const std::vector<double>& xs) {
  Histogram h;
  if (xs.empty()) return h;
  const auto [mn_it, mx_it] = std::minmax_element(xs.begin(), xs.end());
  double lo = *mn_it, hi = *mx_it;
  const double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
  std::size_t bins = 1;
  if (iqr > 0.0 && hi > lo) {
    const double width = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(xs.size()));
    bins = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil((hi - lo) / width)), 1, 1000);
  }
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  h.edges = linspace(lo, hi, bins + 1);
  h.counts.assign(bins, 0);
  for (double x : xs) {
    auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    h.counts[std::min(k, bins - 1)] += 1;
  }
  return h;
}

struct ReplicationReport {
  ExperimentConfig config;
  double gain_lambda = 1.0;
  std::string rng_algorithm{kRngAlgorithm};
  std::vector<std::uint64_t> checkpoints;
  std::vector<ReplicateResult> replicates;
  std::vector<double> mse;                // per checkpoint
  std::vector<double> median_abs_error;   // per checkpoint
  std::vector<double> rescaled;           // sqrt(n)(theta_n - theta) at the last checkpoint
  Histogram histogram;
  double rescaled_mean = 0.0;
  double rescaled_variance = 0.0;
  std::uint64_t total_skipped = 0;
};

inline void check_checkpoints(const std::vector<std::uint64_t>& cps) {
  if (cps.empty()) throw ConfigError("at least one checkpoint is required");
  if (cps.front() < 1) throw ConfigError("checkpoints must be >= 1");
  for (std::size_t i = 1; i < cps.size(); ++i) {
    if (cps[i] <= cps[i - 1]) throw ConfigError("checkpoints must be strictly increasing");
  }
}

// Runs `replicates` trajectories with seeds split from the master seed,
// evaluated at a lambda already resolved by the caller.
inline ReplicationReport run_replications(const ExperimentConfig& config, std::size_t replicates,
                                          const std::vector<std::uint64_t>& checkpoints, double lambda) {
  if (replicates < 2) throw ConfigError("replicates must be >= 2");
  check_checkpoints(checkpoints);
  validate(config);
  const auto family = family_by_name(config.family);
  const auto source = source_of(config);
  const auto opts = estimator_options(config, lambda);
  const std::uint64_t horizon = checkpoints.back();

  ReplicationReport r;
  r.config = config;
  r.gain_lambda = lambda;
  r.checkpoints = checkpoints;
  r.replicates.resize(replicates);
  parallel_for(replicates, [&](std::size_t i) {
    const auto seed = replicate_seed(config.master_seed, i);
    ObservationStream stream(family, config.theta, source, seed);
    const auto tr = run(stream, make_state(opts), horizon);
    ReplicateResult res{seed, {}, tr.skip_count};
    for (auto n : checkpoints) res.errors.push_back(tr.theta_hat[n] - config.theta);
    r.replicates[i] = std::move(res);
  });

  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    double sq = 0.0;
    std::vector<double> abs_err;
    for (const auto& rep : r.replicates) {
      sq += rep.errors[k] * rep.errors[k];
      abs_err.push_back(std::fabs(rep.errors[k]));
    }
    r.mse.push_back(sq / static_cast<double>(replicates));
    r.median_abs_error.push_back(median(abs_err));
  }
  const double root_n = std::sqrt(static_cast<double>(horizon));
  for (const auto& rep : r.replicates) {
    r.rescaled.push_back(root_n * rep.errors.back());
    r.total_skipped += rep.skipped;
  }
  const auto st = summarize(r.rescaled);
  r.rescaled_mean = st.mean();
  r.rescaled_variance = st.variance();
  r.histogram = freedman_diaconis(r.rescaled);
  return r;
}

inline ReplicationReport run_replications(const ExperimentConfig& config, std::size_t replicates,
                                          const std::vector<std::uint64_t>& checkpoints) {
  return run_replications(config, replicates, checkpoints, resolve_gain(config).lambda);
}

struct MseBoundResult {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> empirical;
  std::vector<double> bound;               // (theta0 - theta)^2 exp(C1 pi^2/6) / (n + 1)
  std::vector<double> log10_bound_scaled;  // same with C1 -> lambda^2 C1 (the constant for lambda M)
  double c1 = 0.0;
  double gain_lambda = 1.0;
  bool applicable = false;
  std::string inapplicable_reason;
  bool holds = false;
  bool holds_scaled = false;
};

inline double mse_bound(double initial_error, double c1, std::uint64_t n) {
  return initial_error * initial_error * std::exp(c1 * std::numbers::pi * std::numbers::pi / 6.0) /
         static_cast<double>(n + 1);
}

// Compares empirical MSE with the bound at every checkpoint. The bound needs
// gamma_n = 1/n and a certified curvature condition at the run's gain;
// otherwise it is flagged inapplicable rather than asserted.
inline MseBoundResult mse_bound_check(const ReplicationReport& report, const std::optional<A7Certificate>& a7,
                                      const C1Estimate& c1) {
  if (!a7) throw AssumptionError("MSE bound check requires an A7 certificate; run the contrast check first");
  MseBoundResult out;
  out.checkpoints = report.checkpoints;
  out.empirical = report.mse;
  out.c1 = c1.value;
  out.gain_lambda = report.gain_lambda;
  const double e0 = initial_value(report.config) - report.config.theta;
  const double lam2c1 = report.gain_lambda * report.gain_lambda * c1.value;
  for (auto n : report.checkpoints) {
    out.bound.push_back(mse_bound(e0, c1.value, n));
    out.log10_bound_scaled.push_back(e0 == 0.0 ? -std::numeric_limits<double>::infinity()
                                               : 2.0 * std::log10(std::fabs(e0)) +
                                                     lam2c1 * std::numbers::pi * std::numbers::pi / 6.0 / std::numbers::ln10 -
                                                     std::log10(static_cast<double>(n + 1)));
  }
  if (!(report.config.gain == 1.0 && report.config.rho == 1.0)) {
    out.inapplicable_reason = "step schedule is not gamma_n = 1/n";
  } else if (!(report.gain_lambda * a7->min_Msecond >= kA7Target)) {
    out.inapplicable_reason = "lambda * min M'' = " + std::to_string(report.gain_lambda * a7->min_Msecond) + " < 1/2";
  }
  out.applicable = out.inapplicable_reason.empty();
  if (!out.applicable) return out;
  out.holds = true;
  out.holds_scaled = true;
  for (std::size_t k = 0; k < out.empirical.size(); ++k) {
    if (!(out.empirical[k] <= out.bound[k])) out.holds = false;
    const double lg = out.empirical[k] > 0.0 ? std::log10(out.empirical[k]) : -std::numeric_limits<double>::infinity();
    if (!(lg <= out.log10_bound_scaled[k])) out.holds_scaled = false;
  }
  return out;
}

struct CltSamples {
  std::uint64_t n_terminal = 0;
  double gain_lambda = 1.0;
  std::vector<double> samples;  // sqrt(n)(theta_n - theta)
  double mean = 0.0;
  double variance = 0.0;
  double stddev = 0.0;
  std::optional<double> target_variance;  // excited mode with lambda M''(theta) > 1/2
  Histogram histogram;
  std::uint64_t total_skipped = 0;
};

inline CltSamples clt_samples(const ExperimentConfig& config, std::size_t replicates, std::uint64_t n_terminal,
                              double lambda) {
  const auto rep = run_replications(config, replicates, {n_terminal}, lambda);
  CltSamples out;
  out.n_terminal = n_terminal;
  out.gain_lambda = lambda;
  out.samples = rep.rescaled;
  out.mean = rep.rescaled_mean;
  out.variance = rep.rescaled_variance;
  out.stddev = std::sqrt(rep.rescaled_variance);
  out.histogram = rep.histogram;
  out.total_skipped = rep.total_skipped;
  if (config.sigma2) {
    try {
      out.target_variance =
          clt_variance(family_by_name(config.family), config.theta, source_of(config), *config.sigma2, lambda);
    } catch (const AssumptionError&) {
      out.target_variance.reset();
    }
  }
  return out;
}

inline CltSamples clt_samples(const ExperimentConfig& config, std::size_t replicates, std::uint64_t n_terminal) {
  return clt_samples(config, replicates, n_terminal, resolve_gain(config).lambda);
}

// ---------------------------------------------------------------------------
// Density experiments

// Grid covering the source support plus 4 * h_1 = 4 kernel radii (h_1 = 1).
inline std::vector<double> default_density_grid(const SourceDistribution& source, double spacing = 0.01) {
  const double lo = source.lower() - 4.0;
  const double hi = source.upper() + 4.0;
  const auto points = static_cast<std::size_t>(std::llround((hi - lo) / spacing)) + 1;
  return linspace(lo, hi, points);
}

struct DensityRun {
  std::vector<double> grid;
  std::vector<double> oracle;
  std::vector<double> plugin;
  std::vector<double> averaged;  // empty if plug-in updates were skipped
  std::uint64_t plugin_skipped = 0;
  double final_theta = 0.0;
};

// One estimator trajectory of length n feeding both density states: the
// oracle gets eps_i, the plug-in gets Z_i(theta_{i-1}).
inline DensityRun run_density(const ExperimentConfig& config, std::uint64_t n, const std::vector<double>& grid,
                              std::uint64_t seed, double lambda) {
  const auto family = family_by_name(config.family);
  const auto kernel = Kernel::by_name(config.kernel);
  DensityState oracle(grid, config.alpha, kernel, DensityVariant::oracle);
  DensityState plugin(grid, config.alpha, kernel, DensityVariant::plugin);
  DensityRun out;
  ObservationStream stream(family, config.theta, source_of(config), seed);
  const auto tr = run(stream, make_state(estimator_options(config, lambda)), n, [&](const StepRecord& s) {
    oracle.update(s.epsilon);
    try {
      plugin.update(family.inverse(s.theta_before, s.x));
    } catch (const DomainError&) {
      ++out.plugin_skipped;
    }
  });
  out.grid = grid;
  out.oracle = oracle.estimate();
  out.plugin = plugin.estimate();
  if (out.plugin_skipped == 0) out.averaged = averaged_estimate(oracle, plugin);
  out.final_theta = tr.theta_hat.back();
  return out;
}

struct DensityReplicationReport {
  double x = 0.0;
  double true_density = 0.0;
  std::vector<std::uint64_t> sizes;
  std::vector<double> mse_oracle, mse_plugin, mse_averaged;
  std::vector<double> median_abs_error_plugin;
};

// Replicate squared errors of the three estimators at a single point x.
inline DensityReplicationReport density_replications(const ExperimentConfig& config,
                                                     const std::vector<std::uint64_t>& sizes, double x,
                                                     std::size_t replicates, double lambda) {
  check_checkpoints(sizes);
  if (replicates < 1) throw ConfigError("density replications need at least one replicate");
  DensityReplicationReport out;
  out.x = x;
  out.true_density = source_of(config).density(x);
  out.sizes = sizes;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    std::vector<std::array<double, 3>> err(replicates);
    parallel_for(replicates, [&](std::size_t i) {
      const auto d = run_density(config, sizes[s], {x}, split_seed(config.master_seed ^ sizes[s], i), lambda);
      const double avg = d.averaged.empty() ? NAN : d.averaged[0];
      err[i] = {d.oracle[0] - out.true_density, d.plugin[0] - out.true_density, avg - out.true_density};
    });
    double so = 0, sp = 0, sa = 0;
    std::vector<double> abs_plugin;
    for (const auto& e : err) {
      so += e[0] * e[0];
      sp += e[1] * e[1];
      sa += e[2] * e[2];
      abs_plugin.push_back(std::fabs(e[1]));
    }
    const double r = static_cast<double>(replicates);
    out.mse_oracle.push_back(so / r);
    out.mse_plugin.push_back(sp / r);
    out.mse_averaged.push_back(sa / r);
    out.median_abs_error_plugin.push_back(median(abs_plugin));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["family"] = c.family;
  j["pairing"] = c.pairing == SourcePairing::domain_safe ? "domain-safe" : "as-published";
  const auto src = source_of(c);
  j["source"] = {src.lower(), src.upper()};
  j["theta"] = c.theta;
  j["a"] = c.a;
  j["b"] = c.b;
  j["theta0"] = initial_value(c);
  j["gain"] = c.gain;
  j["rho"] = c.rho;
  j["lambda"] = c.lambda_policy == GainPolicy::fixed ? nlohmann::json(c.lambda) : nlohmann::json(to_string(c.lambda_policy));
  j["local_target"] = c.local_target;
  j["sigma2"] = c.sigma2 ? nlohmann::json(*c.sigma2) : nlohmann::json(nullptr);
  j["alpha"] = c.alpha;
  j["kernel"] = c.kernel;
  j["replicates"] = c.replicates;
  j["checkpoints"] = c.checkpoints;
  j["master_seed"] = c.master_seed;
  j["grid_points"] = c.grid_points;
  j["c1_samples"] = c.c1_samples;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{"family",      "pairing", "source",     "theta",       "a",
                                              "b",           "theta0",  "gain",       "rho",         "lambda",
                                              "local_target", "sigma2", "alpha",      "kernel",      "replicates",
                                              "checkpoints", "master_seed", "grid_points", "c1_samples"};
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  ExperimentConfig c;
  try {
    if (j.contains("family")) c.family = j.at("family").get<std::string>();
    if (j.contains("pairing")) {
      const auto p = j.at("pairing").get<std::string>();
      if (p == "domain-safe") c.pairing = SourcePairing::domain_safe;
      else if (p == "as-published") c.pairing = SourcePairing::as_published;
      else throw ConfigError("pairing must be 'domain-safe' or 'as-published'");
    }
    if (j.contains("source") && !j.at("source").is_null()) {
      const auto s = j.at("source").get<std::vector<double>>();
      if (s.size() != 2) throw ConfigError("source must be [lower, upper]");
      c.source = std::array<double, 2>{s[0], s[1]};
    }
    if (j.contains("theta")) c.theta = j.at("theta").get<double>();
    if (j.contains("a")) c.a = j.at("a").get<double>();
    if (j.contains("b")) c.b = j.at("b").get<double>();
    if (j.contains("theta0") && !j.at("theta0").is_null()) c.theta0 = j.at("theta0").get<double>();
    if (j.contains("gain")) c.gain = j.at("gain").get<double>();
    if (j.contains("rho")) c.rho = j.at("rho").get<double>();
    if (j.contains("lambda")) {
      const auto& l = j.at("lambda");
      if (l.is_number()) {
        c.lambda_policy = GainPolicy::fixed;
        c.lambda = l.get<double>();
      } else {
        const auto s = l.get<std::string>();
        if (s == "a7") c.lambda_policy = GainPolicy::a7;
        else if (s == "local") c.lambda_policy = GainPolicy::local;
        else throw ConfigError("lambda must be a number, \"a7\" or \"local\"");
      }
    }
    if (j.contains("local_target")) c.local_target = j.at("local_target").get<double>();
    if (j.contains("sigma2")) {
      if (j.at("sigma2").is_null()) c.sigma2.reset();
      else c.sigma2 = j.at("sigma2").get<double>();
    }
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("kernel")) c.kernel = j.at("kernel").get<std::string>();
    if (j.contains("replicates")) c.replicates = j.at("replicates").get<std::size_t>();
    if (j.contains("checkpoints")) c.checkpoints = j.at("checkpoints").get<std::vector<std::uint64_t>>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("grid_points")) c.grid_points = j.at("grid_points").get<std::size_t>();
    if (j.contains("c1_samples")) c.c1_samples = j.at("c1_samples").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  Kernel::by_name(c.kernel);
  check_checkpoints(c.checkpoints);
  validate(c);
  return c;
}

inline nlohmann::json to_json(const Histogram& h) {
  return {{"edges", h.edges}, {"counts", h.counts}, {"rule", "freedman-diaconis"}};
}

inline nlohmann::json to_json(const A7Certificate& c) {
  nlohmann::json j{{"min_Msecond", c.min_Msecond}, {"argmin", c.argmin}, {"holds_at_unit_gain", c.holds_at_unit_gain}};
  j["suggested_gain"] = c.suggested_gain ? nlohmann::json(*c.suggested_gain) : nlohmann::json(nullptr);
  j["rescaled_min"] = c.certifiable() ? nlohmann::json(c.rescaled_min) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const ReplicationReport& r) {
  nlohmann::json j;
  j["config"] = to_json(r.config);
  j["gain_lambda"] = r.gain_lambda;
  j["rng_algorithm"] = r.rng_algorithm;
  j["checkpoints"] = r.checkpoints;
  j["mse"] = r.mse;
  j["median_abs_error"] = r.median_abs_error;
  auto reps = nlohmann::json::array();
  for (const auto& rep : r.replicates) reps.push_back({{"seed", rep.seed}, {"errors", rep.errors}, {"skipped", rep.skipped}});
  j["replicates"] = reps;
  j["rescaled"] = r.rescaled;
  j["rescaled_mean"] = r.rescaled_mean;
  j["rescaled_variance"] = r.rescaled_variance;
  j["histogram"] = to_json(r.histogram);
  j["total_skipped"] = r.total_skipped;
  return j;
}

inline nlohmann::json to_json(const MseBoundResult& m) {
  nlohmann::json j;
  j["checkpoints"] = m.checkpoints;
  j["empirical_mse"] = m.empirical;
  j["bound"] = m.bound;
  j["log10_bound_lambda_scaled"] = m.log10_bound_scaled;
  j["c1"] = m.c1;
  j["gain_lambda"] = m.gain_lambda;
  j["applicable"] = m.applicable;
  j["inapplicable_reason"] = m.inapplicable_reason;
  j["holds"] = m.holds;
  j["holds_lambda_scaled"] = m.holds_scaled;
  return j;
}

inline nlohmann::json to_json(const CltSamples& c) {
  nlohmann::json j;
  j["n_terminal"] = c.n_terminal;
  j["gain_lambda"] = c.gain_lambda;
  j["samples"] = c.samples;
  j["mean"] = c.mean;
  j["variance"] = c.variance;
  j["stddev"] = c.stddev;
  j["target_variance"] = c.target_variance ? nlohmann::json(*c.target_variance) : nlohmann::json(nullptr);
  j["histogram"] = to_json(c.histogram);
  j["total_skipped"] = c.total_skipped;
  return j;
}

}  // namespace deformest
