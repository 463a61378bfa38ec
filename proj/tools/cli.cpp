#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "deformest/deformest.hpp"

namespace deformest::cli {
namespace {

using nlohmann::json;

// Options shared by the estimate/contrast/density subcommands.
struct CommonOptions {
  std::string family;
  double theta = 1.0;
  double a = 0.1;
  double b = 2.0;
  std::string pairing = "domain-safe";
  std::optional<double> source_min;
  std::optional<double> source_max;
};

struct RunConfig {
  CommonOptions common;
  std::uint64_t seed = 42;
  std::uint64_t n = 1000;
  double gain = 1.0;
  double rho = 1.0;
  std::string lambda = "1";
  std::optional<double> theta0;
  std::optional<double> sigma2;
  bool innovations = false;
  std::string dump_pairs;
  std::size_t grid = 201;
  std::string method = "quadrature";
  std::size_t mc_samples = 100000;
  bool check_assumptions = false;
  double alpha = 0.2;
  std::string kernel = "gaussian";
  double grid_min = 0.9;
  double grid_max = 2.1;
  std::size_t grid_points = 241;
  std::string variant = "plugin";
  std::string out_path;
  std::string experiment_kind;
  std::string config_path;
  std::string out_dir;
};

CLI::Validator open_closed(double lo, double hi) {
  return CLI::Validator(
      [lo, hi](std::string& s) -> std::string {
        double v = 0;
        try {
          v = std::stod(s);
        } catch (...) {
          return "not a number: " + s;
        }
        if (!(v > lo && v <= hi)) return "value " + s + " not in (" + format_double(lo) + ", " + format_double(hi) + "]";
        return {};
      },
      "in (" + format_double(lo) + ", " + format_double(hi) + "]");
}

CLI::Validator open_open(double lo, double hi) {
  return CLI::Validator(
      [lo, hi](std::string& s) -> std::string {
        double v = 0;
        try {
          v = std::stod(s);
        } catch (...) {
          return "not a number: " + s;
        }
        if (!(v > lo && v < hi)) return "value " + s + " not in (" + format_double(lo) + ", " + format_double(hi) + ")";
        return {};
      },
      "in (" + format_double(lo) + ", " + format_double(hi) + ")");
}

const CLI::Validator kPositive = open_open(0.0, std::numeric_limits<double>::infinity());

void add_common(CLI::App* sub, CommonOptions& c) {
  sub->add_option("--family", c.family, "deformation family")->required()->check(CLI::IsMember({"boxcox", "arcsinh"}));
  sub->add_option("--theta", c.theta, "true parameter");
  sub->add_option("--a", c.a, "lower end of the projection interval");
  sub->add_option("--b", c.b, "upper end of the projection interval");
  sub->add_option("--pairing", c.pairing, "default epsilon law")->check(CLI::IsMember({"domain-safe", "as-published"}));
  sub->add_option("--source-min", c.source_min, "lower bound of the uniform epsilon law");
  sub->add_option("--source-max", c.source_max, "upper bound of the uniform epsilon law");
}

ExperimentConfig to_experiment(const RunConfig& r) {
  ExperimentConfig c;
  c.family = r.common.family;
  c.pairing = r.common.pairing == "as-published" ? SourcePairing::as_published : SourcePairing::domain_safe;
  if (r.common.source_min || r.common.source_max) {
    const auto def = default_source(c.family, c.pairing);
    c.source = std::array<double, 2>{r.common.source_min.value_or(def.lower()), r.common.source_max.value_or(def.upper())};
  }
  c.theta = r.common.theta;
  c.a = r.common.a;
  c.b = r.common.b;
  c.theta0 = r.theta0;
  c.gain = r.gain;
  c.rho = r.rho;
  if (r.lambda == "a7") {
    c.lambda_policy = GainPolicy::a7;
  } else if (r.lambda == "local") {
    c.lambda_policy = GainPolicy::local;
  } else {
    std::size_t used = 0;
    try {
      c.lambda = std::stod(r.lambda, &used);
    } catch (...) {
      used = 0;
    }
    if (used != r.lambda.size() || !(c.lambda > 0.0)) {
      throw ConfigError("--lambda must be a positive number, a7 or local (got '" + r.lambda + "')");
    }
  }
  c.sigma2 = r.sigma2;
  c.alpha = r.alpha;
  c.kernel = r.kernel;
  c.master_seed = r.seed;
  return c;
}

// Writes to --out when given, otherwise to the provided stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot open output file '" + path + "'");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void emit_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

int cmd_estimate(const RunConfig& r, std::ostream& out, std::ostream& err) {
  auto cfg = to_experiment(r);
  emit_warnings(validate(cfg), err);
  if (r.n < 1) throw ConfigError("--n must be >= 1");
  const auto family = family_by_name(cfg.family);
  const auto source = source_of(cfg);

  json cj = to_json(cfg);
  cj["subcommand"] = "estimate";
  cj["n"] = r.n;
  cj["seed"] = r.seed;
  cj["rng_algorithm"] = std::string(kRngAlgorithm);
  for (const char* k : {"replicates", "checkpoints", "master_seed", "alpha", "kernel", "grid_points", "c1_samples", "local_target"}) cj.erase(k);

  std::ofstream pairs;
  if (!r.dump_pairs.empty()) {
    pairs.open(r.dump_pairs);
    if (!pairs) throw ConfigError("cannot open pair dump file '" + r.dump_pairs + "'");
  }
  std::optional<CsvWriter> pair_csv;
  if (pairs.is_open()) pair_csv.emplace(pairs, cj, std::vector<std::string>{"n", "epsilon", "x"});

  ObservationStream stream(family, cfg.theta, source, r.seed);
  const auto tr = run(stream, make_state(estimator_options(cfg, resolve_gain(cfg).lambda)), r.n, [&](const StepRecord& s) {
    if (pair_csv) pair_csv->row({std::to_string(s.n), format_double(s.epsilon), format_double(s.x)});
  });

  Sink sink(r.out_path, out);
  std::vector<std::string> cols{"n", "theta_hat"};
  if (r.innovations) {
    cols.push_back("T");
    cols.push_back("skipped");
  }
  CsvWriter csv(sink.get(), cj, cols);
  for (std::size_t n = 0; n < tr.theta_hat.size(); ++n) {
    std::vector<std::string> row{std::to_string(n), format_double(tr.theta_hat[n])};
    if (r.innovations) {
      row.push_back(tr.innovations[n] ? format_double(*tr.innovations[n]) : "");
      row.push_back(tr.skipped[n] ? "1" : "0");
    }
    csv.row(row);
  }
  if (tr.skip_count > 0) err << "warning: " << tr.skip_count << " steps skipped (inverse undefined)\n";
  return 0;
}

int cmd_contrast(const RunConfig& r, std::ostream& out, std::ostream& err) {
  auto cfg = to_experiment(r);
  emit_warnings(validate(cfg), err);
  if (r.grid < 1) throw ConfigError("--grid must be >= 1");
  ContrastReportOptions opt;
  opt.grid_points = r.grid;
  opt.method = r.method == "monte-carlo" ? ContrastMethod::monte_carlo : ContrastMethod::quadrature;
  opt.mc_samples = r.mc_samples;
  opt.mc_seed = r.seed;
  const auto rep = contrast_report(family_by_name(cfg.family), cfg.theta, source_of(cfg), cfg.a, cfg.b, opt);

  json cj{{"subcommand", "contrast"},
          {"family", cfg.family},
          {"theta", cfg.theta},
          {"a", cfg.a},
          {"b", cfg.b},
          {"source", {source_of(cfg).lower(), source_of(cfg).upper()}},
          {"grid", r.grid},
          {"method", to_string(opt.method)}};
  if (opt.method == ContrastMethod::monte_carlo) {
    cj["mc_samples"] = r.mc_samples;
    cj["seed"] = r.seed;
    cj["rng_algorithm"] = std::string(kRngAlgorithm);
  }
  Sink sink(r.out_path, out);
  CsvWriter csv(sink.get(), cj, {"t", "M", "Mprime", "Msecond", "err"});
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    const double e = std::max({rep.err_M[i], rep.err_Mprime[i], rep.err_Msecond[i]});
    csv.row(std::vector<double>{rep.t[i], rep.M[i], rep.Mprime[i], rep.Msecond[i], e});
  }
  if (r.check_assumptions) {
    auto& o = sink.get();
    o << "# A5 holds=" << (rep.a5.holds ? "true" : "false") << " exclusion=" << format_double(rep.a5.exclusion)
      << " min_signed_slope=" << format_double(rep.a5.min_signed_slope);
    if (rep.a5.first_violation) o << " first_violation_t=" << format_double(*rep.a5.first_violation);
    o << '\n';
    o << "# A7 min_Msecond=" << format_double(rep.a7.min_Msecond) << " argmin=" << format_double(rep.a7.argmin)
      << " holds_at_unit_gain=" << (rep.a7.holds_at_unit_gain ? "true" : "false");
    if (rep.a7.certifiable()) {
      o << " suggested_lambda=" << format_double(*rep.a7.suggested_gain)
        << " rescaled_min=" << format_double(rep.a7.rescaled_min);
    } else {
      o << " suggested_lambda=none (min M'' <= 0; no rescaling certifies A7)";
    }
    o << '\n';
  }
  return 0;
}

int cmd_density(const RunConfig& r, std::ostream& out, std::ostream& err) {
  auto cfg = to_experiment(r);
  emit_warnings(validate(cfg), err);
  if (r.n < 1) throw ConfigError("--n must be >= 1");
  if (!(r.grid_min < r.grid_max) || r.grid_points < 2) {
    throw ConfigError("density grid needs --grid-min < --grid-max and --grid-points >= 2");
  }
  const auto variant = density_variant_by_name(r.variant);
  const auto grid = linspace(r.grid_min, r.grid_max, r.grid_points);
  const auto d = run_density(cfg, r.n, grid, r.seed, resolve_gain(cfg).lambda);
  const std::vector<double>* values = &d.plugin;
  if (variant == DensityVariant::oracle) values = &d.oracle;
  if (variant == DensityVariant::averaged) {
    if (d.averaged.empty()) throw DomainError("averaged estimate unavailable: plug-in skipped some observations");
    values = &d.averaged;
  }
  json cj = to_json(cfg);
  for (const char* k : {"replicates", "checkpoints", "master_seed", "grid_points", "c1_samples", "local_target"}) cj.erase(k);
  cj["subcommand"] = "density";
  cj["n"] = r.n;
  cj["seed"] = r.seed;
  cj["rng_algorithm"] = std::string(kRngAlgorithm);
  cj["grid_min"] = r.grid_min;
  cj["grid_max"] = r.grid_max;
  cj["grid_points"] = r.grid_points;
  cj["variant"] = r.variant;
  Sink sink(r.out_path, out);
  CsvWriter csv(sink.get(), cj, {"x", "f_hat"});
  for (std::size_t i = 0; i < grid.size(); ++i) csv.row(std::vector<double>{grid[i], (*values)[i]});
  if (d.plugin_skipped > 0) err << "warning: " << d.plugin_skipped << " plug-in updates skipped\n";
  return 0;
}

std::filesystem::path output_dir(const RunConfig& r) {
  if (!r.out_dir.empty()) return r.out_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return ".";
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f << text;
}

void write_histogram(const std::filesystem::path& p, const json& cj, const Histogram& h) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  CsvWriter csv(f, cj, {"bin_lo", "bin_hi", "count"});
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    csv.row({format_double(h.edges[i]), format_double(h.edges[i + 1]), std::to_string(h.counts[i])});
  }
}

int cmd_experiment(const RunConfig& r, std::ostream& out, std::ostream& err) {
  std::ifstream in(r.config_path);
  if (!in) throw ConfigError("cannot read config file '" + r.config_path + "'");
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const auto cfg = config_from_json(raw);
  emit_warnings(validate(cfg), err);
  const auto dir = output_dir(r);
  std::filesystem::create_directories(dir);

  json cj = to_json(cfg);
  cj["experiment"] = r.experiment_kind;
  cj["rng_algorithm"] = std::string(kRngAlgorithm);
  json report;
  report["config"] = cj;
  report["config_hash"] = config_hash(cj);
  std::vector<std::string> written;

  const auto family = family_by_name(cfg.family);
  const auto source = source_of(cfg);

  if (r.experiment_kind == "mse") {
    ContrastReportOptions copt;
    copt.grid_points = cfg.grid_points;
    const auto contrast = contrast_report(family, cfg.theta, source, cfg.a, cfg.b, copt);
    const auto gain = resolve_gain(cfg);
    const auto rep = run_replications(cfg, cfg.replicates, cfg.checkpoints, gain.lambda);
    const auto c1 = estimate_c1(family, cfg.theta, source, cfg.a, cfg.b, cfg.grid_points, cfg.c1_samples,
                                split_seed(cfg.master_seed, 0xC1));
    const auto bound = mse_bound_check(rep, contrast.a7, c1);
    report["a7"] = to_json(contrast.a7);
    report["a5_holds"] = contrast.a5.holds;
    report["c1"] = {{"value", c1.value}, {"standard_error", c1.standard_error}, {"samples", c1.samples}, {"grid_points", c1.grid_points}};
    report["replication"] = to_json(rep);
    report["mse_bound"] = to_json(bound);
    std::ofstream f(dir / "mse.csv");
    CsvWriter csv(f, cj, {"n", "mse", "bound", "log10_bound_lambda_scaled"});
    for (std::size_t k = 0; k < rep.checkpoints.size(); ++k) {
      csv.row({std::to_string(rep.checkpoints[k]), format_double(rep.mse[k]), format_double(bound.bound[k]),
               format_double(bound.log10_bound_scaled[k])});
    }
    written.push_back("mse.csv");
    out << "mse bound " << (bound.applicable ? (bound.holds ? "holds" : "VIOLATED") : "inapplicable: " + bound.inapplicable_reason)
        << '\n';
  } else if (r.experiment_kind == "clt") {
    const auto gain = resolve_gain(cfg);
    const auto clt = clt_samples(cfg, cfg.replicates, cfg.checkpoints.back(), gain.lambda);
    report["clt"] = to_json(clt);
    std::ofstream f(dir / "clt_samples.csv");
    CsvWriter csv(f, cj, {"replicate", "seed", "rescaled_error"});
    for (std::size_t i = 0; i < clt.samples.size(); ++i) {
      csv.row({std::to_string(i), std::to_string(replicate_seed(cfg.master_seed, i)), format_double(clt.samples[i])});
    }
    write_histogram(dir / "histogram.csv", cj, clt.histogram);
    written.insert(written.end(), {"clt_samples.csv", "histogram.csv"});
    out << "clt variance " << format_double(clt.variance);
    if (clt.target_variance) out << " target " << format_double(*clt.target_variance);
    out << '\n';
  } else if (r.experiment_kind == "figure") {
    const auto gain = resolve_gain(cfg);
    ObservationStream stream(family, cfg.theta, source, replicate_seed(cfg.master_seed, 0));
    const auto tr = run(stream, make_state(estimator_options(cfg, gain.lambda)), cfg.checkpoints.back());
    {
      std::ofstream f(dir / "trace.csv");
      CsvWriter csv(f, cj, {"n", "theta_hat", "error"});
      for (std::size_t n = 0; n < tr.theta_hat.size(); ++n) {
        csv.row({std::to_string(n), format_double(tr.theta_hat[n]), format_double(tr.theta_hat[n] - cfg.theta)});
      }
    }
    ContrastReportOptions copt;
    copt.grid_points = cfg.grid_points;
    const auto contrast = contrast_report(family, cfg.theta, source, cfg.a, cfg.b, copt);
    {
      std::ofstream f(dir / "contrast.csv");
      CsvWriter csv(f, cj, {"t", "M", "Mprime", "Msecond"});
      for (std::size_t i = 0; i < contrast.t.size(); ++i) {
        csv.row(std::vector<double>{contrast.t[i], contrast.M[i], contrast.Mprime[i], contrast.Msecond[i]});
      }
    }
    const auto clt = clt_samples(cfg, cfg.replicates, cfg.checkpoints.back(), gain.lambda);
    write_histogram(dir / "histogram.csv", cj, clt.histogram);
    report["trace_final_error"] = tr.theta_hat.back() - cfg.theta;
    report["a7"] = to_json(contrast.a7);
    report["clt"] = to_json(clt);
    written.insert(written.end(), {"trace.csv", "contrast.csv", "histogram.csv"});
    out << "final error " << format_double(tr.theta_hat.back() - cfg.theta) << '\n';
  } else {
    throw ConfigError("unknown experiment kind '" + r.experiment_kind + "'");
  }
  write_text(dir / "report.json", report.dump(2) + "\n");
  written.push_back("report.json");
  for (const auto& w : written) out << "wrote " << (dir / w).string() << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recursive estimation of parametric deformations", "deformest"};
  app.require_subcommand(1);
  RunConfig r;

  auto* est = app.add_subcommand("estimate", "run the projected Robbins-Monro recursion and print the trajectory");
  add_common(est, r.common);
  est->add_option("--n", r.n, "number of observations");
  est->add_option("--seed", r.seed, "stream seed");
  est->add_option("--gain", r.gain, "step gain c in gamma_n = c / n^rho")->check(kPositive);
  est->add_option("--rho", r.rho, "step exponent rho")->check(open_closed(0.5, 1.0));
  est->add_option("--lambda", r.lambda, "contrast gain: a positive number, a7 or local");
  est->add_option("--theta0", r.theta0, "initial value (default: midpoint of [a, b])");
  est->add_option("--excite-sigma2", r.sigma2, "excitation variance (enables the excited recursion)")
      ->check(CLI::NonNegativeNumber);
  est->add_flag("--innovations", r.innovations, "add T and skipped columns");
  est->add_option("--dump-pairs", r.dump_pairs, "write the raw (epsilon, X) pairs to this CSV file");
  est->add_option("--out", r.out_path, "output CSV (default: stdout)");

  auto* con = app.add_subcommand("contrast", "tabulate M, M', M'' on a parameter grid");
  add_common(con, r.common);
  con->add_option("--grid", r.grid, "number of grid points over [a, b]")->check(CLI::PositiveNumber);
  con->add_option("--method", r.method, "quadrature or monte-carlo")->check(CLI::IsMember({"quadrature", "monte-carlo"}));
  con->add_option("--mc-samples", r.mc_samples, "Monte Carlo samples per grid point")->check(CLI::Range(2, 1 << 30));
  con->add_option("--seed", r.seed, "Monte Carlo seed");
  con->add_flag("--check-assumptions", r.check_assumptions, "append A5/A7 certificates");
  con->add_option("--out", r.out_path, "output CSV (default: stdout)");

  auto* den = app.add_subcommand("density", "recursive kernel density estimate of epsilon");
  add_common(den, r.common);
  den->add_option("--n", r.n, "number of observations");
  den->add_option("--seed", r.seed, "stream seed");
  den->add_option("--alpha", r.alpha, "bandwidth exponent, h_n = n^-alpha")->check(open_open(0.0, 1.0));
  den->add_option("--kernel", r.kernel, "gaussian or epanechnikov")->check(CLI::IsMember({"gaussian", "epanechnikov"}));
  den->add_option("--grid-min", r.grid_min, "lower end of the evaluation grid");
  den->add_option("--grid-max", r.grid_max, "upper end of the evaluation grid");
  den->add_option("--grid-points", r.grid_points, "number of evaluation points")->check(CLI::Range(2, 1 << 24));
  den->add_option("--variant", r.variant, "plugin, oracle or averaged")->check(CLI::IsMember({"plugin", "oracle", "averaged"}));
  den->add_option("--gain", r.gain, "step gain c")->check(kPositive);
  den->add_option("--rho", r.rho, "step exponent rho")->check(open_closed(0.5, 1.0));
  den->add_option("--lambda", r.lambda, "contrast gain: a positive number, a7 or local");
  den->add_option("--out", r.out_path, "output CSV (default: stdout)");

  auto* exp = app.add_subcommand("experiment", "replication experiments driven by a JSON config");
  exp->add_option("kind", r.experiment_kind, "mse, clt or figure")->required()->check(CLI::IsMember({"mse", "clt", "figure"}));
  exp->add_option("--config", r.config_path, "JSON config file")->required();
  exp->add_option("--out-dir", r.out_dir, std::string("output directory (default: $") + kOutputDirEnv + " or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (*est) return cmd_estimate(r, out, err);
    if (*con) return cmd_contrast(r, out, err);
    if (*den) return cmd_density(r, out, err);
    if (*exp) return cmd_experiment(r, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const AssumptionError& e) {
    err << "assumption error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return 1;
  } catch (const OverflowError& e) {
    err << "overflow error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace deformest::cli
