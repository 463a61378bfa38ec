#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "deformest/deformations.hpp"
#include "deformest/errors.hpp"
#include "deformest/rng.hpp"

namespace deformest {

// Law of the latent epsilon. Only the uniform law on [lower, upper] is built
// in; lower == upper gives a point mass (used for degenerate fixtures).
class SourceDistribution {
 public:
  static SourceDistribution uniform(double lower, double upper) {
    if (!(lower <= upper)) {
      throw ConfigError("uniform source needs lower <= upper, got [" + std::to_string(lower) + ", " +
                        std::to_string(upper) + "]");
    }
    return SourceDistribution(lower, upper);
  }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool degenerate() const { return lower_ == upper_; }
  std::string kind() const { return "uniform"; }

  double quantile(double p) const { return lower_ + (upper_ - lower_) * p; }

  double sample(Rng& rng) const { return quantile(rng.uniform()); }

  double density(double x) const {
    if (degenerate()) throw DomainError("point-mass source has no density");
    return (x >= lower_ && x <= upper_) ? 1.0 / (upper_ - lower_) : 0.0;
  }

  double mean() const { return 0.5 * (lower_ + upper_); }

 private:
  SourceDistribution(double lower, double upper) : lower_(lower), upper_(upper) {}

  double lower_;
  double upper_;
};

struct ObservationPair {
  double epsilon;
  double x;
};

// Z(t) = phi_t^{-1}(x).
inline double registered_value(const DeformationFamily& family, double t, double x) {
  return family.inverse(t, x);
}

// i.i.d. stream of (epsilon_n, X_n = phi_theta(epsilon_n)). Single owner,
// sequential; replicates build their own stream from distinct seeds.
class ObservationStream {
 public:
  ObservationStream(DeformationFamily family, double theta_true, SourceDistribution source,
                    std::uint64_t seed)
      : family_(std::move(family)),
        theta_true_(theta_true),
        source_(source),
        seed_(seed),
        rng_(seed) {}

  ObservationPair next_pair() {
    const double eps = source_.sample(rng_);
    if (!family_.x_domain.contains(eps)) {
      throw DomainError("sampled epsilon " + std::to_string(eps) + " lies outside the domain of the " +
                        family_.name + " family; check the source pairing");
    }
    ++counter_;
    return {eps, family_.forward(theta_true_, eps)};
  }

  const DeformationFamily& family() const { return family_; }
  double theta_true() const { return theta_true_; }
  const SourceDistribution& source() const { return source_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  DeformationFamily family_;
  double theta_true_;
  SourceDistribution source_;
  std::uint64_t seed_;
  Rng rng_;
  std::uint64_t counter_ = 0;
};

// Default epsilon law per family. The domain-safe pairing keeps 1 + tX > 0
// for Box-Cox over t in [0.1, 2]; the swapped pairing is kept for study.
enum class SourcePairing { domain_safe, as_published };

inline SourceDistribution default_source(const std::string& family, SourcePairing pairing) {
  const bool safe = pairing == SourcePairing::domain_safe;
  if (family == "boxcox") return safe ? SourceDistribution::uniform(1.0, 2.0) : SourceDistribution::uniform(0.0, 1.0);
  if (family == "arcsinh") return safe ? SourceDistribution::uniform(0.0, 1.0) : SourceDistribution::uniform(1.0, 2.0);
  throw ConfigError("no default source for family '" + family + "'");
}

}  // namespace deformest
