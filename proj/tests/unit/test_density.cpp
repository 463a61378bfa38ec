#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "deformest/contrast.hpp"
#include "deformest/density.hpp"

using namespace deformest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("built-in kernels pass their construction checks") {
  const auto g = Kernel::gaussian();
  CHECK_THAT(g.diagnostics().mass, WithinAbs(1.0, 1e-10));
  CHECK_THAT(g.diagnostics().second_moment, WithinAbs(1.0, 1e-10));
  const auto e = Kernel::epanechnikov();
  CHECK_THAT(e.diagnostics().mass, WithinAbs(1.0, 1e-10));
  CHECK_THAT(e.diagnostics().second_moment, WithinAbs(0.2, 1e-10));
  CHECK(Kernel::by_name("gaussian").kind() == KernelKind::gaussian);
  CHECK_THROWS_AS(Kernel::by_name("box"), ConfigError);
}

TEST_CASE("invalid kernels are rejected") {
  CHECK_THROWS_AS(Kernel::custom("half", [](double u) { return std::fabs(u) < 1 ? 0.5 * 0.75 * (1 - u * u) : 0.0; }, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(Kernel::custom("skew", [](double u) { return u > 0 && u < 1 ? 1.0 : 0.0; }, 1.0), ConfigError);
  CHECK_THROWS_AS(Kernel::custom("signed", [](double u) { return std::fabs(u) < 1 ? 1.5 * (1 - 2 * u * u) + 0.0 : 0.0; }, 1.0),
                  ConfigError);
  CHECK_NOTHROW(Kernel::custom("triangle", [](double u) { return std::fabs(u) < 1 ? 1 - std::fabs(u) : 0.0; }, 1.0));
}

TEST_CASE("single update reproduces the kernel") {
  const auto grid = linspace(-3.0, 3.0, 61);
  DensityState s(grid, 0.2, Kernel::gaussian(), DensityVariant::oracle);
  CHECK(s.bandwidth(1) == 1.0);
  s = density_update(s, 0.0);
  const auto f = s.estimate();
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK_THAT(f[i], WithinAbs(Kernel::gaussian()(grid[i]), 1e-15));
}

TEST_CASE("bandwidth sequence") {
  DensityState s({0.0}, 0.25, Kernel::gaussian(), DensityVariant::oracle);
  CHECK_THAT(s.bandwidth(16), WithinRel(0.5, 1e-15));
  CHECK_THROWS_AS(DensityState({0.0}, 0.0, Kernel::gaussian(), DensityVariant::oracle), ConfigError);
  CHECK_THROWS_AS(DensityState({0.0}, 1.0, Kernel::gaussian(), DensityVariant::oracle), ConfigError);
  CHECK_THROWS_AS(DensityState({}, 0.2, Kernel::gaussian(), DensityVariant::oracle), ConfigError);
}

TEST_CASE("estimate is non-negative and integrates to one") {
  const auto grid = linspace(-5.0, 7.0, 1201);
  DensityState s(grid, 0.2, Kernel::epanechnikov(), DensityVariant::oracle);
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) s.update(1.0 + rng.uniform());
  const auto f = s.estimate();
  for (double v : f) CHECK(v >= 0.0);
  CHECK_THAT(trapezoid(grid, f), WithinAbs(1.0, 1e-3));
  CHECK(std::fabs(f[650] - 1.0) < 0.15);  // x = 1.5
}

TEST_CASE("averaged estimate") {
  const auto grid = linspace(0.0, 3.0, 31);
  DensityState o(grid, 0.2, Kernel::gaussian(), DensityVariant::oracle);
  DensityState p(grid, 0.2, Kernel::gaussian(), DensityVariant::plugin);
  for (double x : {1.1, 1.4, 1.9}) {
    o.update(x);
    p.update(x);
  }
  CHECK(averaged_estimate(o, p) == o.estimate());
  p.update(1.5);
  CHECK_THROWS_AS(averaged_estimate(o, p), ConfigError);
  DensityState q(linspace(0.0, 3.0, 30), 0.2, Kernel::gaussian(), DensityVariant::plugin);
  CHECK_THROWS_AS(averaged_estimate(o, q), ConfigError);
}

TEST_CASE("variant names") {
  CHECK(density_variant_by_name("plugin") == DensityVariant::plugin);
  CHECK(to_string(DensityVariant::averaged) == "averaged");
  CHECK_THROWS_AS(density_variant_by_name("mean"), ConfigError);
  CHECK_THROWS_AS(trapezoid({0.0, 1.0}, {1.0}), ConfigError);
}
