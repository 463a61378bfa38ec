#include <catch_amalgamated.hpp>

#include <cmath>

#include "deformest/contrast.hpp"
#include "oracles.hpp"

using namespace deformest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const auto kBoxCox = boxcox_family();
const auto kArcsinh = arcsinh_family();
const auto kU12 = SourceDistribution::uniform(1.0, 2.0);
const auto kU01 = SourceDistribution::uniform(0.0, 1.0);

}  // namespace

TEST_CASE("quadrature rules integrate polynomials and report their size") {
  CHECK(gauss_legendre_512().nodes.size() == 512);
  CHECK(gauss_legendre_256().nodes.size() == 256);
  CHECK_THAT(gauss_legendre_512().integrate([](double x) { return x * x * x * x; }, 0.0, 2.0),
             WithinRel(32.0 / 5.0, 1e-14));
  CHECK_THAT(gauss_legendre_256().integrate([](double x) { return std::exp(x); }, -1.0, 1.0),
             WithinRel(std::exp(1.0) - std::exp(-1.0), 1e-14));
}

TEST_CASE("contrast vanishes at the true parameter") {
  CHECK_THAT(contrast_M(kBoxCox, 1.0, kU12, 1.0).value, WithinAbs(0.0, 1e-12));
  CHECK_THAT(contrast_Mprime(kBoxCox, 1.0, kU12, 1.0).value, WithinAbs(0.0, 1e-10));
  CHECK_THAT(contrast_M(kArcsinh, 1.0, kU01, 1.0).value, WithinAbs(0.0, 1e-12));
  CHECK_THAT(contrast_Mprime(kArcsinh, 1.0, kU01, 1.0).value, WithinAbs(0.0, 1e-10));
}

TEST_CASE("M'' at theta equals twice the mean squared inverse derivative") {
  for (const auto& [fam, src] : {std::pair{kBoxCox, kU12}, std::pair{kArcsinh, kU01}}) {
    const double m2 = contrast_Msecond(fam, 1.0, src, 1.0).value;
    CHECK(m2 > 0.0);
    const double direct = 2.0 * gauss_legendre_512().integrate(
                                    [&](double p) {
                                      const double d = fam.d_inverse_dt(1.0, fam.forward(1.0, src.quantile(p)));
                                      return d * d;
                                    },
                                    0.0, 1.0);
    CHECK_THAT(m2, WithinRel(direct, 1e-12));
  }
  CHECK_THAT(contrast_Msecond(kBoxCox, 1.0, kU12, 1.0).value, WithinRel(0.0643151, 1e-5));
  CHECK_THAT(contrast_Msecond(kArcsinh, 1.0, kU01, 1.0).value, WithinRel(0.0195302, 1e-5));
}

TEST_CASE("contrast matches a Monte Carlo oracle") {
  Rng rng(2024);
  const auto mc = oracles::monte_carlo(
      [&](std::size_t) {
        const double e = kU12.sample(rng);
        const double z = boxcox_inverse(0.5, boxcox_forward(1.0, e));
        return (z - e) * (z - e);
      },
      1000000);
  CHECK(std::fabs(contrast_M(kBoxCox, 1.0, kU12, 0.5).value - mc.mean) <= 3.0 * mc.standard_error);
  const auto p = contrast_point_mc(kBoxCox, 1.0, kU12, 0.5, 200000, 9);
  CHECK(std::fabs(p.M.value - contrast_M(kBoxCox, 1.0, kU12, 0.5).value) <= 4.0 * p.M.error);
}

TEST_CASE("derivatives agree with finite differences of M") {
  for (const auto& [fam, src] : {std::pair{kBoxCox, kU12}, std::pair{kArcsinh, kU01}}) {
    auto m = [&](double t) { return contrast_M(fam, 1.0, src, t).value; };
    for (double t : {0.2, 0.55, 1.0, 1.45, 1.9}) {
      CHECK_THAT(contrast_Mprime(fam, 1.0, src, t).value, WithinAbs(oracles::central_difference(m, t, 1e-5), 1e-6));
      CHECK_THAT(contrast_Msecond(fam, 1.0, src, t).value, WithinAbs(oracles::second_difference(m, t, 1e-4), 1e-5));
    }
  }
}

TEST_CASE("arcsinh contrast has a unique minimum at theta") {
  ContrastReportOptions opt;
  opt.grid_points = 191;
  const auto r = contrast_report(kArcsinh, 1.0, kU01, 0.1, 2.0, opt);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < r.M.size(); ++i) {
    if (r.M[i] < r.M[arg]) arg = i;
  }
  CHECK_THAT(r.t[arg], WithinAbs(1.0, 1e-9));
  for (std::size_t i = 1; i < r.M.size(); ++i) {
    if (r.t[i] <= 1.0) CHECK(r.M[i] < r.M[i - 1]);
    if (r.t[i - 1] >= 1.0) CHECK(r.M[i] > r.M[i - 1]);
  }
}

TEST_CASE("assumption certificates") {
  const auto bc = contrast_report(kBoxCox, 1.0, kU12, 0.1, 2.0);
  CHECK(bc.a5.holds);
  CHECK(bc.a7.certifiable());
  CHECK_FALSE(bc.a7.holds_at_unit_gain);
  CHECK_THAT(bc.a7.min_Msecond, WithinRel(0.00514295, 1e-4));
  CHECK(bc.a7.argmin == 2.0);
  CHECK(bc.a7.rescaled_min >= 0.5);
  CHECK_THAT(*bc.a7.suggested_gain, WithinRel(97.220457, 1e-4));

  const auto as = contrast_report(kArcsinh, 1.0, kU01, 0.1, 2.0);
  CHECK(as.a5.holds);
  CHECK_FALSE(as.a7.certifiable());
  CHECK(as.a7.min_Msecond < 0.0);
}

TEST_CASE("certificates on synthetic curves") {
  const std::vector<double> t{0.0, 0.5, 1.0, 1.5, 2.0};
  CHECK(certify_a5(t, {-1, -0.5, 0, 0.5, 1}, 1.0).holds);
  const auto bad = certify_a5(t, {-1, 0.5, 0, 0.5, 1}, 1.0);
  CHECK_FALSE(bad.holds);
  CHECK(*bad.first_violation == 0.5);
  const auto a7 = certify_a7(t, {1, 2, 0.8, 3, 4});
  CHECK(a7.holds_at_unit_gain);
  CHECK(*a7.suggested_gain == 1.0);
  const auto a7b = certify_a7(t, {0.1, 0.2, 0.3, 0.4, 0.25});
  CHECK_THAT(*a7b.suggested_gain, WithinRel(5.0, 1e-8));
  CHECK(a7b.rescaled_min >= 0.5);
  CHECK_FALSE(certify_a7(t, {0.1, 0.0, 1, 1, 1}).certifiable());
}

TEST_CASE("clt variance") {
  CHECK(clt_variance(kBoxCox, 1.0, kU12, 0.0, 100.0) == 0.0);
  const double m2 = contrast_Msecond(kBoxCox, 1.0, kU12, 1.0).value;
  CHECK_THAT(clt_variance(kBoxCox, 1.0, kU12, 0.5, 97.220457), WithinRel(0.5 / (2.0 * 97.220457 * m2 - 1.0), 1e-12));
  CHECK_THROWS_AS(clt_variance(kBoxCox, 1.0, kU12, 0.5), AssumptionError);
  CHECK_THROWS_AS(clt_variance(kBoxCox, 1.0, kU12, -1.0), ConfigError);
  CHECK_THAT(local_gain(kBoxCox, 1.0, kU12) * m2, WithinRel(1.0, 1e-14));
}

TEST_CASE("C1 estimate is deterministic and positive") {
  const auto a = estimate_c1(kBoxCox, 1.0, kU12, 0.1, 2.0, 51, 20000, 5);
  const auto b = estimate_c1(kBoxCox, 1.0, kU12, 0.1, 2.0, 51, 20000, 5);
  CHECK(a.value == b.value);
  CHECK(a.value > 0.0);
  CHECK(a.standard_error < 0.05 * a.value);
  CHECK_THAT(a.value, WithinRel(0.568, 0.05));
  CHECK_THROWS_AS(estimate_c1(kBoxCox, 1.0, kU12, 0.1, 2.0, 51, 1, 5), ConfigError);
}

TEST_CASE("contrast report validation and Monte Carlo method") {
  CHECK_THROWS_AS(contrast_report(kBoxCox, 1.0, kU12, 2.0, 0.1), ConfigError);
  ContrastReportOptions opt;
  opt.grid_points = 5;
  opt.method = ContrastMethod::monte_carlo;
  opt.mc_samples = 20000;
  const auto r = contrast_report(kBoxCox, 1.0, kU12, 0.1, 2.0, opt);
  CHECK(r.t.size() == 5);
  const auto q = contrast_report(kBoxCox, 1.0, kU12, 0.1, 2.0, {.grid_points = 5});
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::fabs(r.M[i] - q.M[i]) <= 5.0 * r.err_M[i] + 1e-12);
}
