#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "deformest/deformations.hpp"
#include "oracles.hpp"

using namespace deformest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

}  // namespace

TEST_CASE("boxcox inverse examples") {
  CHECK_THAT(boxcox_inverse(0.5, 2.0), WithinRel(4.0, 1e-14));
  for (double y0 : {-0.9, -0.5, 0.0, 0.3, 2.0, 10.0}) CHECK_THAT(boxcox_inverse(1.0, y0), WithinAbs(1.0 + y0, 1e-14));
  const double root = oracles::bisect([](double x) { return boxcox_forward(0.7, x) - 0.8; }, 1e-6, 100.0);
  CHECK_THAT(boxcox_inverse(0.7, 0.8), WithinAbs(root, 1e-10));
}

TEST_CASE("boxcox inverse outside the image throws DomainError") {
  CHECK_THROWS_AS(boxcox_inverse(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(boxcox_inverse(2.0, -0.6), DomainError);
  CHECK_THROWS_AS(boxcox_d_inverse_dt(2.0, -0.6), DomainError);
  CHECK_THROWS_AS(boxcox_forward(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(boxcox_forward(1.0, -2.0), DomainError);
}

TEST_CASE("boxcox first derivative examples") {
  CHECK_THAT(boxcox_d_inverse_dt(1.0, 1.0), WithinRel(1.0 - 2.0 * std::log(2.0), 1e-12));
  const double fd = oracles::central_difference([](double t) { return boxcox_inverse(t, 0.5); }, 0.5, 1e-6);
  CHECK_THAT(boxcox_d_inverse_dt(0.5, 0.5), WithinRel(fd, 1e-5));
  for (double t : {1e-8, 0.1, 0.5, 1.0, 2.0, 5.0}) CHECK(boxcox_d_inverse_dt(t, 0.0) == 0.0);
}

TEST_CASE("second derivative examples") {
  const auto bc = boxcox_family();
  const auto as = arcsinh_family();
  for (double t : {1e-8, 0.3, 1.0, 2.0}) CHECK(second_d_inverse_dt2(bc, t, 0.0) == 0.0);
  const double fd_bc = oracles::second_difference([](double t) { return boxcox_inverse(t, 0.6); }, 0.8, 1e-4);
  CHECK_THAT(second_d_inverse_dt2(bc, 0.8, 0.6), WithinRel(fd_bc, 1e-4));
  const double fd_as = oracles::second_difference([](double t) { return arcsinh_inverse(t, 0.9); }, 1.5, 1e-4);
  CHECK_THAT(second_d_inverse_dt2(as, 1.5, 0.9), WithinRel(fd_as, 1e-4));
}

TEST_CASE("arcsinh examples") {
  CHECK_THAT(arcsinh_inverse(1.0, std::log(1.0 + std::sqrt(2.0))), WithinRel(1.0, 1e-14));
  for (double t : {1e-8, 0.5, 1.0, 3.0}) CHECK(arcsinh_d_inverse_dt(t, 0.0) == 0.0);
  const double fd = oracles::central_difference([](double t) { return arcsinh_inverse(t, 1.2); }, 0.5, 1e-6);
  CHECK_THAT(arcsinh_d_inverse_dt(0.5, 1.2), WithinRel(fd, 1e-5));
}

TEST_CASE("arcsinh overflow is reported") {
  CHECK_THROWS_AS(arcsinh_inverse(2.0, 400.0), OverflowError);
  CHECK_THROWS_AS(arcsinh_d_inverse_dt(1.0, -701.0), OverflowError);
  CHECK_NOTHROW(arcsinh_inverse(1.0, 699.0));
}

TEST_CASE("closed forms agree with direct formulas away from the series branch") {
  for (double t : {0.3, 1.0, 1.7}) {
    for (double y : {0.5, 1.0, 2.5}) {
      const double bc = std::pow(1.0 + t * y, 1.0 / t);
      CHECK_THAT(boxcox_inverse(t, y), WithinRel(bc, 1e-13));
      const double bc1 = (1.0 / t) * (y / (1.0 + t * y) - std::log1p(t * y) / t) * bc;
      CHECK_THAT(boxcox_d_inverse_dt(t, y), WithinRel(bc1, 1e-12));
      const double s = std::sinh(t * y), c = std::cosh(t * y);
      CHECK_THAT(arcsinh_inverse(t, y), WithinRel(s / t, 1e-13));
      CHECK_THAT(arcsinh_d_inverse_dt(t, y), WithinRel(-(1.0 / t) * (s / t - y * c), 1e-11));
      CHECK_THAT(arcsinh_d2_inverse_dt2(t, y), WithinRel(y * y * s / t - 2.0 * y * c / (t * t) + 2.0 * s / (t * t * t), 1e-9));
    }
  }
}

TEST_CASE("small-parameter branches are continuous") {
  for (double x : {0.2, 1.0, 3.0}) {
    CHECK_THAT(boxcox_forward(0.0, x), WithinRel(std::log(x), 1e-15));
    CHECK_THAT(boxcox_forward(0.999e-6, x), WithinRel(boxcox_forward(1.001e-6, x), 1e-8));
    CHECK(arcsinh_forward(0.0, x) == x);
    CHECK_THAT(arcsinh_forward(0.999e-6, x), WithinRel(arcsinh_forward(1.001e-6, x), 1e-10));
  }
  for (double y : {-2.0, 0.01, 1.0, 3.0}) {
    CHECK_THAT(boxcox_inverse(1e-9, y), WithinRel(std::exp(y), 1e-7));
    CHECK_THAT(boxcox_d_inverse_dt(1e-9, y), WithinRel(-0.5 * y * y * std::exp(y), 1e-6));
    CHECK_THAT(arcsinh_inverse(1e-9, y), WithinRel(y, 1e-12));
  }
  // Either side of each series switch.
  for (double y : {0.5, -0.5, 2.0}) {
    const double tb = 1e-2 / std::fabs(y);
    CHECK_THAT(boxcox_d_inverse_dt(tb * (1 - 1e-9), y), WithinRel(boxcox_d_inverse_dt(tb * (1 + 1e-9), y), 1e-7));
    CHECK_THAT(boxcox_d2_inverse_dt2(tb * (1 - 1e-9), y), WithinRel(boxcox_d2_inverse_dt2(tb * (1 + 1e-9), y), 1e-6));
    const double ta = 0.5 / std::fabs(y);
    CHECK_THAT(arcsinh_d_inverse_dt(ta * (1 - 1e-9), y), WithinRel(arcsinh_d_inverse_dt(ta * (1 + 1e-9), y), 1e-8));
    CHECK_THAT(arcsinh_d2_inverse_dt2(ta * (1 - 1e-9), y), WithinRel(arcsinh_d2_inverse_dt2(ta * (1 + 1e-9), y), 1e-7));
  }
}

TEST_CASE("round trips and monotonicity on 20x20 grids") {
  for (const auto& fam : {boxcox_family(), arcsinh_family()}) {
    const auto xs = fam.name == "boxcox" ? grid(0.05, 5.0, 20) : grid(-3.0, 3.0, 20);
    for (double t : grid(0.1, 2.0, 20)) {
      double prev = -INFINITY;
      for (double x : xs) {
        const double y = fam.forward(t, x);
        CHECK(y > prev);
        prev = y;
        CHECK_THAT(fam.inverse(t, y), WithinAbs(x, 1e-12 * std::max(1.0, std::fabs(x))));
      }
    }
  }
}

TEST_CASE("finite-difference validation of both families") {
  const auto ts = grid(0.1, 2.0, 20);
  const auto bc = validate_derivatives(boxcox_family(), ts, grid(-0.45, 3.0, 20));
  CHECK(bc.passed());
  CHECK(bc.points_checked == 400);
  const auto as = validate_derivatives(arcsinh_family(), ts, grid(-3.0, 3.0, 20));
  CHECK(as.passed());
  CHECK(as.points_checked == 400);
}

TEST_CASE("validate_derivatives flags a wrong derivative") {
  auto fam = boxcox_family();
  fam.d_inverse_dt = [](double t, double y) { return 1.01 * boxcox_d_inverse_dt(t, y); };
  const auto r = validate_derivatives(fam, grid(0.5, 1.5, 5), grid(0.5, 2.0, 5));
  CHECK_FALSE(r.passed());
  CHECK(r.worst_first_excess > 1.0);
}

TEST_CASE("validate_derivatives skips points outside the domain") {
  const auto r = validate_derivatives(boxcox_family(), {2.0}, {-0.9, 1.0});
  CHECK(r.points_skipped == 1);
  CHECK(r.points_checked == 1);
}

TEST_CASE("family lookup") {
  CHECK(family_by_name("boxcox").name == "boxcox");
  CHECK(family_by_name("arcsinh").name == "arcsinh");
  CHECK_THROWS_AS(family_by_name("yeo-johnson"), ConfigError);
  CHECK(boxcox_family().x_domain.contains(1.0));
  CHECK_FALSE(boxcox_family().x_domain.contains(0.0));
  CHECK(arcsinh_family().x_domain.contains(-5.0));
}
