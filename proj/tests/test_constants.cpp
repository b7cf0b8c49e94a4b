#include "confspec/constants.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace confspec;

TEST_SUITE("constants") {
  TEST_CASE("sphere volumes") {
    CHECK(sphere_volume(Dimension(2)) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-14));
    CHECK(sphere_volume(Dimension(3)) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-14));
    CHECK(sphere_volume(Dimension(4)) == doctest::Approx(8.0 * std::pow(std::numbers::pi, 2) / 3.0).epsilon(1e-14));
  }

  TEST_CASE("K_2 = 1 and the n = 2 bound is 16 pi") {
    CHECK(std::abs(k_constant(Dimension(2)) - 1.0) < 1e-12);
    CHECK(theorem_bound(Dimension(2)) == doctest::Approx(16.0 * std::numbers::pi).epsilon(1e-13));
    CHECK(conjecture_bound(Dimension(2)) == doctest::Approx(16.0 * std::numbers::pi).epsilon(1e-13));
  }

  TEST_CASE("K_3 closed form") {
    const double pi = std::numbers::pi;
    const double k3 = 4.0 / 3.0 * std::pow(32.0 / (15.0 * pi), 2.0 / 3.0);
    CHECK(k_constant(Dimension(3)) == doctest::Approx(k3).epsilon(1e-13));
    const double bound = k3 * 3.0 * std::pow(4.0 * pi * pi, 2.0 / 3.0);
    CHECK(theorem_bound(Dimension(3)) == doctest::Approx(bound).epsilon(1e-13));
    CHECK(std::abs(theorem_bound(Dimension(3)) - 35.8294) < 1e-4);
  }

  TEST_CASE("K_n lies in (1, 1.04] and tends to 1") {
    for (int n = 3; n <= 50; ++n) {
      const double k = k_constant(Dimension(n));
      CHECK(k > 1.0);
      CHECK(k <= 1.04);
    }
    // K_n - 1 ~ (1 - log 2) / n; reference values from 30-digit Gamma evaluation.
    CHECK(k_constant(Dimension(200)) - 1.0 == doctest::Approx(1.5167046886827620e-3).epsilon(1e-9));
    CHECK(k_constant(Dimension(2000)) - 1.0 == doctest::Approx(1.5325069306349555e-4).epsilon(1e-8));
    CHECK(2000 * (k_constant(Dimension(2000)) - 1.0) == doctest::Approx(1.0 - std::log(2.0)).epsilon(2e-3));
  }

  TEST_CASE("gradient integral: closed form vs quadrature") {
    for (int n = 2; n <= 8; ++n)
      CHECK(grad_norm_integral(Dimension(n)) ==
            doctest::Approx(grad_norm_integral_quadrature(Dimension(n))).epsilon(1e-13));
    CHECK(grad_norm_integral(Dimension(2)) == doctest::Approx(8.0 * std::numbers::pi / 3.0).epsilon(1e-14));
  }

  TEST_CASE("bound identity 2^{2/n}(n+1) I^{2/n} = K_n n (2 sigma_n)^{2/n}") {
    for (int n = 2; n <= 12; ++n) {
      const Dimension d(n);
      const double lhs = std::pow(2.0, 2.0 / n) * (n + 1) * std::pow(grad_norm_integral(d), 2.0 / n);
      CHECK(lhs == doctest::Approx(theorem_bound(d)).epsilon(1e-12));
    }
  }

  TEST_CASE("conformal lower bound") {
    CHECK(conformal_lower_bound(Dimension(2), 1) == doctest::Approx(8.0 * std::numbers::pi).epsilon(1e-14));
    CHECK(conformal_lower_bound(Dimension(2), 2) == doctest::Approx(conjecture_bound(Dimension(2))).epsilon(1e-14));
  }

  TEST_CASE("bound_constants fields agree") {
    const BoundConstants c = bound_constants(Dimension(4));
    CHECK(c.n == 4);
    CHECK(c.theorem_bound == doctest::Approx(c.k_n * c.conjecture_bound).epsilon(1e-14));
    CHECK(c.sigma_n == doctest::Approx(sphere_volume(Dimension(4))));
  }

  TEST_CASE("dimension below 2 is rejected") { CHECK_THROWS_AS(Dimension(1), std::invalid_argument); }
}
