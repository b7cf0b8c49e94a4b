#include "confspec/constants.hpp"
#include "confspec/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace confspec;

TEST_SUITE("spectral") {
  TEST_CASE("round S^2 spectrum with multiplicities") {
    const SpectrumReport s = spectrum(ConformalMetric::round(Dimension(2)), 15, 16);
    int k = 0;
    for (int l = 0; l <= 3; ++l)
      for (int m = 0; m < 2 * l + 1; ++m, ++k) CHECK(std::abs(s.eigenvalues[k] - l * (l + 1.0)) < 1e-8);
    CHECK(std::abs(s.invariant(1) - 8.0 * std::numbers::pi) < 1e-6);
    CHECK(lambda_invariant(s, 1) == s.invariant(1));
  }

  TEST_CASE("round S^3 spectrum") {
    const SpectrumReport s = spectrum(ConformalMetric::round(Dimension(3)), 6, 10);
    for (int k = 1; k <= 4; ++k) CHECK(std::abs(s.eigenvalues[k] - 3.0) < 1e-9);
    for (int k = 5; k <= 10; ++k) CHECK(std::abs(s.eigenvalues[k] - 8.0) < 1e-9);
    CHECK(s.volume == doctest::Approx(sphere_volume(Dimension(3))).epsilon(1e-12));
  }

  TEST_CASE("pullbacks by Moebius maps are isometric to the round sphere") {
    for (double len : {0.2, 0.5}) {
      Vec xi(3);
      xi << 0.6, 0.0, 0.8;
      const SpectrumReport s = spectrum(ConformalMetric::pullback_of_round(BallPoint(Vec(len * xi))), 25, 8);
      const double expected[] = {0, 2, 2, 2, 6, 6, 6, 6, 6};
      for (int k = 0; k <= 8; ++k) CHECK(std::abs(s.eigenvalues[k] - expected[k]) < 1e-6);
    }
  }

  TEST_CASE("scale invariance of lambda_k Vol^{2/n}") {
    const ConformalMetric g = ConformalMetric::random(Dimension(2), 4);
    const SpectrumReport a = spectrum(g, 10, 3);
    const SpectrumReport b = spectrum(g.scaled(0.7), 10, 3);
    CHECK(b.invariant(2) == doctest::Approx(a.invariant(2)).epsilon(1e-10));
    CHECK(b.eigenvalues[2] == doctest::Approx(a.eigenvalues[2] * std::exp(-1.4)).epsilon(1e-10));
  }

  TEST_CASE("Hersch inequality on random metrics") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const SpectrumReport s = spectrum(ConformalMetric::random(Dimension(2), seed), 12, 2);
      CHECK(s.invariant(1) <= 8.0 * std::numbers::pi + 1e-8);
      CHECK(s.invariant(2) < 16.0 * std::numbers::pi);
    }
  }

  TEST_CASE("normalized metric: unit volume, balanced, maximal direction e1") {
    for (int n : {2, 3}) {
      const NormalizedMetric ng = normalize(ConformalMetric::random(Dimension(n), 9));
      const DiscreteMeasure m = metric_measure(ng.metric, grid(Dimension(n), 40));
      CHECK(m.mass() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(renormalization_moment(m, Vec(Vec::Zero(n + 1))).norm() < 1e-9);
      const MaximalDirection d = maximal_direction(gram(m));
      CHECK(std::abs(std::abs(d.s(0)) - 1.0) < 1e-9);
      CHECK(!ng.multiple);
      const SpectrumReport a = spectrum(ng.original, default_basis_degree(n), 2);
      const SpectrumReport b = spectrum(ng.metric, default_basis_degree(n), 2);
      CHECK(b.invariant(2) == doctest::Approx(a.invariant(2)).epsilon(1e-4));
    }
    CHECK(normalize(ConformalMetric::round(Dimension(2))).multiple);
  }
}
