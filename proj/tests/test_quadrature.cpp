#include "confspec/constants.hpp"
#include "confspec/harmonics.hpp"
#include "confspec/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace confspec;

namespace {

double integrate(const QuadratureGrid& g, const auto& f) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) acc += g.weights(i) * f(Vec(g.nodes.col(i)));
  return acc;
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre and Gegenbauer rules are exact to degree 2m - 1") {
    const Rule1D gl = gauss_legendre(5);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) acc += gl.weights[i] * std::pow(gl.nodes[i], 8);
    CHECK(acc == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    // int (1 - t^2)^{1/2} t^2 dt = pi / 8
    const Rule1D gg = gauss_gegenbauer(4, 0.5);
    acc = 0.0;
    for (std::size_t i = 0; i < gg.nodes.size(); ++i) acc += gg.weights[i] * gg.nodes[i] * gg.nodes[i];
    CHECK(acc == doctest::Approx(std::numbers::pi / 8.0).epsilon(1e-14));
    CHECK_THROWS_AS(gauss_gegenbauer(0, 0.0), std::invalid_argument);
  }

  TEST_CASE("sphere grids integrate monomials exactly") {
    for (int n : {2, 3, 4}) {
      const QuadratureGrid g = grid(Dimension(n), 8);
      const double vol = sphere_volume(Dimension(n));
      CHECK(g.total_weight() == doctest::Approx(vol).epsilon(1e-13));
      CHECK(integrate(g, [](const Vec& x) { return x(0) * x(0); }) == doctest::Approx(vol / (n + 1)).epsilon(1e-13));
      CHECK(integrate(g, [](const Vec& x) { return std::pow(x(1), 4); }) ==
            doctest::Approx(3.0 * vol / ((n + 1) * (n + 3))).epsilon(1e-13));
      CHECK(integrate(g, [n](const Vec& x) { return x(0) * x(0) * x(n) * x(n); }) ==
            doctest::Approx(vol / ((n + 1) * (n + 3))).epsilon(1e-13));
      CHECK(std::abs(integrate(g, [](const Vec& x) { return x(0) * x(1) * x(1); })) < 1e-13);
      CHECK(g.weights.minCoeff() > 0.0);
    }
    CHECK_THROWS_AS(grid(Dimension(5), 4), std::invalid_argument);
  }

  TEST_CASE("cap-split grid integrates functions with a kink on the boundary") {
    for (double r : {-0.6, 0.0, 0.45}) {
      const Cap a(r, SpherePoint(Vec(Vec::Ones(3))));
      const double h = a.height();
      const Vec p = a.p().coords();
      const QuadratureGrid g = cap_split_grid(Dimension(2), a, 20);
      const double got = integrate(g, [&](const Vec& x) { return std::max(x.dot(p) - h, 0.0); });
      CHECK(got == doctest::Approx(std::numbers::pi * (1 - h) * (1 - h)).epsilon(1e-13));
      const QuadratureGrid gc = cap_split_grid(Dimension(2), complement(a), 20);
      CHECK(gc.size() == g.size());
      CHECK(gc.total_weight() == doctest::Approx(4 * std::numbers::pi).epsilon(1e-13));
    }
  }

  TEST_CASE("cap-split grid on S^3") {
    const Cap a(0.3, SpherePoint(unit_vector(4, 2)));
    const double h = a.height();
    const QuadratureGrid g = cap_split_grid(Dimension(3), a, 16);
    // sigma_2 * int_h^1 (t - h) (1 - t^2)^{1/2} dt
    const Rule1D gl = gauss_legendre(60);
    double exact = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double t = h + (1 - h) * 0.5 * (gl.nodes[i] + 1);
      exact += 0.5 * (1 - h) * gl.weights[i] * (t - h) * std::sqrt(1 - t * t);
    }
    exact *= 4 * std::numbers::pi;
    const double got = integrate(g, [&](const Vec& x) { return std::max(x(2) - h, 0.0); });
    CHECK(got == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_SUITE("harmonics") {
  TEST_CASE("dimension counts") {
    for (int l = 0; l < 8; ++l) {
      CHECK(HarmonicBasis::harmonic_dimension(2, l) == 2 * l + 1);
      CHECK(HarmonicBasis::harmonic_dimension(3, l) == (l + 1) * (l + 1));
    }
    CHECK(HarmonicBasis::basis_dimension(2, 15) == 256);
    CHECK(HarmonicBasis(3, 4).size() == HarmonicBasis::basis_dimension(3, 4));
  }

  TEST_CASE("orthonormality and Dirichlet energies") {
    for (int n : {2, 3}) {
      const int L = n == 2 ? 8 : 5;
      const HarmonicBasis basis(n, L);
      const QuadratureGrid g = grid(Dimension(n), 2 * L + 2);
      const int m = basis.size();
      Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m, m), stiff = Eigen::MatrixXd::Zero(m, m);
      Eigen::VectorXd vals(m);
      Eigen::MatrixXd grads(n + 1, m);
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        basis.values_and_gradients(g.nodes.col(i), vals, grads);
        mass += g.weights(i) * vals * vals.transpose();
        stiff += g.weights(i) * grads.transpose() * grads;
      }
      CHECK((mass - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::VectorXd expected(m);
      for (int k = 0; k < m; ++k) expected(k) = basis.degree(k) * (basis.degree(k) + n - 1.0);
      CHECK((stiff - Eigen::MatrixXd(expected.asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("gradients are tangential and match directional differences") {
    const HarmonicBasis basis(2, 6);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    const int m = basis.size();
    Eigen::VectorXd vals(m), vp(m), vm(m);
    Eigen::MatrixXd grads(3, m);
    for (int t = 0; t < 10; ++t) {
      Vec x(3), v(3);
      for (int k = 0; k < 3; ++k) {
        x(k) = normal(rng);
        v(k) = normal(rng);
      }
      x.normalize();
      v = tangent_part(x, v).normalized();
      basis.values_and_gradients(x, vals, grads);
      const double h = 1e-6;
      basis.values(Vec(std::cos(h) * x + std::sin(h) * v), vp);
      basis.values(Vec(std::cos(h) * x - std::sin(h) * v), vm);
      CHECK(((vp - vm) / (2 * h) - grads.transpose() * v).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((x.transpose() * grads).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}
