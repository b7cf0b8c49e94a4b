#include "confspec/constants.hpp"
#include "confspec/measure.hpp"
#include "confspec/metric.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace confspec;

namespace {

Vec random_ball(std::mt19937_64& rng, int d, double max_norm) {
  std::normal_distribution<double> normal;
  Vec v(d);
  for (int k = 0; k < d; ++k) v(k) = normal(rng);
  return std::uniform_real_distribution<double>(0.0, max_norm)(rng) * v.normalized();
}

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("uniform measure is already balanced") {
    const DiscreteMeasure nu = DiscreteMeasure::from_grid(grid(Dimension(2), 20));
    const RenormalizationPoint rp = hersch_renormalize(nu);
    CHECK(rp.xi.norm() < 1e-12);
    CHECK(rp.residual < 1e-10);
  }

  TEST_CASE("pushed uniform measure renormalizes at -eta") {
    std::mt19937_64 rng(42);
    for (int n : {2, 3}) {
      const DiscreteMeasure nu = DiscreteMeasure::from_grid(grid(Dimension(n), n == 2 ? 40 : 24));
      for (int t = 0; t < 5; ++t) {
        const Vec eta = random_ball(rng, n + 1, 0.6);
        const DiscreteMeasure pushed = pushforward(nu, MoebiusMap::moebius(eta));
        const RenormalizationPoint rp = hersch_renormalize(pushed);
        CHECK((rp.xi.coords() + eta).norm() < 1e-8);
      }
    }
  }

  TEST_CASE("renormalization point does not depend on the starting guess") {
    std::mt19937_64 rng(7);
    const DiscreteMeasure g = metric_measure(ConformalMetric::random(Dimension(2), 3), grid(Dimension(2), 40));
    const Vec ref = hersch_renormalize(g).xi.coords();
    for (int t = 0; t < 10; ++t) {
      HerschOptions o;
      o.initial_guess = random_ball(rng, 3, 0.8);
      CHECK((hersch_renormalize(g, o).xi.coords() - ref).norm() < 1e-8);
    }
  }

  TEST_CASE("a single atom escapes to the boundary") {
    Eigen::MatrixXd pts(3, 1);
    pts << 1, 0, 0;
    const DiscreteMeasure nu(pts, Eigen::VectorXd::Ones(1));
    CHECK_THROWS_AS(hersch_renormalize(nu), NumericalError);
  }

  TEST_CASE("lift keeps the mass and vanishes on the complement") {
    const DiscreteMeasure nu = DiscreteMeasure::from_grid(grid(Dimension(2), 30));
    const Cap a(0.35, SpherePoint(Vec(Vec::Ones(3))));
    std::size_t boundary = 0;
    const DiscreteMeasure mu = lift(nu, a, &boundary);
    CHECK(mu.mass() == doctest::Approx(nu.mass()).epsilon(1e-14));
    for (Eigen::Index i = 0; i < mu.size(); ++i) CHECK(cap_margin(a, mu.atom(i)) > -1e-12);
    CHECK(boundary == 0);
  }

  TEST_CASE("metric measure volume and scaling") {
    const QuadratureGrid g = grid(Dimension(3), 20);
    CHECK(metric_measure(ConformalMetric::round(Dimension(3)), g).mass() ==
          doctest::Approx(sphere_volume(Dimension(3))).epsilon(1e-13));
    const ConformalMetric m = ConformalMetric::random(Dimension(3), 5);
    const double v = metric_measure(m, g).mass();
    CHECK(metric_measure(m.scaled(0.25), g).mass() == doctest::Approx(v * std::exp(0.75)).epsilon(1e-13));
  }

  TEST_CASE("pullback of the round metric has round volume") {
    Vec xi(3);
    xi << 0.3, -0.1, 0.4;
    const ConformalMetric m = ConformalMetric::pullback_of_round(BallPoint(xi));
    CHECK(metric_measure(m, grid(Dimension(2), 60)).mass() == doctest::Approx(4 * std::acos(-1.0)).epsilon(1e-10));
    const Vec x = unit_vector(3, 2);
    CHECK(m.log_factor(x) == doctest::Approx(std::log(conformal_factor(xi, x))).epsilon(1e-13));
  }

  TEST_CASE("random metrics are reproducible per seed") {
    const ConformalMetric a = ConformalMetric::random(Dimension(2), 11);
    const ConformalMetric b = ConformalMetric::random(Dimension(2), 11);
    const ConformalMetric c = ConformalMetric::random(Dimension(2), 12);
    CHECK((a.coeffs() - b.coeffs()).norm() == 0.0);
    CHECK((a.coeffs() - c.coeffs()).norm() > 0.0);
    CHECK(a.coeffs().cwiseAbs().maxCoeff() <= 0.3);
    CHECK(a.coeffs().size() == 16);
  }

  TEST_CASE("measure CSV round trip") {
    const DiscreteMeasure nu = metric_measure(ConformalMetric::random(Dimension(2), 2), grid(Dimension(2), 6));
    std::stringstream ss;
    write_measure_csv(ss, nu);
    const DiscreteMeasure back = read_measure_csv(ss);
    CHECK((back.points() - nu.points()).norm() == 0.0);
    CHECK((back.weights() - nu.weights()).norm() == 0.0);
    std::stringstream bad("x0,x1,x2,weight\n1,0,0,-1\n");
    CHECK_THROWS_AS(read_measure_csv(bad), std::invalid_argument);
  }
}
