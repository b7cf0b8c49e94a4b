#include "confspec/kernels.hpp"
#include "confspec/quadrature.hpp"

#include <doctest.h>

#include <random>

using namespace confspec;

namespace {

struct Cloud {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;
};

Cloud random_cloud(int ambient, Eigen::Index count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  Cloud c{Eigen::MatrixXd(ambient, count), Eigen::VectorXd(count)};
  for (Eigen::Index i = 0; i < count; ++i) {
    for (int k = 0; k < ambient; ++k) c.points(k, i) = normal(rng);
    c.points.col(i).normalize();
    c.weights(i) = unif(rng);
  }
  return c;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("parallel moment matches serial reference") {
    for (int ambient : {3, 4}) {
      const Cloud c = random_cloud(ambient, 20011, 3u + static_cast<unsigned>(ambient));
      Vec xi = Vec::Zero(ambient);
      xi(0) = 0.4;
      xi(ambient - 1) = -0.3;
      const Vec a = kernels::serial::moment(c.points, c.weights, xi);
      const Vec b = kernels::parallel::moment(c.points, c.weights, xi);
      CHECK((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
      CHECK((kernels::moment(c.points, c.weights, xi) - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }
  }

  TEST_CASE("parallel second moment matches serial reference") {
    const Cloud c = random_cloud(3, 15000, 11u);
    const Mat a = kernels::serial::second_moment(c.points, c.weights);
    const Mat b = kernels::parallel::second_moment(c.points, c.weights);
    CHECK((a - b).norm() <= 1e-12 * a.norm());
    CHECK(a.trace() == doctest::Approx(c.weights.sum()).epsilon(1e-12));
  }

  TEST_CASE("parallel weighted gram matches serial reference") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd phi(9000, 40);
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi.data()[i] = normal(rng);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(9000, 0.5);
    const Eigen::MatrixXd a = kernels::serial::weighted_gram(phi, w);
    const Eigen::MatrixXd b = kernels::parallel::weighted_gram(phi, w);
    CHECK((a - b).norm() <= 1e-12 * a.norm());
    CHECK((a - a.transpose()).norm() == 0.0);
  }

  TEST_CASE("parallel results do not depend on repeated evaluation") {
    const Cloud c = random_cloud(3, 30000, 23u);
    const Vec xi = Vec::Zero(3);
    const Vec a = kernels::parallel::moment(c.points, c.weights, xi);
    for (int rep = 0; rep < 3; ++rep) CHECK((kernels::parallel::moment(c.points, c.weights, xi) - a).norm() == 0.0);
  }

  TEST_CASE("map_columns evaluates every column") {
    const QuadratureGrid g = grid(Dimension(2), 30);
    Eigen::VectorXd out(g.size());
    kernels::map_columns(g.nodes, out, [](const Vec& x) { return x(0) * x(0); });
    for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(out(i) == g.nodes(0, i) * g.nodes(0, i));
    CHECK(kernels::max_threads() >= 1);
  }
}
