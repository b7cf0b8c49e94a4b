#include "confspec/moebius.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace confspec;

namespace {

Vec random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> normal;
  Vec v(d);
  for (int k = 0; k < d; ++k) v(k) = normal(rng);
  return v.normalized();
}

Vec random_ball(std::mt19937_64& rng, int d, double max_norm) {
  std::uniform_real_distribution<double> unif(0.0, max_norm);
  return unif(rng) * random_unit(rng, d);
}

}  // namespace

TEST_SUITE("moebius") {
  TEST_CASE("d_xi maps the sphere to itself and sends 0 to xi") {
    std::mt19937_64 rng(1);
    for (int d : {3, 4, 5}) {
      for (int t = 0; t < 50; ++t) {
        const Vec xi = random_ball(rng, d, 0.95);
        const Vec x = random_unit(rng, d);
        CHECK(std::abs(moebius_apply(xi, x).norm() - 1.0) < 1e-14);
        CHECK((moebius_apply(xi, Vec(Vec::Zero(d))) - xi).norm() < 1e-14);
      }
    }
  }

  TEST_CASE("d_{-xi} inverts d_xi on the closed ball") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 100; ++t) {
      const Vec xi = random_ball(rng, 3, 0.9);
      const Vec x = random_ball(rng, 3, 1.0);
      CHECK((moebius_apply(Vec(-xi), moebius_apply(xi, x)) - x).norm() < 1e-12);
    }
  }

  TEST_CASE("d_xi fixes the points +-xi/|xi| of the sphere") {
    Vec xi(3);
    xi << 0.3, -0.2, 0.5;
    const Vec u = xi.normalized();
    CHECK((moebius_apply(xi, u) - u).norm() < 1e-14);
    CHECK((moebius_apply(xi, Vec(-u)) + u).norm() < 1e-14);
  }

  TEST_CASE("Jacobian matches central differences") {
    std::mt19937_64 rng(3);
    const double h = 1e-6;
    for (int t = 0; t < 20; ++t) {
      const Vec xi = random_ball(rng, 4, 0.8);
      const Vec x = random_ball(rng, 4, 0.9);
      const Mat j = moebius_jacobian(xi, x);
      for (int k = 0; k < 4; ++k) {
        const Vec e = unit_vector(4, k);
        const Vec fd = (moebius_apply(xi, Vec(x + h * e)) - moebius_apply(xi, Vec(x - h * e))) / (2 * h);
        CHECK((j.col(k) - fd).norm() < 1e-7);
      }
    }
  }

  TEST_CASE("d_xi is conformal on the sphere with the stated factor") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
      const Vec xi = random_ball(rng, 3, 0.9);
      const Vec x = random_unit(rng, 3);
      const Vec v = tangent_part(x, random_unit(rng, 3));
      const double lambda = conformal_factor(xi, x);
      CHECK((moebius_jacobian(xi, x) * v).norm() == doctest::Approx(lambda * v.norm()).epsilon(1e-11));
    }
  }

  TEST_CASE("cap reflection is an involution exchanging a and a*") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 40; ++t) {
      const double r = std::uniform_real_distribution<double>(-0.9, 0.9)(rng);
      const Cap a(r, SpherePoint(random_unit(rng, 3)));
      const Vec x = random_unit(rng, 3);
      const Vec y = cap_reflection(a, x);
      CHECK((cap_reflection(a, y) - x).norm() < 1e-11);
      if (std::abs(cap_margin(a, x)) > 1e-6) CHECK(cap_contains(a, SpherePoint(x)) != cap_contains(a, SpherePoint(y)));
      const MoebiusMap composite = MoebiusMap::cap_reflection(a);
      CHECK((composite(x) - y).norm() < 1e-12);
    }
  }

  TEST_CASE("cap reflection fixes the boundary circle") {
    const Vec p = unit_vector(3, 1);
    const Cap a(0.4, SpherePoint(p));
    const double h = a.height();
    Vec x(3);
    x << std::sqrt(1 - h * h), h, 0.0;
    CHECK((cap_reflection(a, x) - x).norm() < 1e-12);
    CHECK(std::abs(cap_margin(a, x)) < 1e-12);
  }

  TEST_CASE("complement and membership") {
    const Cap a(0.3, SpherePoint(unit_vector(3, 0)));
    const Cap b = complement(a);
    CHECK(b.r() == -0.3);
    CHECK((b.p().coords() + a.p().coords()).norm() == 0.0);
    CHECK(cap_contains(a, a.p()));
    CHECK(!cap_contains(a, b.p()));
    CHECK(cap_contains(b, b.p()));
    CHECK_THROWS_AS(Cap(1.0, a.p()), std::invalid_argument);
  }

  TEST_CASE("composite maps: then, inverse and log factors") {
    std::mt19937_64 rng(6);
    Vec xi = random_ball(rng, 3, 0.7);
    const Mat q = reflection_matrix(random_unit(rng, 3)) * reflection_matrix(random_unit(rng, 3));
    const MoebiusMap m = MoebiusMap::moebius(xi).then(MoebiusMap::orthogonal(q)).then(MoebiusMap::reflection(xi.normalized()));
    const MoebiusMap inv = m.inverse();
    for (int t = 0; t < 20; ++t) {
      const Vec x = random_unit(rng, 3);
      CHECK((inv(m(x)) - x).norm() < 1e-12);
      CHECK(m.factor(x) == doctest::Approx(conformal_factor(xi, x)).epsilon(1e-12));
      CHECK(m.log_factor(x) == doctest::Approx(std::log(m.factor(x))).epsilon(1e-12));
      CHECK(m.factor(x) * inv.factor(m(x)) == doctest::Approx(1.0).epsilon(1e-11));
    }
    CHECK(MoebiusMap::identity(3).is_identity());
    CHECK(m.step_count() == 3);
  }

  TEST_CASE("frames and canonical axes") {
    std::mt19937_64 rng(7);
    for (int d : {3, 4}) {
      const Vec q = random_unit(rng, d);
      const Mat f = frame_from_axis(q);
      CHECK((f.transpose() * f - Mat::Identity(d, d)).norm() < 1e-13);
      CHECK((f.col(0) - q).norm() < 1e-13);
      const Vec c = canonical_axis(Vec(-q));
      CHECK((c - canonical_axis(q)).norm() < 1e-15);
    }
  }

  TEST_CASE("invalid points are rejected") {
    CHECK_THROWS_AS(SpherePoint(Vec(Vec::Zero(3))), std::invalid_argument);
    CHECK_THROWS_AS(BallPoint(unit_vector(3, 0)), std::invalid_argument);
  }
}
