#include "confspec/topology.hpp"

#include <doctest.h>

#include <cmath>

using namespace confspec;

namespace {

// (theta, phi) -> (theta, 2 phi) about the x0 axis.
SampledMap double_winding() {
  return SampledMap(2, "double winding", [](const Vec& x) {
    const double rho = std::hypot(x(1), x(2));
    Vec y(3);
    if (rho < 1e-300) {
      y << x(0), 0.0, 0.0;
      return Vec(y.normalized());
    }
    y << x(0), (x(1) * x(1) - x(2) * x(2)) / rho, 2.0 * x(1) * x(2) / rho;
    return y;
  });
}

}  // namespace

TEST_SUITE("topology") {
  TEST_CASE("identity and antipodal degrees") {
    for (int n : {2, 3}) {
      CAPTURE(n);
      const DegreeReport id = degree(SampledMap::identity(n));
      CHECK(id.degree == 1);
      CHECK(id.rounding_gap < 1e-6);
      const DegreeReport an = degree(SampledMap::antipodal(n));
      CHECK(an.degree == (n % 2 == 0 ? -1 : 1));
      CHECK(an.cross_check == an.degree);
    }
  }

  TEST_CASE("orthogonal maps have degree det Q") {
    Mat q = Mat::Identity(3, 3);
    q(2, 2) = -1.0;
    CHECK(degree(SampledMap::orthogonal(q)).degree == -1);
    Mat rot(3, 3);
    rot << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    CHECK(degree(SampledMap::orthogonal(rot)).degree == 1);
  }

  TEST_CASE("even degree is detected") {
    const DegreeReport d = degree(double_winding());
    CHECK(d.degree == 2);
    CHECK(d.cross_check == 2);
  }

  TEST_CASE("equivariant corpus satisfies the parity statement") {
    for (int n : {2, 3}) {
      for (const SampledMap& f : equivariant_sample_maps(n)) {
        CAPTURE(n);
        CAPTURE(f.name());
        const Claim3Report rep = claim3_verify(f);
        CHECK(rep.equivariant);
        CHECK(rep.holds);
        CHECK(rep.degree.rounding_gap < 0.05);
        CHECK(rep.degree.cross_check == rep.degree.degree);
      }
    }
  }

  TEST_CASE("precomposition by a reflection flips the degree") {
    const Mat r = reflection_matrix(unit_vector(3, 1));
    for (const SampledMap& f : equivariant_sample_maps(2)) {
      CAPTURE(f.name());
      CHECK(degree(f.precompose(r)).degree == -degree(f).degree);
    }
  }

  TEST_CASE("degree is constant along a homotopy") {
    const std::vector<SampledMap> corpus = equivariant_sample_maps(2);
    const SampledMap& g = corpus[2];
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) CHECK(degree(SampledMap::blend(SampledMap::identity(2), g, t)).degree == 1);
  }

  TEST_CASE("interpolated samples keep the degree") {
    const QuadratureGrid g = sphere_grid(2, 16);
    const SampledMap f = SampledMap::identity(2);
    Eigen::MatrixXd vals(3, g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) vals.col(i) = f(g.nodes.col(i));
    const SampledMap fi = SampledMap::interpolate(g.nodes, vals, lift_map_bandwidth(0.2));
    CHECK(degree(fi).degree == 1);
  }

  TEST_CASE("discontinuous map has non-integer degree") {
    const SampledMap f(2, "half", [](const Vec& x) { return x(0) >= 0.0 ? x : unit_vector(3, 0); }, false);
    CHECK_THROWS_AS(degree(f), NonIntegerDegree);
  }

  TEST_CASE("non-equivariant map fails the gate") {
    CHECK(!claim3_verify(double_winding()).equivariant);
  }

  TEST_CASE("outputs off the sphere are rejected") {
    const SampledMap f(2, "bad", [](const Vec& x) { return Vec(2.0 * x); });
    CHECK_THROWS_AS(f(unit_vector(3, 0)), NumericalError);
  }
}
