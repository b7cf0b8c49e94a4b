#include "confspec/report.hpp"

#include <doctest.h>

#include <sstream>

using namespace confspec;

TEST_SUITE("report") {
  TEST_CASE("metric JSON round trip") {
    const ConformalMetric g = ConformalMetric::random(Dimension(3), 8, 2, 0.2);
    const Json j = metric_to_json(g);
    const ConformalMetric back = metric_from_json(Json::parse(j.dump()));
    CHECK(back.n() == 3);
    CHECK(back.lw() == 2);
    CHECK((back.coeffs() - g.coeffs()).norm() == 0.0);
    const Vec x = unit_vector(4, 1);
    CHECK(back.log_factor(x) == g.log_factor(x));
  }

  TEST_CASE("metric JSON validation") {
    CHECK_THROWS(metric_from_json(Json::parse(R"({"n": 5, "L_w": 1, "coeffs": [0,0,0,0,0,0,0]})")));
    CHECK_THROWS(metric_from_json(Json::parse(R"({"n": 2, "L_w": 1, "coeffs": [0,0]})")));
    CHECK_THROWS(metric_from_json(Json::parse(R"({"n": 2, "pullback": [0.5, 0.6, 0.7]})")));
    const ConformalMetric p = metric_from_json(Json::parse(R"({"n": 2, "pullback": [0.1, 0.0, 0.2]})"));
    CHECK(p.n() == 2);
  }

  TEST_CASE("constants CSV") {
    std::ostringstream out;
    write_constants_csv(out, {bound_constants(Dimension(2)), bound_constants(Dimension(3))});
    const std::string s = out.str();
    CHECK(s.rfind("n,sigma_n,k_n,theorem_bound,conjecture_bound\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 3);
  }

  TEST_CASE("map samples CSV round trip") {
    const QuadratureGrid g = sphere_grid(2, 4);
    std::stringstream ss;
    write_map_samples_csv(ss, g.nodes, -g.nodes);
    const auto [pts, vals] = read_map_samples_csv(ss);
    CHECK((pts - g.nodes).norm() == 0.0);
    CHECK((vals + g.nodes).norm() == 0.0);
  }

  TEST_CASE("lift path CSV marks multiplicity") {
    LiftPath path;
    path.p = unit_vector(3, 0);
    LiftSample s;
    s.r = -0.5;
    s.s = -unit_vector(3, 0);
    s.xi = Vec::Zero(3);
    path.samples.push_back(s);
    std::ostringstream out;
    write_lift_path_csv(out, path, nullptr, 0.1);
    const std::string text = out.str();
    CHECK(text.find("ok,-0.5") != std::string::npos);
    CHECK(text.find("multiple,0.1") != std::string::npos);
  }

  TEST_CASE("certificate JSON is deterministic") {
    const ConformalMetric g = ConformalMetric::random(Dimension(2), 5);
    BoundOptions o;
    o.compute_spectrum = false;
    const Json a = to_json(certify(g, o));
    const Json b = to_json(certify(g, o));
    CHECK(a.dump() == b.dump());
    CHECK(a.contains("branch"));
    CHECK(a.contains("minmax_value"));
  }

  TEST_CASE("degree report JSON") {
    const Json j = to_json(degree(SampledMap::identity(2)));
    CHECK(j.at("degree").get<int>() == 1);
    CHECK(j.at("method").get<std::string>() == "jacobian-integral");
  }
}
