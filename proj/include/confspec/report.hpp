#pragma once

#include "confspec/bound.hpp"
#include "confspec/constants.hpp"
#include "confspec/metric.hpp"
#include "confspec/spectral.hpp"
#include "confspec/topology.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

namespace confspec {

using Json = nlohmann::ordered_json;

Json to_json(const BoundConstants& c);
Json to_json(const RayleighCoefficients& c);
Json to_json(const BoundCertificate& c);
Json to_json(const SpectrumReport& s, int k_max);
Json to_json(const DegreeReport& d);
Json to_json(const Claim3Report& c);
Json to_json(const RenormalizationPoint& p);

/// Metric file: {"n", "L_w", "coeffs"} or {"n", "pullback": [xi]}; optional
/// "log_scale" and, with coefficients, an optional "pullback" applied on top.
ConformalMetric metric_from_json(const Json& j);
/// Coefficient metrics only (no Moebius chain).
Json metric_to_json(const ConformalMetric& g);

/// Header n,sigma_n,k_n,theorem_bound,conjecture_bound.
void write_constants_csv(std::ostream& out, const std::vector<BoundConstants>& rows);

/// One row per sample: r, s_*, gap, value, xi_*, inserted and, when given,
/// the cap/complement residuals of the pair (a, a*). A final row with status
/// "multiple" marks where a multiplicity stopped the path.
void write_lift_path_csv(std::ostream& out, const LiftPath& path, const std::vector<Claim1Report>* claim1 = nullptr,
                         std::optional<double> multiple_r = std::nullopt);

/// Header p0..pn,f0..fn.
void write_map_samples_csv(std::ostream& out, const Eigen::MatrixXd& points, const Eigen::MatrixXd& values);
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> read_map_samples_csv(std::istream& in);

}  // namespace confspec
