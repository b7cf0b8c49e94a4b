#include "confspec/report.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace confspec {

namespace {

Json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json mat_json(const Mat& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

Vec vec_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty() || j.size() > static_cast<std::size_t>(kMaxAmbient))
    throw std::invalid_argument(std::string("metric file: ") + what + " must be a short array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

std::ostream& full(std::ostream& out) { return out << std::setprecision(17); }

}  // namespace

Json to_json(const BoundConstants& c) {
  return Json{{"n", c.n},
              {"sigma_n", c.sigma_n},
              {"k_n", c.k_n},
              {"theorem_bound", c.theorem_bound},
              {"conjecture_bound", c.conjecture_bound}};
}

Json to_json(const RayleighCoefficients& c) {
  return Json{{"r", c.r},
              {"sigma", c.sigma},
              {"tau", c.tau},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"I", c.i},
              {"J", c.j},
              {"balance", c.balance()},
              {"psi_mean", c.psi_mean},
              {"psi_dirichlet", c.psi_dirichlet},
              {"psi_grad_n", c.psi_grad_n},
              {"volume", c.volume}};
}

Json to_json(const BoundCertificate& c) {
  Json j;
  j["branch"] = to_string(c.branch);
  j["n"] = c.n;
  j["passed"] = c.passed;
  j["r_star"] = c.r_star ? Json(*c.r_star) : Json(nullptr);
  j["coefficients"] = c.coefficients ? to_json(*c.coefficients) : Json(nullptr);
  j["sup_q"] = c.sup_q;
  j["minmax_value"] = c.minmax_value;
  j["theorem_bound"] = c.theorem_bound;
  j["conjecture_bound"] = c.conjecture_bound;
  j["margin_theorem"] = c.theorem_bound - c.minmax_value;
  j["margin_conjecture"] = c.conjecture_bound - c.minmax_value;
  j["solver_invariant"] = c.solver_invariant ? Json(*c.solver_invariant) : Json(nullptr);
  j["multiple_cap_r"] = c.multiple_cap_r ? Json(*c.multiple_cap_r) : Json(nullptr);
  if (c.branch == Branch::BalancedCap) {
    j["balance_at_scan_min"] = c.balance_at_scan_min;
    j["balance_at_scan_max"] = c.balance_at_scan_max;
  }
  Json scan = Json::array();
  for (const ScanPoint& p : c.scan) scan.push_back(Json{{"r", p.r}, {"balance", p.balance}, {"gap", p.gap}, {"inserted", p.inserted}});
  j["scan"] = scan;
  Json bis = Json::array();
  for (const auto& [r, b] : c.bisection) bis.push_back(Json{{"r", r}, {"balance", b}});
  j["bisection"] = bis;
  j["normalization"] = Json{{"original_volume", c.original_volume},
                            {"log_scale", c.log_scale},
                            {"xi", vec_json(c.normalization_xi)},
                            {"rotation", mat_json(c.rotation)}};
  j["settings"] = Json{{"grid_order", c.grid_order},
                       {"normalize_grid_order", c.normalize_grid_order},
                       {"basis_degree", c.basis_degree},
                       {"root_tol", c.root_tol},
                       {"multiplicity_tol", c.multiplicity_tol}};
  return j;
}

Json to_json(const SpectrumReport& s, int k_max) {
  Json inv = Json::array();
  for (int k = 0; k <= k_max && k < static_cast<int>(s.eigenvalues.size()); ++k) inv.push_back(s.invariant(k));
  return Json{{"n", s.n},
              {"basis_degree", s.basis_degree},
              {"grid_order", s.grid_order},
              {"volume", s.volume},
              {"eigenvalues", s.eigenvalues},
              {"invariants", inv}};
}

Json to_json(const DegreeReport& d) {
  Json j{{"degree", d.degree},
         {"raw_integral", d.raw_integral},
         {"rounding_gap", d.rounding_gap},
         {"method", to_string(d.method)},
         {"grid_order", d.grid_order}};
  j["preimage_degree"] = d.cross_check ? Json(*d.cross_check) : Json(nullptr);
  j["preimages"] = d.preimages;
  return j;
}

Json to_json(const Claim3Report& c) {
  return Json{{"equivariance_residual", c.residual},
              {"equivariant", c.equivariant},
              {"degree", to_json(c.degree)},
              {"holds", c.holds}};
}

Json to_json(const RenormalizationPoint& p) {
  return Json{{"xi", vec_json(p.xi.coords())}, {"residual", p.residual}, {"iterations", p.iterations}};
}

ConformalMetric metric_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n")) throw std::invalid_argument("metric file: missing \"n\"");
  const Dimension n(j.at("n").get<int>());
  if (n.value() > 3) throw std::invalid_argument("metric file: n must be 2 or 3");
  ConformalMetric g = ConformalMetric::round(n);
  if (j.contains("coeffs")) {
    if (!j.contains("L_w")) throw std::invalid_argument("metric file: \"coeffs\" needs \"L_w\"");
    const auto& arr = j.at("coeffs");
    if (!arr.is_array()) throw std::invalid_argument("metric file: \"coeffs\" must be an array");
    Eigen::VectorXd c(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) c(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    g = ConformalMetric::from_coefficients(n, j.at("L_w").get<int>(), std::move(c));
  }
  if (j.contains("pullback")) {
    const Vec xi = vec_from_json(j.at("pullback"), "\"pullback\"");
    if (xi.size() != n.ambient()) throw std::invalid_argument("metric file: \"pullback\" has the wrong length");
    g = g.pulled_back(MoebiusMap::moebius(BallPoint(xi).coords()));
  }
  if (j.contains("log_scale")) g = g.scaled(j.at("log_scale").get<double>());
  return g;
}

Json metric_to_json(const ConformalMetric& g) {
  if (!g.chain().is_identity()) throw std::invalid_argument("metric_to_json: Moebius chains are not serializable");
  Json j{{"n", g.n()}, {"L_w", g.lw()}, {"coeffs", vec_json(g.coeffs())}};
  if (g.log_scale() != 0.0) j["log_scale"] = g.log_scale();
  return j;
}

void write_constants_csv(std::ostream& out, const std::vector<BoundConstants>& rows) {
  full(out) << "n,sigma_n,k_n,theorem_bound,conjecture_bound\n";
  for (const BoundConstants& c : rows)
    out << c.n << ',' << c.sigma_n << ',' << c.k_n << ',' << c.theorem_bound << ',' << c.conjecture_bound << '\n';
}

void write_lift_path_csv(std::ostream& out, const LiftPath& path, const std::vector<Claim1Report>* claim1,
                         std::optional<double> multiple_r) {
  const int d = static_cast<int>(path.p.size());
  full(out) << "status,r";
  for (int k = 0; k < d; ++k) out << ",s" << k;
  out << ",gap,value";
  for (int k = 0; k < d; ++k) out << ",xi" << k;
  out << ",inserted";
  if (claim1) out << ",claim1_xi,claim1_direction";
  out << '\n';
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    const LiftSample& s = path.samples[i];
    out << "ok," << s.r;
    for (int k = 0; k < d; ++k) out << ',' << s.s(k);
    out << ',' << s.gap << ',' << s.value;
    for (int k = 0; k < d; ++k) out << ',' << s.xi(k);
    out << ',' << (s.inserted ? 1 : 0);
    if (claim1) {
      if (i < claim1->size())
        out << ',' << (*claim1)[i].xi_residual << ',' << (*claim1)[i].direction_residual;
      else
        out << ",,";
    }
    out << '\n';
  }
  if (multiple_r) {
    out << "multiple," << *multiple_r;
    const int empty = d + 2 + d + 1 + (claim1 ? 2 : 0);
    for (int k = 0; k < empty; ++k) out << ',';
    out << '\n';
  }
}

void write_map_samples_csv(std::ostream& out, const Eigen::MatrixXd& points, const Eigen::MatrixXd& values) {
  const Eigen::Index d = points.rows();
  full(out);
  for (Eigen::Index k = 0; k < d; ++k) out << (k ? "," : "") << 'p' << k;
  for (Eigen::Index k = 0; k < d; ++k) out << ",f" << k;
  out << '\n';
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) out << (k ? "," : "") << points(k, i);
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << values(k, i);
    out << '\n';
  }
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> read_map_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("map samples: empty input");
  const auto columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns % 2 != 0 || line.rfind("p0", 0) != 0) throw std::invalid_argument("map samples: bad header");
  const int d = columns / 2;
  std::vector<double> vals;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    int c = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("map samples: bad number on row " + std::to_string(rows + 1));
      }
      ++c;
    }
    if (c != columns) throw std::invalid_argument("map samples: wrong column count on row " + std::to_string(rows + 1));
    ++rows;
  }
  Eigen::MatrixXd p(d, rows), f(d, rows);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < d; ++k) {
      p(k, i) = vals[static_cast<std::size_t>(i * columns + k)];
      f(k, i) = vals[static_cast<std::size_t>(i * columns + d + k)];
    }
  return {p, f};
}

}  // namespace confspec
