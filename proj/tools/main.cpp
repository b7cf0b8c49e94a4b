#include "confspec/bound.hpp"
#include "confspec/constants.hpp"
#include "confspec/measure.hpp"
#include "confspec/report.hpp"
#include "confspec/spectral.hpp"
#include "confspec/topology.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace confspec;

namespace {

constexpr int kUsage = 2;
constexpr int kNumerical = 3;
constexpr double kSampledEquivarianceGate = 0.05;

struct MetricSource {
  int n = 2;
  std::uint64_t seed = 7;
  int count = 1;
  int degree = 3;
  double amplitude = 0.3;
  bool round = false;
  std::vector<std::string> files;
};

struct Settings {
  MetricSource source;
  int grid_order = 0;
  int basis_l = 0;
  double tol = 1e-8;
  std::string out;
  std::string config;
};

// Values from the JSON config fill every option not given on the command line.
void apply_config(const Settings& flags, Settings& s, const CLI::App& cmd) {
  if (flags.config.empty()) return;
  std::ifstream in(flags.config);
  if (!in) throw std::invalid_argument("cannot open config " + flags.config);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  auto given = [&](const char* opt) { return cmd.get_option_no_throw(opt) && cmd.count(opt) > 0; };
  auto take = [&](const char* key, const char* opt, auto& field) {
    if (j.contains(key) && !given(opt)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("n", "--n", s.source.n);
  take("seed", "--seed", s.source.seed);
  take("count", "--count", s.source.count);
  take("degree", "--degree", s.source.degree);
  take("amplitude", "--amplitude", s.source.amplitude);
  take("round", "--round", s.source.round);
  take("metrics", "--metric", s.source.files);
  take("grid_order", "--grid-order", s.grid_order);
  take("basis_L", "--basis-L", s.basis_l);
  take("tol", "--tol", s.tol);
  take("out", "--out", s.out);
}

void validate(const Settings& s) {
  if (s.source.n != 2 && s.source.n != 3) throw std::invalid_argument("--n must be 2 or 3");
  if (!(s.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
  if (s.source.count < 1) throw std::invalid_argument("--count must be >= 1");
  if (s.source.degree < 1) throw std::invalid_argument("--degree must be >= 1");
  if (!(s.source.amplitude >= 0.0)) throw std::invalid_argument("--amplitude must be >= 0");
  if (s.grid_order < 0 || s.basis_l < 0) throw std::invalid_argument("orders must be >= 0");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

struct NamedMetric {
  std::string label;
  ConformalMetric metric;
};

std::vector<NamedMetric> load_metrics(const MetricSource& src) {
  std::vector<NamedMetric> out;
  if (!src.files.empty()) {
    for (const std::string& f : src.files) out.push_back({f, metric_from_json(read_json_file(f))});
    return out;
  }
  if (src.round) {
    out.push_back({"round", ConformalMetric::round(Dimension(src.n))});
    return out;
  }
  for (int k = 0; k < src.count; ++k) {
    const std::uint64_t seed = src.seed + static_cast<std::uint64_t>(k);
    out.push_back({"seed=" + std::to_string(seed),
                   ConformalMetric::random(Dimension(src.n), seed, src.degree, src.amplitude)});
  }
  return out;
}

void add_metric_options(CLI::App* cmd, Settings& s, bool multiple) {
  cmd->add_option("--n", s.source.n, "sphere dimension (2 or 3)");
  cmd->add_option("--seed", s.source.seed, "seed of the first random metric");
  if (multiple) cmd->add_option("--count", s.source.count, "number of random metrics");
  cmd->add_option("--degree", s.source.degree, "harmonic degree of random conformal factors");
  cmd->add_option("--amplitude", s.source.amplitude, "coefficient amplitude of random conformal factors");
  cmd->add_flag("--round", s.source.round, "use the round metric");
  cmd->add_option("--metric", s.source.files, "metric JSON file(s)");
  cmd->add_option("--config", s.config, "JSON config; flags override it");
}

std::ostream& output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  file.open(path);
  if (!file) throw std::invalid_argument("cannot write " + path);
  return file;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int n = std::stoi(text);
      return {n, n};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw std::invalid_argument("bad range '" + text + "' (expected N or A..B)");
  }
}

Vec parse_vector(const std::string& text, int d) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      vals.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad vector '" + text + "'");
    }
  }
  if (static_cast<int>(vals.size()) != d)
    throw std::invalid_argument("vector '" + text + "' must have " + std::to_string(d) + " entries");
  Vec v(d);
  for (int k = 0; k < d; ++k) v(k) = vals[static_cast<std::size_t>(k)];
  if (!(v.norm() > 0.0)) throw std::invalid_argument("vector must be nonzero");
  return v;
}

BoundOptions bound_options(const Settings& s) {
  BoundOptions o;
  o.grid_order = s.grid_order;
  o.basis_degree = s.basis_l;
  o.root_tol = s.tol;
  return o;
}

int cmd_constants(const std::string& range, const std::string& out_path) {
  const auto [lo, hi] = parse_range(range);
  if (lo < 2 || hi < lo) throw std::invalid_argument("--n range must satisfy 2 <= A <= B");
  std::vector<BoundConstants> rows;
  for (int n = lo; n <= hi; ++n) rows.push_back(bound_constants(Dimension(n)));
  std::ofstream file;
  write_constants_csv(output(out_path, file), rows);
  return 0;
}

std::string optional_cell(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream ss;
  ss << std::setprecision(17) << *v;
  return ss.str();
}

int cmd_certify(const Settings& s, bool spectrum_check) {
  const std::vector<NamedMetric> metrics = load_metrics(s.source);
  const fs::path dir = s.out.empty() ? fs::path("certify_out") : fs::path(s.out);
  fs::create_directories(dir);
  BoundOptions opts = bound_options(s);
  opts.compute_spectrum = spectrum_check;

  std::ofstream summary(dir / "summary.csv");
  summary << std::setprecision(17)
          << "index,metric,status,branch,passed,minmax_value,solver_invariant,theorem_bound,margin_theorem,"
             "margin_conjecture,r_star\n";
  bool all_passed = true;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const NamedMetric& m = metrics[i];
    std::ostringstream name;
    name << "certificate_" << std::setw(3) << std::setfill('0') << i << ".json";
    Json record;
    record["metric"] = m.label;
    try {
      const BoundCertificate c = certify(m.metric, opts);
      record["certificate"] = to_json(c);
      summary << i << ',' << m.label << ",ok," << to_string(c.branch) << ',' << (c.passed ? 1 : 0) << ','
              << c.minmax_value << ',' << optional_cell(c.solver_invariant) << ','
              << c.theorem_bound << ',' << c.theorem_bound - c.minmax_value << ','
              << c.conjecture_bound - c.minmax_value << ',' << optional_cell(c.r_star) << '\n';
      all_passed = all_passed && c.passed;
      std::cerr << m.label << ": " << to_string(c.branch) << (c.passed ? " passed" : " FAILED") << '\n';
    } catch (const CertificationError& e) {
      record["error"] = e.what();
      record["partial"] = to_json(e.partial());
      summary << i << ',' << m.label << ",error,,0,,,,,,\n";
      all_passed = false;
      std::cerr << m.label << ": error: " << e.what() << '\n';
    }
    std::ofstream(dir / name.str()) << record.dump(2) << '\n';
  }
  return all_passed ? 0 : kNumerical;
}

// Rays of a map sampling that hit a multiple cap are listed next to the samples.
std::string multiplicity_file(const std::string& samples) {
  return fs::path(samples).replace_extension(".multiple.csv").string();
}

int cmd_lift_scan(const Settings& s, const std::string& p_text, double r_min, double r_max, int steps, bool claim1,
                  int map_order) {
  const std::vector<NamedMetric> metrics = load_metrics(s.source);
  if (metrics.size() != 1) throw std::invalid_argument("lift-scan takes a single metric");
  if (!(r_min < r_max) || r_min <= -1.0 || r_max >= 1.0 || steps < 1)
    throw std::invalid_argument("need -1 < r-min < r-max < 1 and steps >= 1");
  const int n = metrics[0].metric.n();
  const Vec p = p_text.empty() ? Vec(unit_vector(n + 1, 0)) : parse_vector(p_text, n + 1);

  const BoundOptions opts = bound_options(s);
  const NormalizedMetric ng = normalize(metrics[0].metric, opts.normalize);
  const CapEvaluator ev(ng, opts);
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) grid[static_cast<std::size_t>(i)] = r_min + (r_max - r_min) * i / steps;
  LiftOptions lo;
  lo.family = opts.family;

  LiftPath path;
  std::optional<double> multiple_r;
  try {
    path = lift_path(ev.factory(), SpherePoint(p), grid, lo);
  } catch (const MultiplicityEncountered& e) {
    path = e.partial();
    multiple_r = e.r();
  }
  std::vector<Claim1Report> residuals;
  if (claim1) {
    for (const LiftSample& smp : path.samples) {
      const Cap a(smp.r, SpherePoint(p));
      residuals.push_back(claim1_check(ev.measure(a), a, opts.family));
    }
  }
  const fs::path dir = s.out.empty() ? fs::path("lift_scan_out") : fs::path(s.out);
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "lift_path.csv");
    write_lift_path_csv(csv, path, claim1 ? &residuals : nullptr, multiple_r);
  }
  if (multiple_r) std::cerr << "multiplicity encountered at r = " << *multiple_r << '\n';

  if (map_order > 0) {
    const QuadratureGrid pts = sphere_grid(n, map_order);
    const LiftMapSamples samples = sample_lift_map(ev.factory(), pts.nodes, lo);
    std::ofstream csv(dir / "map_samples.csv");
    write_map_samples_csv(csv, samples.points, samples.values);
    std::cerr << samples.points.cols() << " map samples written";
    if (!samples.complete()) {
      std::ofstream notes(dir / multiplicity_file("map_samples.csv"));
      notes << std::setprecision(17);
      for (int k = 0; k <= n; ++k) notes << 'p' << k << ',';
      notes << "r\n";
      for (std::size_t i = 0; i < samples.multiple_at.size(); ++i) {
        for (int k = 0; k <= n; ++k) notes << samples.multiple_at[i](k) << ',';
        notes << samples.multiple_r[i] << '\n';
      }
      std::cerr << "; " << samples.multiple_at.size() << " rays hit multiplicity";
    }
    std::cerr << '\n';
  }
  return 0;
}

double median_spacing(const Eigen::MatrixXd& pts) {
  std::vector<double> nearest;
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    double best = 4.0;
    for (Eigen::Index j = 0; j < pts.cols(); ++j)
      if (j != i) best = std::min(best, std::acos(std::clamp(pts.col(i).dot(pts.col(j)), -1.0, 1.0)));
    nearest.push_back(best);
  }
  std::nth_element(nearest.begin(), nearest.begin() + nearest.size() / 2, nearest.end());
  return nearest[nearest.size() / 2];
}

int cmd_degree(int n, const std::string& builtin, const std::string& from_lift, int grid_order, double bandwidth,
               const std::string& out_path) {
  if (builtin.empty() == from_lift.empty()) throw std::invalid_argument("give exactly one of --builtin, --from-lift");
  std::optional<SampledMap> map;
  Json extra;
  if (!builtin.empty()) {
    if (n != 2 && n != 3) throw std::invalid_argument("--n must be 2 or 3");
    if (builtin == "identity") {
      map = SampledMap::identity(n);
    } else if (builtin == "antipodal") {
      map = SampledMap::antipodal(n);
    } else if (builtin.rfind("corpus:", 0) == 0) {
      const std::vector<SampledMap> corpus = equivariant_sample_maps(n);
      std::size_t k = 0;
      try {
        k = std::stoul(builtin.substr(7));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad corpus index in '" + builtin + "'");
      }
      if (k >= corpus.size())
        throw std::invalid_argument("corpus index out of range (size " + std::to_string(corpus.size()) + ")");
      map = corpus[k];
    } else {
      throw std::invalid_argument("unknown builtin map '" + builtin + "' (identity, antipodal, corpus:K)");
    }
  } else {
    std::ifstream in(from_lift);
    if (!in) throw std::invalid_argument("cannot open " + from_lift);
    const auto [pts, vals] = read_map_samples_csv(in);
    if (pts.cols() < 4) throw std::invalid_argument(from_lift + ": too few samples");
    const double h = bandwidth > 0.0 ? bandwidth : lift_map_bandwidth(median_spacing(pts));
    map = SampledMap::interpolate(pts, vals, h, from_lift);
    extra["samples"] = pts.cols();
    extra["bandwidth"] = h;
    std::ifstream notes(multiplicity_file(from_lift));
    std::string line;
    int rays = -1;
    while (notes && std::getline(notes, line)) ++rays;
    if (rays > 0) extra["multiplicity_note"] = std::to_string(rays) + " rays hit a multiple cap and are missing";
  }
  DegreeOptions opts;
  opts.grid_order = grid_order;
  const double residual = equivariance_residual(*map);
  Json j;
  j["map"] = map->name();
  j["n"] = map->n();
  for (auto& [k, v] : extra.items()) j[k] = v;
  j["equivariance_residual"] = residual;
  try {
    const DegreeReport rep = degree(*map, opts);
    j["report"] = to_json(rep);
    j["parity_ok"] = map->n() % 2 == 0 ? rep.degree % 2 != 0 : rep.degree == 1;
    if (!from_lift.empty() && residual > kSampledEquivarianceGate)
      j["equivariance_note"] = "samples violate f(-p) = R_p f(p); parity is not implied";
  } catch (const NonIntegerDegree& e) {
    j["error"] = e.what();
    j["raw_integral"] = e.raw();
    std::ofstream file;
    output(out_path, file) << j.dump(2) << '\n';
    return kNumerical;
  }
  std::ofstream file;
  output(out_path, file) << j.dump(2) << '\n';
  return 0;
}

int cmd_renormalize(const Settings& s, const std::string& measure_path, int grid_order) {
  HerschOptions ho;
  ho.tolerance = s.tol;
  Json j;
  if (!measure_path.empty()) {
    std::ifstream in(measure_path);
    if (!in) throw std::invalid_argument("cannot open " + measure_path);
    const DiscreteMeasure nu = read_measure_csv(in);
    j["source"] = measure_path;
    j["atoms"] = nu.size();
    j["renormalization"] = to_json(hersch_renormalize(nu, ho));
  } else {
    const std::vector<NamedMetric> metrics = load_metrics(s.source);
    if (metrics.size() != 1) throw std::invalid_argument("renormalize takes a single metric");
    const DiscreteMeasure dv = metric_measure(metrics[0].metric, sphere_grid(metrics[0].metric.n(), grid_order));
    j["source"] = metrics[0].label;
    j["grid_order"] = grid_order;
    j["volume"] = dv.mass();
    j["renormalization"] = to_json(hersch_renormalize(dv, ho));
  }
  std::ofstream file;
  output(s.out, file) << j.dump(2) << '\n';
  return 0;
}

int cmd_spectrum(const Settings& s, int k_max) {
  const std::vector<NamedMetric> metrics = load_metrics(s.source);
  if (metrics.size() != 1) throw std::invalid_argument("spectrum takes a single metric");
  const ConformalMetric& g = metrics[0].metric;
  const int l = s.basis_l > 0 ? s.basis_l : default_basis_degree(g.n());
  const SpectrumReport rep = spectrum(g, l, k_max, s.grid_order);
  Json j = to_json(rep, k_max);
  j["metric"] = metrics[0].label;
  std::ofstream file;
  output(s.out, file) << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for the conformal upper bound on lambda_2 of spheres"};
  app.require_subcommand(1);

  std::string range = "2..10";
  std::string const_out;
  auto* constants = app.add_subcommand("constants", "sigma_n, K_n and both bounds as CSV");
  constants->add_option("--n", range, "dimension or range A..B");
  constants->add_option("--out", const_out, "output file (default stdout)");

  Settings cert_flags;
  bool no_spectrum = false;
  auto* cert = app.add_subcommand("certify", "min-max certificates for a campaign of metrics");
  add_metric_options(cert, cert_flags, true);
  cert->add_option("--grid-order", cert_flags.grid_order, "cap-split grid order (0 = default)");
  cert->add_option("--basis-L", cert_flags.basis_l, "Galerkin degree of the solver check (0 = default)");
  cert->add_option("--tol", cert_flags.tol, "balanced-cap root tolerance");
  cert->add_option("--out", cert_flags.out, "output directory");
  cert->add_flag("--no-spectrum", no_spectrum, "skip the Galerkin solver comparison");

  Settings lift_flags;
  std::string p_text;
  double r_min = -0.999, r_max = 0.95;
  int steps = 40, map_order = 0;
  bool claim1 = false;
  auto* lift = app.add_subcommand("lift-scan", "sign-continuous lift of the maximal direction along a ray");
  add_metric_options(lift, lift_flags, false);
  lift->add_option("--p", p_text, "axis of the caps, comma separated (default e1)");
  lift->add_option("--r-min", r_min, "first radius");
  lift->add_option("--r-max", r_max, "last radius");
  lift->add_option("--steps", steps, "number of radius steps");
  lift->add_flag("--claim1", claim1, "add cap/complement residual columns");
  lift->add_option("--map-samples", map_order, "also sample p -> s(0, p) on a grid of this order");
  lift->add_option("--grid-order", lift_flags.grid_order, "cap-split grid order (0 = default)");
  lift->add_option("--tol", lift_flags.tol, "unused; accepted for uniformity");
  lift->add_option("--out", lift_flags.out, "output directory");

  int deg_n = 2, deg_order = 0;
  double bandwidth = 0.0;
  std::string builtin, from_lift, deg_out;
  auto* deg = app.add_subcommand("degree", "Brouwer degree of a sphere map");
  deg->add_option("--n", deg_n, "sphere dimension for builtin maps");
  deg->add_option("--builtin", builtin, "identity, antipodal or corpus:K");
  deg->add_option("--from-lift", from_lift, "map samples CSV (p0..pn,f0..fn)");
  deg->add_option("--grid-order", deg_order, "degree integration grid order (0 = default)");
  deg->add_option("--bandwidth", bandwidth, "interpolation bandwidth in radians (0 = from spacing)");
  deg->add_option("--out", deg_out, "output file (default stdout)");

  Settings ren_flags;
  std::string measure_path;
  int ren_order = 40;
  ren_flags.tol = 1e-10;
  auto* ren = app.add_subcommand("renormalize", "Hersch renormalization point of a measure");
  add_metric_options(ren, ren_flags, false);
  ren->add_option("--measure", measure_path, "measure CSV (x0..xn,weight)");
  ren->add_option("--grid-order", ren_order, "grid order for metric measures");
  ren->add_option("--tol", ren_flags.tol, "residual tolerance");
  ren->add_option("--out", ren_flags.out, "output file (default stdout)");

  Settings spectrum_flags;
  int k_max = 8;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Galerkin eigenvalues of the Laplace-Beltrami operator");
  add_metric_options(spectrum_cmd, spectrum_flags, false);
  spectrum_cmd->add_option("--basis-L", spectrum_flags.basis_l, "harmonic degree of the basis (0 = default)");
  spectrum_cmd->add_option("--grid-order", spectrum_flags.grid_order, "quadrature order (0 = default)");
  spectrum_cmd->add_option("--k", k_max, "largest eigenvalue index reported");
  spectrum_cmd->add_option("--out", spectrum_flags.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  auto configured = [](const Settings& flags, const CLI::App* cmd) {
    Settings s = flags;
    apply_config(flags, s, *cmd);
    validate(s);
    return s;
  };

  try {
    if (*constants) return cmd_constants(range, const_out);
    if (*cert) return cmd_certify(configured(cert_flags, cert), !no_spectrum);
    if (*lift) return cmd_lift_scan(configured(lift_flags, lift), p_text, r_min, r_max, steps, claim1, map_order);
    if (*deg) return cmd_degree(deg_n, builtin, from_lift, deg_order, bandwidth, deg_out);
    if (*ren) return cmd_renormalize(configured(ren_flags, ren), measure_path, ren_order);
    if (*spectrum_cmd) return cmd_spectrum(configured(spectrum_flags, spectrum_cmd), k_max);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
