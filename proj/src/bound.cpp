#include "confspec/bound.hpp"

#include "confspec/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace confspec {

namespace {

// Near-boundary nodes are evaluated by the rule of their side; the split grid
// never places a node on the boundary itself.
bool inside(const Cap& a, const Vec& x) { return cap_margin(a, x) > 0.0; }

double top_generalized_eigenvalue(const Eigen::Matrix2d& num, const Eigen::Matrix2d& den) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> eig(num, den);
  if (eig.info() != Eigen::Success) throw NumericalError("2x2 pencil: denominator is not positive definite");
  return eig.eigenvalues()(1);
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = count == 1 ? a : a + (b - a) * i / (count - 1);
  return out;
}

// Continuation grid from start_r to r with steps of at most 0.05.
std::vector<double> approach(double start_r, double r) {
  if (r <= start_r) return {r};
  const int steps = std::max(1, static_cast<int>(std::ceil((r - start_r) / 0.05)));
  return linspace(start_r, r, steps + 1);
}

// Per-node density factors on a grid: W e^{(n-2)w} and W e^{nw}.
struct Densities {
  Eigen::VectorXd stiffness;
  Eigen::VectorXd mass;
};

Densities densities(const ConformalMetric& g, const QuadratureGrid& grid) {
  Eigen::VectorXd logf;
  kernels::map_columns(grid.nodes, logf, [&](const Vec& x) { return g.log_factor(x); });
  const Dimension n(g.n());
  return Densities{grid.weights.array() * ((n - 2) * logf.array()).exp(),
                   grid.weights.array() * (n * logf.array()).exp()};
}

// (A, B) for E = span{f_1, f_2}: A_ij = int grad f_i . grad f_j, B_ij = int f_i f_j.
template <class Values>
std::pair<Eigen::Matrix2d, Eigen::Matrix2d> pencil(const QuadratureGrid& grid, const Densities& dens,
                                                   const Values& eval) {
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Vec x = grid.nodes.col(i);
    double f[2];
    Vec df[2];
    eval(x, f, df);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        a(p, q) += dens.stiffness(i) * df[p].dot(df[q]);
        b(p, q) += dens.mass(i) * f[p] * f[q];
      }
  }
  return {a, b};
}

}  // namespace

double TestFunction::value_inside_rule(const Vec& x) const { return s.dot(moebius_apply(xi, x)); }

double TestFunction::value_outside_rule(const Vec& x) const {
  return s.dot(moebius_apply(xi, cap_reflection(cap, x)));
}

double TestFunction::value(const Vec& x) const {
  return inside(cap, x) ? value_inside_rule(x) : value_outside_rule(x);
}

Vec TestFunction::gradient(const Vec& x) const {
  if (inside(cap, x)) return tangent_part(x, moebius_jacobian(xi, x).transpose() * s);
  const Vec y = cap_reflection(cap, x);
  const Vec g = cap_reflection_jacobian(cap, x).transpose() * (moebius_jacobian(xi, y).transpose() * s);
  return tangent_part(x, g);
}

double RayleighCoefficients::balance() const { return alpha - std::pow(2.0, 2.0 / n) * beta; }

double RayleighCoefficients::sup_q() const {
  Eigen::Matrix2d num, den;
  num << sigma, alpha, alpha, tau;
  den << i, beta, beta, j;
  return top_generalized_eigenvalue(num, den);
}

BoundOptions::BoundOptions() { normalize.hersch.tolerance = 1e-12; family.hersch.tolerance = 1e-12; }

int BoundOptions::effective_grid_order(int n) const {
  if (grid_order > 0) return grid_order;
  return n == 2 ? 40 : 24;
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::MetricMultiple:
      return "metric-multiple";
    case Branch::CapMultiple:
      return "cap-multiple";
    case Branch::BalancedCap:
      return "balanced-cap";
  }
  return "unknown";
}

double gradient_check(const TestFunction& u, int samples, std::uint64_t seed) {
  const int d = u.cap.ambient();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double h = 1e-6;
  double worst = 0.0;
  int taken = 0;
  while (taken < samples) {
    Vec x(d), v(d);
    for (int k = 0; k < d; ++k) x(k) = normal(rng);
    x.normalize();
    if (std::abs(cap_margin(u.cap, x)) < 1e-3) continue;
    for (int k = 0; k < d; ++k) v(k) = normal(rng);
    v = tangent_part(x, v).normalized();
    const Vec xp = (x + h * v).normalized();
    const Vec xm = (x - h * v).normalized();
    const double fd = (u.value(xp) - u.value(xm)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - u.gradient(x).dot(v)));
    ++taken;
  }
  return worst;
}

CapEvaluator::CapEvaluator(const NormalizedMetric& g, const BoundOptions& options)
    : g_(g), options_(options), order_(options.effective_grid_order(g.metric.n())) {}

DiscreteMeasure CapEvaluator::measure(const Cap& a) const {
  return metric_measure(g_.metric, cap_split_grid(Dimension(g_.metric.n()), a, order_));
}

MeasureFactory CapEvaluator::factory() const {
  return [this](const Cap& a) { return measure(a); };
}

CapFamily CapEvaluator::family(const Cap& a, const Vec& reference, const std::optional<Vec>& warm_xi) const {
  FamilyOptions fo = options_.family;
  fo.hersch.initial_guess = warm_xi;
  const DiscreteMeasure dv = measure(a);
  CapFamily fam = [&] {
    try {
      return renormalized_family(dv, a, fo);
    } catch (const NumericalError&) {
      if (!fo.hersch.initial_guess) throw;
      fo.hersch.initial_guess.reset();
      return renormalized_family(dv, a, fo);
    }
  }();
  if (fam.direction.s.dot(reference) < 0.0) fam.direction.s = -fam.direction.s;
  return fam;
}

RayleighCoefficients CapEvaluator::coefficients(const TestFunction& u) const {
  const Dimension n(g_.metric.n());
  const QuadratureGrid grid = cap_split_grid(n, u.cap, order_);
  const Densities dens = densities(g_.metric, grid);
  const Eigen::Index count = grid.size();

  // Per-node terms first (parallel), then ordered sums.
  Eigen::MatrixXd terms(9, count);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vec x = grid.nodes.col(i);
    const double phi = x(0);
    const Vec dphi = tangent_part(x, unit_vector(n + 1, 0));
    const double psi = u.value(x);
    const Vec dpsi = u.gradient(x);
    const double sa = dens.stiffness(i);
    const double sb = dens.mass(i);
    const double gn = dpsi.norm();
    terms(0, i) = sa * dphi.squaredNorm();
    terms(1, i) = sa * dpsi.squaredNorm();
    terms(2, i) = sa * dphi.dot(dpsi);
    terms(3, i) = sb * phi * psi;
    terms(4, i) = sb * phi * phi;
    terms(5, i) = sb * psi * psi;
    terms(6, i) = sb * psi;
    terms(7, i) = grid.weights(i) * std::pow(gn, n);
    terms(8, i) = sb;
  }
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(9);
  for (Eigen::Index i = 0; i < count; ++i) sums += terms.col(i);

  const double dnorm = std::pow(grad_norm_integral(n), 2.0 / n);
  RayleighCoefficients c;
  c.n = n;
  c.r = u.cap.r();
  c.sigma = sums(0) / dnorm;
  c.tau = sums(1) / dnorm;
  c.alpha = sums(2) / dnorm;
  c.beta = (n + 1) * sums(3);
  c.i = (n + 1) * sums(4);
  c.j = (n + 1) * sums(5);
  c.psi_mean = sums(6);
  c.psi_grad_n = sums(7);
  c.psi_dirichlet = sums(1);
  c.volume = sums(8);
  return c;
}

TestFunction test_function(const NormalizedMetric& g, const Cap& a, const BoundOptions& options) {
  const CapEvaluator ev(g, options);
  LiftOptions lo;
  lo.family = options.family;
  const LiftPath path = lift_path(ev.factory(), a.p(), approach(options.start_r, a.r()), lo);
  const LiftSample& last = path.samples.back();
  return TestFunction{a, last.xi, last.s};
}

RayleighCoefficients rayleigh_coefficients(const NormalizedMetric& g, double r, const BoundOptions& options) {
  const Cap a(r, SpherePoint(unit_vector(g.metric.n() + 1, 0)));
  const TestFunction u = test_function(g, a, options);
  return CapEvaluator(g, options).coefficients(u);
}

BalanceScan scan_balance(const NormalizedMetric& g, const BoundOptions& options) {
  if (options.scan_samples < 2 || !(options.scan_min < options.scan_max))
    throw std::invalid_argument("scan_balance: invalid scan interval");
  const SpherePoint e1(unit_vector(g.metric.n() + 1, 0));
  const CapEvaluator ev(g, options);
  std::vector<double> grid = linspace(options.scan_min, options.scan_max, options.scan_samples);
  if (options.start_r < options.scan_min) grid.insert(grid.begin(), options.start_r);
  LiftOptions lo;
  lo.family = options.family;

  BalanceScan out;
  out.path = lift_path(ev.factory(), e1, grid, lo);
  for (const LiftSample& s : out.path.samples) {
    out.tests.push_back(TestFunction{Cap(s.r, e1), s.xi, s.s});
    out.coefficients.push_back(ev.coefficients(out.tests.back()));
  }
  while (out.first < out.path.samples.size() && out.path.samples[out.first].r < options.scan_min) ++out.first;
  return out;
}

BalancedCapResult balanced_cap(const NormalizedMetric& g, const BalanceScan& scan, const BoundOptions& options) {
  const SpherePoint e1(unit_vector(g.metric.n() + 1, 0));
  const CapEvaluator ev(g, options);
  const auto& samples = scan.path.samples;
  const auto& coeffs = scan.coefficients;

  BalancedCapResult out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    out.scan.push_back(ScanPoint{samples[i].r, coeffs[i].balance(), samples[i].gap, samples[i].inserted});
  out.balance_at_scan_min = coeffs[scan.first].balance();
  out.balance_at_scan_max = coeffs.back().balance();

  std::size_t k = scan.first;
  while (k + 1 < coeffs.size() && !(coeffs[k].balance() > 0.0 && coeffs[k + 1].balance() <= 0.0)) ++k;
  if (!(out.balance_at_scan_min > 0.0 && out.balance_at_scan_max < 0.0) || k + 1 >= coeffs.size()) {
    std::ostringstream msg;
    msg << "no sign change of alpha_r - 2^{2/n} beta_r on [" << options.scan_min << ", " << options.scan_max
        << "]: " << out.balance_at_scan_min << " at the left end, " << out.balance_at_scan_max << " at the right end";
    throw NoSignChange(msg.str(), out.balance_at_scan_min, out.balance_at_scan_max);
  }

  double lo_r = samples[k].r;
  double hi_r = samples[k + 1].r;
  Vec lo_s = samples[k].s;
  Vec lo_xi = samples[k].xi;
  TestFunction best = scan.tests[k];
  RayleighCoefficients best_c = coeffs[k];
  if (std::abs(coeffs[k + 1].balance()) < std::abs(best_c.balance())) {
    best = scan.tests[k + 1];
    best_c = coeffs[k + 1];
  }
  for (int it = 0; it < options.max_bisection && std::abs(best_c.balance()) > options.root_tol; ++it) {
    const double mid = 0.5 * (lo_r + hi_r);
    const Cap a(mid, e1);
    const CapFamily fam = ev.family(a, lo_s, lo_xi);
    if (fam.direction.multiple) {
      std::ostringstream msg;
      msg << "multiplicity encountered at r = " << mid << " during bisection";
      throw MultiplicityEncountered(msg.str(), mid, fam.direction.gap, scan.path);
    }
    const TestFunction u{a, fam.xi.xi.coords(), fam.direction.s};
    const RayleighCoefficients c = ev.coefficients(u);
    out.bisection.emplace_back(mid, c.balance());
    if (std::abs(c.balance()) < std::abs(best_c.balance())) {
      best = u;
      best_c = c;
    }
    if (c.balance() > 0.0) {
      lo_r = mid;
      lo_s = u.s;
      lo_xi = u.xi;
    } else {
      hi_r = mid;
    }
  }
  if (std::abs(best_c.balance()) > options.root_tol) {
    std::ostringstream msg;
    msg << "bisection stopped with |alpha - 2^{2/n} beta| = " << std::abs(best_c.balance()) << " on [" << lo_r
        << ", " << hi_r << "]";
    throw NonConvergence(msg.str());
  }
  out.r_star = best.cap.r();
  out.coefficients = best_c;
  out.test = best;
  return out;
}

BalancedCapResult balanced_cap(const NormalizedMetric& g, const BoundOptions& options) {
  return balanced_cap(g, scan_balance(g, options), options);
}

MultipleCap find_multiple_cap(const NormalizedMetric& g, const Cap& start, const Vec& warm_xi, double target_gap,
                              const BoundOptions& options, int max_evaluations) {
  const int n = g.metric.n();
  const int dim = n + 1;  // radius and n tangent offsets of the axis
  const CapEvaluator ev(g, options);
  const Vec p0 = start.p().coords();
  const Mat frame = frame_from_axis(p0);
  const double r_limit = 0.99;

  auto cap_at = [&](const Eigen::VectorXd& z) {
    Vec p = p0;
    for (int k = 0; k < n; ++k) p += z(k + 1) * frame.col(k + 1);
    return Cap(std::clamp(z(0), -r_limit, r_limit), SpherePoint(p));
  };
  MultipleCap best{start, std::numeric_limits<double>::infinity(), warm_xi, 0};
  auto objective = [&](const Eigen::VectorXd& z) {
    ++best.evaluations;
    const Cap a = cap_at(z);
    try {
      const CapFamily fam = ev.family(a, p0, best.xi);
      const double rel = fam.direction.gap / fam.direction.value;
      if (rel < best.relative_gap) best = MultipleCap{a, rel, fam.xi.xi.coords(), best.evaluations};
      return rel;
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Nelder-Mead with restarts around the incumbent; the gap has a conical
  // minimum at a multiple cap, so the simplex is shrunk on each restart.
  Eigen::VectorXd centre(dim);
  centre.setZero();
  centre(0) = start.r();
  double size = 0.05;
  for (int restart = 0; restart < 6 && best.relative_gap > target_gap && best.evaluations < max_evaluations; ++restart) {
    std::vector<Eigen::VectorXd> simplex(dim + 1, centre);
    for (int k = 0; k < dim; ++k) simplex[k + 1](k) += size;
    std::vector<double> f(dim + 1);
    for (int k = 0; k <= dim; ++k) f[k] = objective(simplex[k]);
    for (int it = 0; it < 200 && best.relative_gap > target_gap && best.evaluations < max_evaluations; ++it) {
      std::vector<int> order(dim + 1);
      for (int k = 0; k <= dim; ++k) order[k] = k;
      std::sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
      const int worst = order[dim];
      const int second = order[dim - 1];
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
      for (int k = 0; k <= dim; ++k)
        if (k != worst) mean += simplex[k];
      mean /= dim;
      const Eigen::VectorXd refl = mean + (mean - simplex[worst]);
      const double fr = objective(refl);
      if (fr < f[order[0]]) {
        const Eigen::VectorXd exp = mean + 2.0 * (mean - simplex[worst]);
        const double fe = objective(exp);
        if (fe < fr) {
          simplex[worst] = exp;
          f[worst] = fe;
        } else {
          simplex[worst] = refl;
          f[worst] = fr;
        }
      } else if (fr < f[second]) {
        simplex[worst] = refl;
        f[worst] = fr;
      } else {
        const Eigen::VectorXd con = mean + 0.5 * (simplex[worst] - mean);
        const double fc = objective(con);
        if (fc < f[worst]) {
          simplex[worst] = con;
          f[worst] = fc;
        } else {
          const Eigen::VectorXd keep = simplex[order[0]];
          for (int k = 0; k <= dim; ++k) {
            if (k == order[0]) continue;
            simplex[k] = keep + 0.5 * (simplex[k] - keep);
            f[k] = objective(simplex[k]);
          }
        }
      }
      double spread = 0.0;
      for (int k = 0; k <= dim; ++k) spread = std::max(spread, (simplex[k] - simplex[order[0]]).norm());
      if (spread < 1e-9) break;
    }
    // Restart from the incumbent cap in the original coordinates.
    const Vec pb = best.cap.p().coords();
    centre(0) = best.cap.r();
    for (int k = 0; k < n; ++k) centre(k + 1) = (pb / pb.dot(p0)).dot(frame.col(k + 1));
    size *= 0.3;
  }
  return best;
}

namespace {

void metric_multiple(const NormalizedMetric& ng, const BoundOptions& options, BoundCertificate& cert) {
  const Dimension n(ng.metric.n());
  const QuadratureGrid grid = sphere_grid(n, options.normalize.grid_order);
  const Densities dens = densities(ng.metric, grid);
  const Vec s0 = ng.direction.eigenvectors.col(0);
  const Vec s1 = ng.direction.eigenvectors.col(1);
  const auto [a, b] = pencil(grid, dens, [&](const Vec& x, double* f, Vec* df) {
    f[0] = s0.dot(x);
    f[1] = s1.dot(x);
    df[0] = tangent_part(x, s0);
    df[1] = tangent_part(x, s1);
  });
  const double volume = dens.mass.sum();
  cert.minmax_value = top_generalized_eigenvalue(a, b) * std::pow(volume, 2.0 / n);
  cert.sup_q = cert.minmax_value / ((n + 1) * std::pow(grad_norm_integral(n), 2.0 / n));
}

void cap_multiple(const NormalizedMetric& ng, const BoundOptions& options, const Cap& cap, const Vec& reference,
                  const std::optional<Vec>& warm_xi, BoundCertificate& cert) {
  const Dimension n(ng.metric.n());
  const CapEvaluator ev(ng, options);
  const CapFamily fam = ev.family(cap, reference, warm_xi);
  const TestFunction u0{cap, fam.xi.xi.coords(), fam.direction.eigenvectors.col(0)};
  const TestFunction u1{cap, fam.xi.xi.coords(), fam.direction.eigenvectors.col(1)};
  const QuadratureGrid grid = cap_split_grid(n, cap, ev.grid_order());
  const Densities dens = densities(ng.metric, grid);
  const auto [a, b] = pencil(grid, dens, [&](const Vec& x, double* f, Vec* df) {
    f[0] = u0.value(x);
    f[1] = u1.value(x);
    df[0] = u0.gradient(x);
    df[1] = u1.gradient(x);
  });
  const double volume = dens.mass.sum();
  cert.minmax_value = top_generalized_eigenvalue(a, b) * std::pow(volume, 2.0 / n);
  cert.sup_q = cert.minmax_value / ((n + 1) * std::pow(grad_norm_integral(n), 2.0 / n));
  cert.multiple_cap_r = cap.r();
  cert.multiple_cap_p = cap.p().coords();
  cert.multiple_cap_gap = fam.direction.gap / fam.direction.value;
}

}  // namespace

BoundCertificate certify(const ConformalMetric& g, const BoundOptions& options) {
  const Dimension n(g.n());
  BoundCertificate cert;
  cert.n = n;
  cert.theorem_bound = theorem_bound(n);
  cert.conjecture_bound = conjecture_bound(n);
  cert.grid_order = options.effective_grid_order(n);
  cert.normalize_grid_order = options.normalize.grid_order;
  cert.basis_degree = options.basis_degree > 0 ? options.basis_degree : default_basis_degree(n);
  cert.root_tol = options.root_tol;
  cert.multiplicity_tol = options.family.multiplicity_tol;
  const Vec minus_e1 = -unit_vector(n + 1, 0);

  try {
    const NormalizedMetric ng = normalize(g, options.normalize);
    cert.original_volume = ng.original_volume;
    cert.log_scale = ng.log_scale;
    cert.normalization_xi = ng.xi.coords();
    cert.rotation = ng.rotation;

    if (ng.multiple) {
      cert.branch = Branch::MetricMultiple;
      metric_multiple(ng, options, cert);
    } else {
      try {
        const BalanceScan scan = scan_balance(ng, options);
        try {
          BalancedCapResult res = balanced_cap(ng, scan, options);
          cert.branch = Branch::BalancedCap;
          cert.r_star = res.r_star;
          cert.scan = std::move(res.scan);
          cert.bisection = std::move(res.bisection);
          cert.balance_at_scan_min = res.balance_at_scan_min;
          cert.balance_at_scan_max = res.balance_at_scan_max;
          cert.sup_q = res.coefficients.sup_q();
          cert.minmax_value = (n + 1) * std::pow(grad_norm_integral(n), 2.0 / n) * cert.sup_q *
                              std::pow(res.coefficients.volume, 2.0 / n);
          cert.coefficients = res.coefficients;
        } catch (const NoSignChange& e) {
          // The path went through near-multiple caps; look for a multiple one nearby.
          cert.balance_at_scan_min = e.at_min();
          cert.balance_at_scan_max = e.at_max();
          const auto& samples = scan.path.samples;
          for (std::size_t i = 0; i < samples.size(); ++i)
            cert.scan.push_back(
                ScanPoint{samples[i].r, scan.coefficients[i].balance(), samples[i].gap, samples[i].inserted});
          std::size_t k = 0;
          for (std::size_t i = 1; i < samples.size(); ++i)
            if (samples[i].gap / samples[i].value < samples[k].gap / samples[k].value) k = i;
          const MultipleCap mc = find_multiple_cap(ng, scan.tests[k].cap, samples[k].xi,
                                                   options.family.multiplicity_tol, options);
          if (mc.relative_gap > options.family.multiplicity_tol) {
            std::ostringstream msg;
            msg << e.what() << "; smallest relative gap found near the path is " << mc.relative_gap;
            throw NoSignChange(msg.str(), e.at_min(), e.at_max());
          }
          cert.branch = Branch::CapMultiple;
          cap_multiple(ng, options, mc.cap, samples[k].s, mc.xi, cert);
        }
      } catch (const MultiplicityEncountered& m) {
        cert.branch = Branch::CapMultiple;
        const auto& samples = m.partial().samples;
        const Vec reference = samples.empty() ? minus_e1 : samples.back().s;
        const std::optional<Vec> warm = samples.empty() ? std::nullopt : std::optional<Vec>(samples.back().xi);
        cap_multiple(ng, options, Cap(m.r(), SpherePoint(unit_vector(n + 1, 0))), reference, warm, cert);
      }
    }
    cert.passed = cert.minmax_value < cert.theorem_bound;

    if (options.compute_spectrum) {
      const SpectrumReport rep =
          spectrum(g, cert.basis_degree, 2,
                   options.spectral_grid_order > 0 ? options.spectral_grid_order
                                                   : default_spectral_grid_order(n, cert.basis_degree));
      cert.solver_invariant = rep.invariant(2);
    }
  } catch (const CertificationError&) {
    throw;
  } catch (const NumericalError& e) {
    throw CertificationError(e.what(), cert);
  }
  return cert;
}

}  // namespace confspec
