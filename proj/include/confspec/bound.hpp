#pragma once

#include "confspec/constants.hpp"
#include "confspec/quadform.hpp"
#include "confspec/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace confspec {

/// u_a^s = X_s o d_xi on a and X_s o d_xi o tau_a on a^*.
struct TestFunction {
  Cap cap;
  Vec xi;
  Vec s;

  double value(const Vec& x) const;
  /// Round-metric (tangential) gradient at the unit vector x.
  Vec gradient(const Vec& x) const;
  /// Value from the a-rule and from the a^*-rule; equal on the boundary of a.
  double value_inside_rule(const Vec& x) const;
  double value_outside_rule(const Vec& x) const;
};

/// The normalized quantities of the two-function Rayleigh quotient
/// q(x, y) = (sigma x^2 + tau y^2 + 2 alpha x y) / (I x^2 + J y^2 + 2 beta x y)
/// for phi = X_{e1} and psi = u_a, gradient terms divided by
/// (int |grad phi|^n dv_g)^{2/n} and L^2 terms multiplied by n + 1.
struct RayleighCoefficients {
  int n = 2;
  double r = 0;
  double sigma = 0;
  double tau = 0;
  double alpha = 0;
  double beta = 0;
  double i = 0;
  double j = 0;
  double psi_mean = 0;         // int psi dv_g
  double psi_grad_n = 0;       // int |grad psi|^n dv_g (conformally invariant)
  double psi_dirichlet = 0;    // int |grad psi|_g^2 dv_g
  double volume = 0;           // quadrature volume of g on the grid used

  /// alpha - 2^{2/n} beta; the balanced cap is its zero.
  double balance() const;
  /// Largest value of q over R^2 \ {0} (2x2 generalized eigenvalue).
  double sup_q() const;
};

struct BoundOptions {
  int grid_order = 0;            // cap-split grid order; 0 picks 40 (n = 2) or 24 (n = 3)
  NormalizeOptions normalize;
  FamilyOptions family;
  double start_r = -0.999;
  double scan_min = -0.95;
  double scan_max = 0.95;
  int scan_samples = 40;
  double root_tol = 1e-8;
  int max_bisection = 60;
  double strict_slack = 1e-10;
  bool compute_spectrum = true;
  int basis_degree = 0;          // 0 picks default_basis_degree(n)
  int spectral_grid_order = 0;

  BoundOptions();
  int effective_grid_order(int n) const;
};

/// alpha_r - 2^{2/n} beta_r has no sign change on the scan interval.
class NoSignChange : public NumericalError {
public:
  NoSignChange(const std::string& what, double at_min, double at_max)
      : NumericalError(what), at_min_(at_min), at_max_(at_max) {}
  double at_min() const { return at_min_; }
  double at_max() const { return at_max_; }

private:
  double at_min_;
  double at_max_;
};

enum class Branch { MetricMultiple, CapMultiple, BalancedCap };
std::string to_string(Branch b);

struct ScanPoint {
  double r = 0;
  double balance = 0;
  double gap = 0;
  bool inserted = false;
};

struct BoundCertificate {
  Branch branch = Branch::BalancedCap;
  int n = 2;
  std::optional<double> r_star;
  std::optional<RayleighCoefficients> coefficients;  // at r_star
  double sup_q = 0;
  double minmax_value = 0;
  double theorem_bound = 0;
  double conjecture_bound = 0;
  bool passed = false;
  std::optional<double> solver_invariant;  // lambda_2 Vol^{2/n} from the Galerkin solver
  double balance_at_scan_min = 0;
  double balance_at_scan_max = 0;
  std::vector<ScanPoint> scan;
  std::vector<std::pair<double, double>> bisection;  // (r, balance)
  std::optional<double> multiple_cap_r;
  Vec multiple_cap_p;                      // axis of the multiple cap
  std::optional<double> multiple_cap_gap;  // relative Gram gap there
  // Normalization applied
  double original_volume = 0;
  double log_scale = 0;
  Vec normalization_xi;
  Mat rotation;
  // Settings
  int grid_order = 0;
  int normalize_grid_order = 0;
  int basis_degree = 0;
  double root_tol = 0;
  double multiplicity_tol = 0;
};

/// Evaluates the cap pipeline of a normalized metric on cap-split grids.
class CapEvaluator {
public:
  CapEvaluator(const NormalizedMetric& g, const BoundOptions& options);

  /// dv_g on the split grid of a.
  DiscreteMeasure measure(const Cap& a) const;
  MeasureFactory factory() const;

  /// Family at a with the direction sign chosen so s . reference > 0.
  CapFamily family(const Cap& a, const Vec& reference, const std::optional<Vec>& warm_xi = std::nullopt) const;

  RayleighCoefficients coefficients(const TestFunction& u) const;

  const NormalizedMetric& metric() const { return g_; }
  int grid_order() const { return order_; }

private:
  const NormalizedMetric& g_;
  BoundOptions options_;
  int order_;
};

/// u_a with s(a) from the sign-continuous lift along the ray of a from start_r.
TestFunction test_function(const NormalizedMetric& g, const Cap& a, const BoundOptions& options = {});

/// Largest discrepancy between the chain-rule gradient of u and central
/// differences along random tangent directions, over `samples` random points
/// away from the cap boundary.
double gradient_check(const TestFunction& u, int samples = 100, std::uint64_t seed = 1);

/// Coefficients at r for the caps a_{r, e1}, with s tracked from start_r.
RayleighCoefficients rayleigh_coefficients(const NormalizedMetric& g, double r, const BoundOptions& options = {});

/// Lift along the e_1 ray over the scan grid with the coefficients at each sample.
struct BalanceScan {
  LiftPath path;
  std::vector<TestFunction> tests;
  std::vector<RayleighCoefficients> coefficients;
  std::size_t first = 0;  // first sample with r >= scan_min
};

/// Throws MultiplicityEncountered.
BalanceScan scan_balance(const NormalizedMetric& g, const BoundOptions& options = {});

struct MultipleCap {
  Cap cap;
  double relative_gap = 0;
  Vec xi;
  int evaluations = 0;
};

/// Minimizes the relative Gram gap of dnu_a over caps near `start` (radius and
/// axis free). Returns the best cap found; relative_gap tells whether it is
/// multiple at the given tolerance.
MultipleCap find_multiple_cap(const NormalizedMetric& g, const Cap& start, const Vec& warm_xi,
                              double target_gap, const BoundOptions& options = {}, int max_evaluations = 400);

struct BalancedCapResult {
  double r_star = 0;
  RayleighCoefficients coefficients;
  std::optional<TestFunction> test;
  std::vector<ScanPoint> scan;
  std::vector<std::pair<double, double>> bisection;
  double balance_at_scan_min = 0;
  double balance_at_scan_max = 0;
};

/// Scan r in [scan_min, scan_max] (after a continuation start at start_r),
/// then bisect the first + to - sign change of alpha_r - 2^{2/n} beta_r.
/// The endpoint values must be positive at scan_min and negative at scan_max;
/// otherwise NoSignChange, since the path cannot come from a global lift.
/// Throws NoSignChange or MultiplicityEncountered.
BalancedCapResult balanced_cap(const NormalizedMetric& g, const BoundOptions& options = {});
BalancedCapResult balanced_cap(const NormalizedMetric& g, const BalanceScan& scan, const BoundOptions& options = {});

/// Upstream failure during certification; carries the record built so far.
class CertificationError : public NumericalError {
public:
  CertificationError(const std::string& what, BoundCertificate partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const BoundCertificate& partial() const { return partial_; }

private:
  BoundCertificate partial_;
};

/// Min-max certificate for lambda_2 Vol^{2/n} of g.
BoundCertificate certify(const ConformalMetric& g, const BoundOptions& options = {});

}  // namespace confspec
