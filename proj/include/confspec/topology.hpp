#pragma once

#include "confspec/quadform.hpp"
#include "confspec/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace confspec {

/// A map S^n -> S^n given by an evaluation rule.
class SampledMap {
public:
  using Rule = std::function<Vec(const Vec&)>;

  SampledMap(int n, std::string name, Rule rule, bool smooth = true);

  static SampledMap identity(int n);
  static SampledMap antipodal(int n);
  static SampledMap orthogonal(const Mat& q, std::string name = "orthogonal");
  /// x -> normalize(sum_i K(x, p_i) f_i) with a Gaussian kernel in geodesic
  /// distance of the given bandwidth. Columns of `points` and `values` pair up.
  static SampledMap interpolate(const Eigen::MatrixXd& points, const Eigen::MatrixXd& values, double bandwidth,
                                std::string name = "interpolated");
  /// normalize((1 - t) f + t g); throws if the two maps are antipodal somewhere.
  static SampledMap blend(const SampledMap& f, const SampledMap& g, double t);

  /// f(x); output has unit norm to 1e-8 (NumericalError otherwise).
  Vec operator()(const Vec& x) const;
  /// x -> f(R x).
  SampledMap precompose(const Mat& r) const;

  int n() const { return n_; }
  int ambient() const { return n_ + 1; }
  const std::string& name() const { return name_; }
  bool smooth() const { return smooth_; }

private:
  int n_;
  std::string name_;
  Rule rule_;
  bool smooth_;
};

enum class DegreeMethod { JacobianIntegral, PreimageCount };
std::string to_string(DegreeMethod m);

struct DegreeReport {
  int degree = 0;
  double raw_integral = 0;
  double rounding_gap = 0;
  DegreeMethod method = DegreeMethod::JacobianIntegral;
  int grid_order = 0;
  std::optional<int> cross_check;  // preimage count at a sampled regular value
  int preimages = 0;
};

class NonIntegerDegree : public NumericalError {
public:
  NonIntegerDegree(const std::string& what, double raw) : NumericalError(what), raw_(raw) {}
  double raw() const { return raw_; }

private:
  double raw_;
};

struct DegreeOptions {
  int grid_order = 0;   // 0 picks 80 (n = 2) or 40 (n = 3)
  double fd_step = 1e-5;
  double max_gap = 0.1;
  bool cross_check = true;
  std::uint64_t seed = 17;
};

/// (1/sigma_n) int det[f, Df v_1, ..., Df v_n] over positively oriented tangent
/// frames, on a grid split at the equator x_0 = 0. Throws NonIntegerDegree.
DegreeReport degree(const SampledMap& f, const DegreeOptions& options = {});

/// Signed count of solutions of f(x) = y found by Newton from a seed grid.
DegreeReport preimage_degree(const SampledMap& f, const Vec& y, int seed_order = 24);

/// max_p |f(-p) - R_p f(p)| over a grid.
double equivariance_residual(const SampledMap& f, int grid_order = 24);

struct Claim3Report {
  double residual = 0;
  DegreeReport degree;
  bool equivariant = false;  // residual within the gate
  bool holds = false;        // parity statement for n even, degree 1 for n odd
};

Claim3Report claim3_verify(const SampledMap& f, double residual_gate = 1e-6, const DegreeOptions& options = {});

/// Test corpus of maps satisfying f(-p) = R_p f(p), for n in {2, 3}.
std::vector<SampledMap> equivariant_sample_maps(int n);

/// Samples of p -> s(0, p) from sign-continuous lifts along the rays of p.
struct LiftMapSamples {
  Eigen::MatrixXd points;
  Eigen::MatrixXd values;
  std::vector<Vec> multiple_at;       // rays that hit multiplicity
  std::vector<double> multiple_r;
  bool complete() const { return multiple_at.empty(); }
};

LiftMapSamples sample_lift_map(const MeasureFactory& factory, const Eigen::MatrixXd& points,
                               const LiftOptions& options = {}, double start_r = -0.999);

/// Kernel bandwidth for interpolating samples whose typical spacing is `spacing`.
inline double lift_map_bandwidth(double spacing) { return 1.5 * spacing; }

}  // namespace confspec
