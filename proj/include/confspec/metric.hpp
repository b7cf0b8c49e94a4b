#pragma once

#include "confspec/harmonics.hpp"
#include "confspec/moebius.hpp"
#include "confspec/types.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace confspec {

/// g = e^{2w} g0 on S^n. The log-factor is
///   w(x) = log_scale + log lambda_T(x) + sum_k c_k Y_k(T x)
/// where Y_k is the orthonormal harmonic basis of degree <= L_w and T is a
/// composite Moebius map (identity for a plain coefficient metric). Pulling
/// back by further Moebius maps or rotations extends T.
class ConformalMetric {
public:
  /// Round metric g0.
  static ConformalMetric round(Dimension n);
  /// Coefficients in the HarmonicBasis(n, L_w) ordering.
  static ConformalMetric from_coefficients(Dimension n, int lw, Eigen::VectorXd coeffs);
  /// (d_xi)^* g0: isometric to the round sphere.
  static ConformalMetric pullback_of_round(const BallPoint& xi);
  /// i.i.d. uniform coefficients in [-amplitude, amplitude] for degrees 0..=degree.
  static ConformalMetric random(Dimension n, std::uint64_t seed, int degree = 3, double amplitude = 0.3);

  int n() const { return n_; }
  int lw() const { return lw_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  const MoebiusMap& chain() const { return chain_; }
  double log_scale() const { return log_scale_; }

  /// w(x) at a unit vector x.
  double log_factor(const Vec& x) const;

  /// T^* g for a Moebius map T.
  ConformalMetric pulled_back(const MoebiusMap& t) const;
  /// e^{2c} g.
  ConformalMetric scaled(double log_c) const;

private:
  ConformalMetric(int n, int lw, Eigen::VectorXd coeffs);

  int n_;
  int lw_;
  Eigen::VectorXd coeffs_;
  std::shared_ptr<const HarmonicBasis> basis_;
  MoebiusMap chain_;
  double log_scale_ = 0.0;
};

}  // namespace confspec
