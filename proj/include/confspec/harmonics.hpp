#pragma once

#include "confspec/types.hpp"

#include <memory>
#include <vector>

namespace confspec {

/// Real spherical harmonics of degree <= L on S^n, orthonormal in L^2(S^n, d sigma).
///
/// Built recursively from solid harmonics: a degree-l harmonic in the
/// variables (x_j, ..., x_n) is |x|^k C_k^{lambda}(x_j/|x|) times a degree-m
/// solid harmonic in (x_{j+1}, ..., x_n), with k = l - m and
/// lambda = m + (d - 2)/2 for d = n + 1 - j variables. The innermost level is
/// Re/Im (x_{n-1} + i x_n)^m.
///
/// Ordering is degree-major. Within a degree the order follows the inner
/// index recursively; on S^2 this is (l, 0), (l, 1, cos), (l, 1, sin),
/// (l, 2, cos), ... with x_0 as the polar axis.
class HarmonicBasis {
public:
  HarmonicBasis(int n, int max_degree);

  int n() const { return n_; }
  int max_degree() const { return max_degree_; }
  int size() const { return static_cast<int>(degrees_.size()); }
  int degree(int k) const { return degrees_[k]; }

  /// Values at the unit vector x (length size()).
  void values(const Vec& x, Eigen::Ref<Eigen::VectorXd> out) const;

  /// Values and tangential (round-metric) gradients; grads is (n+1) x size().
  void values_and_gradients(const Vec& x, Eigen::Ref<Eigen::VectorXd> vals,
                            Eigen::Ref<Eigen::MatrixXd> grads) const;

  /// Number of linearly independent harmonics of exact degree l on S^n.
  static int harmonic_dimension(int n, int l);
  /// Number of harmonics of degree <= L on S^n.
  static int basis_dimension(int n, int L);

  /// Shared cached instance.
  static std::shared_ptr<const HarmonicBasis> cached(int n, int max_degree);

private:
  struct Solid {
    int degree;
    double value;
    Vec grad;
  };
  void solid(const Vec& x, std::vector<Solid>& out) const;

  int n_;
  int max_degree_;
  std::vector<int> degrees_;
  Eigen::VectorXd scale_;
};

}  // namespace confspec
