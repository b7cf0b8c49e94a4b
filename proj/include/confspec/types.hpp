#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace confspec {

/// Largest ambient dimension handled by the fixed-capacity vectors (S^4 in R^5).
inline constexpr int kMaxAmbient = 5;

/// Ambient vector in R^{n+1}; fixed capacity so point maps never allocate.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxAmbient, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxAmbient, kMaxAmbient>;

/// Dimension of the sphere S^n, n >= 2.
class Dimension {
public:
  explicit Dimension(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("sphere dimension must be >= 2, got " + std::to_string(n));
  }
  int value() const { return n_; }
  int ambient() const { return n_ + 1; }
  operator int() const { return n_; }

private:
  int n_;
};

/// Base class for numerical failures (non-convergence, degeneracy, ...).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Renormalization point left every compact subset of the ball.
class BoundaryEscape : public NumericalError {
public:
  using NumericalError::NumericalError;
};

inline Vec unit_vector(int dim, int i) {
  Vec e = Vec::Zero(dim);
  e(i) = 1.0;
  return e;
}

}  // namespace confspec
