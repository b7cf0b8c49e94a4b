#pragma once

#include "confspec/types.hpp"

namespace confspec {

struct BoundConstants {
  int n = 2;
  double sigma_n = 0.0;
  double k_n = 0.0;
  double theorem_bound = 0.0;     // K_n n (2 sigma_n)^{2/n}
  double conjecture_bound = 0.0;  // n (2 sigma_n)^{2/n}
};

/// Volume of the unit n-sphere, 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double sphere_volume(Dimension n);

/// K_n = (n+1)/n * (Gamma(n) Gamma((n+1)/2) / (Gamma(n+1/2) Gamma(n/2)))^{2/n}.
double k_constant(Dimension n);

double theorem_bound(Dimension n);
double conjecture_bound(Dimension n);

/// Integral over S^n of |grad X_s|^n = (1 - (s.x)^2)^{n/2} for any unit s,
/// in closed form sigma_{n-1} B(1/2, n).
double grad_norm_integral(Dimension n);

/// The same integral by Gauss-Legendre quadrature of the zonal reduction
/// sigma_{n-1} * int_{-1}^{1} (1 - t^2)^{n-1} dt; independent of the Beta route.
double grad_norm_integral_quadrature(Dimension n);

/// Lower bound n (k sigma_n)^{2/n} for the k-th conformal eigenvalue.
double conformal_lower_bound(Dimension n, int k);

BoundConstants bound_constants(Dimension n);

}  // namespace confspec
