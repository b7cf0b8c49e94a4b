#include "confspec/constants.hpp"

#include "confspec/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace confspec {

namespace {

// sigma_m for any m >= 1 (grad_norm_integral needs sigma_{n-1}).
double sphere_volume_any(int m) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

}  // namespace

double sphere_volume(Dimension n) { return sphere_volume_any(n.value()); }

double k_constant(Dimension n) {
  const double m = n.value();
  // Log-gamma keeps the ratio finite for large n.
  const double log_ratio = std::lgamma(m) + std::lgamma(0.5 * (m + 1.0)) - std::lgamma(m + 0.5) - std::lgamma(0.5 * m);
  return (m + 1.0) / m * std::exp(2.0 / m * log_ratio);
}

double conjecture_bound(Dimension n) {
  return n.value() * std::pow(2.0 * sphere_volume(n), 2.0 / n.value());
}

double theorem_bound(Dimension n) { return k_constant(n) * conjecture_bound(n); }

double conformal_lower_bound(Dimension n, int k) {
  if (k < 1) throw std::invalid_argument("conformal_lower_bound: k must be >= 1");
  return n.value() * std::pow(k * sphere_volume(n), 2.0 / n.value());
}

double grad_norm_integral(Dimension n) {
  const double m = n.value();
  const double log_beta = std::lgamma(0.5) + std::lgamma(m) - std::lgamma(m + 0.5);
  return sphere_volume_any(n.value() - 1) * std::exp(log_beta);
}

double grad_norm_integral_quadrature(Dimension n) {
  // (1 - t^2)^{n/2} from |grad X_s|^n times the zonal density (1 - t^2)^{(n-2)/2}:
  // a polynomial of degree 2n - 2, integrated exactly by n Gauss-Legendre nodes.
  const Rule1D rule = gauss_legendre(n.value() + 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    sum += rule.weights[i] * std::pow(1.0 - t * t, n.value() - 1);
  }
  return sphere_volume_any(n.value() - 1) * sum;
}

BoundConstants bound_constants(Dimension n) {
  BoundConstants c;
  c.n = n.value();
  c.sigma_n = sphere_volume(n);
  c.k_n = k_constant(n);
  c.conjecture_bound = conjecture_bound(n);
  c.theorem_bound = c.k_n * c.conjecture_bound;
  return c;
}

}  // namespace confspec
