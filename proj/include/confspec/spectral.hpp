#pragma once

#include "confspec/measure.hpp"
#include "confspec/metric.hpp"
#include "confspec/quadform.hpp"

#include <vector>

namespace confspec {

struct SpectrumReport {
  int n = 0;
  int basis_degree = 0;
  int grid_order = 0;
  std::vector<double> eigenvalues;  // ascending, with multiplicity; lambda_0 = 0
  double volume = 0;

  /// Lambda_{n,k} = lambda_k Vol^{2/n}.
  double invariant(int k) const;
};

/// Default Galerkin degree: 15 on S^2, 10 on S^3.
int default_basis_degree(int n);
/// Default quadrature order: 2L + 20 on S^2, 2L + 10 on S^3.
int default_spectral_grid_order(int n, int basis_degree);

/// Galerkin eigenvalues of the Laplace-Beltrami operator of g = e^{2w} g0 on
/// harmonics of degree <= L: A v = lambda B v with
/// A_ij = int grad Y_i . grad Y_j e^{(n-2)w} dv0 and B_ij = int Y_i Y_j e^{nw} dv0.
SpectrumReport spectrum(const ConformalMetric& g, int basis_degree, int k_max, int grid_order = 0);

double lambda_invariant(const SpectrumReport& report, int k);

struct NormalizeOptions {
  int grid_order = 40;
  HerschOptions hersch;
  double multiplicity_tol = kMultiplicityTolerance;
};

struct NormalizedMetric {
  ConformalMetric metric;       // volume 1, balanced, maximal direction e_1
  ConformalMetric original;
  BallPoint xi;                 // renormalization point of dv_g
  Mat rotation;                 // Q with Q e_1 = maximal direction of the balanced measure
  double log_scale = 0;         // applied e^{2c} scaling
  double original_volume = 0;
  MaximalDirection direction;   // Gram data of the normalized dv_g
  bool multiple = false;
};

/// Volume 1, pulled back by d_{-xi} so dv_g has vanishing first moments, and
/// rotated so the Gram maximal direction is e_1.
NormalizedMetric normalize(const ConformalMetric& g, const NormalizeOptions& options = {});

}  // namespace confspec
