#pragma once

#include "confspec/moebius.hpp"
#include "confspec/types.hpp"

#include <vector>

namespace confspec {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss rule for the weight (1 - t^2)^alpha on [-1, 1] (Golub-Welsch).
Rule1D gauss_gegenbauer(int count, double alpha);
inline Rule1D gauss_legendre(int count) { return gauss_gegenbauer(count, 0.0); }

/// Nodes (columns, unit vectors of R^{n+1}) and positive weights on S^n.
struct QuadratureGrid {
  int n = 0;
  int order = 0;
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return weights.size(); }
  double total_weight() const { return weights.sum(); }
};

/// Product Gauss grid on S^n exact for polynomials of degree <= order.
/// Supported for n in {2, 3, 4}.
QuadratureGrid grid(Dimension n, int order);

/// Same construction for any n >= 1 (S^1 is the uniform trigonometric rule).
QuadratureGrid sphere_grid(int n, int order);

/// Grid split along the boundary of the cap: Gauss-Legendre in the polar angle
/// about the axis of a on each side of the boundary circle, so that integrands
/// that are smooth on a and on a^* are integrated to high order on both pieces.
/// The node set depends only on the boundary circle, so a and complement(a)
/// produce the same nodes.
QuadratureGrid cap_split_grid(Dimension n, const Cap& a, int order);

}  // namespace confspec
