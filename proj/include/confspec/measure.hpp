#pragma once

#include "confspec/moebius.hpp"
#include "confspec/quadrature.hpp"
#include "confspec/types.hpp"

#include <iosfwd>
#include <optional>

namespace confspec {

class ConformalMetric;

/// Finite atomic measure on S^n: unit-vector atoms (columns) with nonnegative weights.
class DiscreteMeasure {
public:
  DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights);

  int n() const { return static_cast<int>(points_.rows()) - 1; }
  int ambient() const { return static_cast<int>(points_.rows()); }
  Eigen::Index size() const { return weights_.size(); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Vec atom(Eigen::Index i) const { return points_.col(i); }
  double mass() const { return mass_; }

  /// Uniform round measure carried by a grid.
  static DiscreteMeasure from_grid(const QuadratureGrid& g);

private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
  double mass_;
};

/// dv_g on the nodes of a grid: weights w_i e^{n w(x_i)}.
DiscreteMeasure metric_measure(const ConformalMetric& g, const QuadratureGrid& grid);

/// Atoms moved by T, weights unchanged.
DiscreteMeasure pushforward(const DiscreteMeasure& nu, const MoebiusMap& t);

/// dmu_a = dv_g + tau_a^* dv_g on a, 0 on a^*: atoms of a kept, atoms of a^*
/// replaced by their tau_a images. Atoms with |margin| < 1e-12 are assigned to a
/// and counted in boundary_atoms.
DiscreteMeasure lift(const DiscreteMeasure& nu, const Cap& a, std::size_t* boundary_atoms = nullptr);

/// Normalized first moment (1/mass) sum_i w_i d_xi(x_i).
Vec renormalization_moment(const DiscreteMeasure& nu, const Vec& xi);

struct RenormalizationPoint {
  BallPoint xi;
  double residual = 0.0;  // |moment| / mass at xi
  int iterations = 0;
};

struct HerschOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
  /// Escape threshold: |xi| > 1 - boundary_margin.
  double boundary_margin = 1e-9;
  std::optional<Vec> initial_guess;
};

/// Solves sum_i w_i d_xi(x_i) = 0 by damped Newton with a central-difference
/// Jacobian; falls back to a moment-descent step when the Newton step fails to
/// reduce the residual. Throws NonConvergence or BoundaryEscape.
RenormalizationPoint hersch_renormalize(const DiscreteMeasure& nu, const HerschOptions& options = {});

/// CSV with header x0,...,xn,weight.
void write_measure_csv(std::ostream& out, const DiscreteMeasure& nu);
DiscreteMeasure read_measure_csv(std::istream& in);

}  // namespace confspec
