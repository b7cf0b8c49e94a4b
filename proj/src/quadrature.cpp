#include "confspec/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace confspec {

Rule1D gauss_gegenbauer(int count, double alpha) {
  if (count < 1) throw std::invalid_argument("gauss_gegenbauer: count must be >= 1");
  if (!(alpha > -1.0)) throw std::invalid_argument("gauss_gegenbauer: alpha must be > -1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    const double b2 = k * (k + 2.0 * alpha) / ((2.0 * k + 2.0 * alpha + 1.0) * (2.0 * k + 2.0 * alpha - 1.0));
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(b2);
  }
  const double mu0 = std::sqrt(std::numbers::pi) * std::exp(std::lgamma(alpha + 1.0) - std::lgamma(alpha + 1.5));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  Rule1D rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  for (int k = 0; k < count; ++k) {
    rule.nodes[k] = eig.eigenvalues()(k);
    const double v0 = eig.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  // Symmetrize: the rule is even, and this removes eigensolver asymmetry.
  for (int k = 0; k < count / 2; ++k) {
    const int j = count - 1 - k;
    const double t = 0.5 * (rule.nodes[j] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[j] + rule.weights[k]);
    rule.nodes[k] = -t;
    rule.nodes[j] = t;
    rule.weights[k] = rule.weights[j] = w;
  }
  if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
  return rule;
}

QuadratureGrid sphere_grid(int n, int order) {
  if (n < 1) throw std::invalid_argument("sphere_grid: n must be >= 1");
  if (order < 1) throw std::invalid_argument("grid: order must be >= 1");
  QuadratureGrid g;
  g.n = n;
  g.order = order;
  if (n == 1) {
    const int m = order + 1;
    g.nodes.resize(2, m);
    g.weights.setConstant(m, 2.0 * std::numbers::pi / m);
    for (int k = 0; k < m; ++k) {
      const double phi = 2.0 * std::numbers::pi * (k + 0.5) / m;
      g.nodes(0, k) = std::cos(phi);
      g.nodes(1, k) = std::sin(phi);
    }
    return g;
  }
  const QuadratureGrid sub = sphere_grid(n - 1, order);
  const Rule1D rule = gauss_gegenbauer(order / 2 + 1, 0.5 * (n - 2));
  const Eigen::Index count = static_cast<Eigen::Index>(rule.nodes.size()) * sub.size();
  g.nodes.resize(n + 1, count);
  g.weights.resize(count);
  Eigen::Index idx = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    const double rho = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (Eigen::Index j = 0; j < sub.size(); ++j, ++idx) {
      g.nodes(0, idx) = t;
      g.nodes.col(idx).tail(n) = rho * sub.nodes.col(j);
      g.nodes.col(idx).normalize();
      g.weights(idx) = rule.weights[i] * sub.weights(j);
    }
  }
  return g;
}

QuadratureGrid grid(Dimension n, int order) {
  if (n.value() > 4) throw std::invalid_argument("grid: unsupported dimension (n must be 2, 3 or 4)");
  return sphere_grid(n.value(), order);
}

QuadratureGrid cap_split_grid(Dimension n, const Cap& a, int order) {
  if (n.ambient() != a.ambient()) throw std::invalid_argument("cap_split_grid: dimension mismatch");
  const Vec& p = a.p().coords();
  const Vec axis = canonical_axis(p);
  const double cos_boundary = std::clamp(a.height() * axis.dot(p), -1.0, 1.0);
  const double theta_b = std::acos(cos_boundary);

  const Mat frame = frame_from_axis(axis);
  const QuadratureGrid sub = sphere_grid(n.value() - 1, order);
  const Rule1D rule = gauss_legendre(order / 2 + 1);

  QuadratureGrid g;
  g.n = n.value();
  g.order = order;
  const Eigen::Index per_side = static_cast<Eigen::Index>(rule.nodes.size()) * sub.size();
  g.nodes.resize(n.ambient(), 2 * per_side);
  g.weights.resize(2 * per_side);
  Eigen::Index idx = 0;
  const double lo[2] = {0.0, theta_b};
  const double hi[2] = {theta_b, std::numbers::pi};
  for (int side = 0; side < 2; ++side) {
    const double half = 0.5 * (hi[side] - lo[side]);
    const double mid = 0.5 * (hi[side] + lo[side]);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double theta = mid + half * rule.nodes[i];
      const double s = std::sin(theta);
      const double wt = half * rule.weights[i] * std::pow(s, n.value() - 1);
      for (Eigen::Index j = 0; j < sub.size(); ++j, ++idx) {
        Vec x = std::cos(theta) * frame.col(0);
        for (int k = 0; k < n.value(); ++k) x += s * sub.nodes(k, j) * frame.col(k + 1);
        x.normalize();
        g.nodes.col(idx) = x;
        g.weights(idx) = wt * sub.weights(j);
      }
    }
  }
  return g;
}

}  // namespace confspec
