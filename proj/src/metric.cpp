#include "confspec/metric.hpp"

#include <random>

namespace confspec {

ConformalMetric::ConformalMetric(int n, int lw, Eigen::VectorXd coeffs)
    : n_(n), lw_(lw), coeffs_(std::move(coeffs)), chain_(MoebiusMap::identity(n + 1)) {
  if (n < 2 || n + 1 > kMaxAmbient) throw std::invalid_argument("ConformalMetric: n must be in [2, 4]");
  if (lw < 0) throw std::invalid_argument("ConformalMetric: L_w must be >= 0");
  if (coeffs_.size() != HarmonicBasis::basis_dimension(n, lw))
    throw std::invalid_argument("ConformalMetric: expected " + std::to_string(HarmonicBasis::basis_dimension(n, lw)) +
                                " coefficients for L_w = " + std::to_string(lw) + ", got " +
                                std::to_string(coeffs_.size()));
  if (!coeffs_.allFinite()) throw std::invalid_argument("ConformalMetric: non-finite coefficient");
  if (!coeffs_.isZero(0.0)) basis_ = HarmonicBasis::cached(n, lw);
}

ConformalMetric ConformalMetric::round(Dimension n) {
  return ConformalMetric(n.value(), 0, Eigen::VectorXd::Zero(1));
}

ConformalMetric ConformalMetric::from_coefficients(Dimension n, int lw, Eigen::VectorXd coeffs) {
  return ConformalMetric(n.value(), lw, std::move(coeffs));
}

ConformalMetric ConformalMetric::pullback_of_round(const BallPoint& xi) {
  return round(Dimension(xi.ambient() - 1)).pulled_back(MoebiusMap::moebius(xi.coords()));
}

ConformalMetric ConformalMetric::random(Dimension n, std::uint64_t seed, int degree, double amplitude) {
  if (degree < 1) throw std::invalid_argument("ConformalMetric::random: degree must be >= 1");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("ConformalMetric::random: amplitude must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(HarmonicBasis::basis_dimension(n.value(), degree));
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = dist(rng);
  return ConformalMetric(n.value(), degree, std::move(c));
}

double ConformalMetric::log_factor(const Vec& x) const {
  double w = log_scale_;
  Vec y = x;
  if (!chain_.is_identity()) {
    w += chain_.log_factor(x);
    y = chain_.apply(x);
  }
  if (basis_) {
    thread_local Eigen::VectorXd vals;
    vals.resize(basis_->size());
    basis_->values(y, vals);
    w += coeffs_.dot(vals);
  }
  return w;
}

ConformalMetric ConformalMetric::pulled_back(const MoebiusMap& t) const {
  if (t.ambient() != n_ + 1) throw std::invalid_argument("pulled_back: dimension mismatch");
  ConformalMetric out = *this;
  out.chain_ = t.then(chain_);
  return out;
}

ConformalMetric ConformalMetric::scaled(double log_c) const {
  ConformalMetric out = *this;
  out.log_scale_ += log_c;
  return out;
}

}  // namespace confspec
