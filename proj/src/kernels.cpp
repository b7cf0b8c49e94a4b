#include "confspec/kernels.hpp"

#include "confspec/moebius.hpp"

#include <omp.h>

#include <vector>

namespace confspec::kernels {

namespace {

Eigen::Index block_count(Eigen::Index n) { return (n + kBlock - 1) / kBlock; }

}  // namespace

namespace serial {

Vec moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights, const Vec& xi) {
  Vec acc = Vec::Zero(points.rows());
  for (Eigen::Index i = 0; i < points.cols(); ++i) acc += weights(i) * moebius_apply(xi, Vec(points.col(i)));
  return acc;
}

Mat second_moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights) {
  const Eigen::Index d = points.rows();
  Mat acc = Mat::Zero(d, d);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const Vec x = points.col(i);
    acc.noalias() += weights(i) * x * x.transpose();
  }
  return acc;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& phi, const Eigen::VectorXd& weights) {
  const Eigen::Index k = phi.cols();
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < phi.rows(); ++i) s += weights(i) * phi(i, a) * phi(i, b);
      out(a, b) = out(b, a) = s;
    }
  }
  return out;
}

}  // namespace serial

namespace parallel {

Vec moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights, const Vec& xi) {
  const Eigen::Index n = points.cols();
  const Eigen::Index blocks = block_count(n);
  std::vector<Vec> partial(static_cast<std::size_t>(blocks), Vec::Zero(points.rows()));
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    Vec acc = Vec::Zero(points.rows());
    const Eigen::Index end = std::min(n, (b + 1) * kBlock);
    for (Eigen::Index i = b * kBlock; i < end; ++i) acc += weights(i) * moebius_apply(xi, Vec(points.col(i)));
    partial[static_cast<std::size_t>(b)] = acc;
  }
  Vec total = Vec::Zero(points.rows());
  for (const Vec& p : partial) total += p;
  return total;
}

Mat second_moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights) {
  const Eigen::Index n = points.cols();
  const Eigen::Index d = points.rows();
  const Eigen::Index blocks = block_count(n);
  std::vector<Mat> partial(static_cast<std::size_t>(blocks), Mat::Zero(d, d));
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index begin = b * kBlock;
    const Eigen::Index len = std::min(n, begin + kBlock) - begin;
    const auto cols = points.middleCols(begin, len);
    Eigen::MatrixXd scaled = cols * weights.segment(begin, len).asDiagonal();
    partial[static_cast<std::size_t>(b)] = scaled * cols.transpose();
  }
  Mat total = Mat::Zero(d, d);
  for (const Mat& p : partial) total += p;
  return total;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& phi, const Eigen::VectorXd& weights) {
  const Eigen::Index k = phi.cols();
  const Eigen::MatrixXd scaled = weights.asDiagonal() * phi;
  Eigen::MatrixXd out(k, k);
  constexpr Eigen::Index kColBlock = 32;
  const Eigen::Index blocks = (k + kColBlock - 1) / kColBlock;
  // Each output column block is owned by one thread.
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index begin = b * kColBlock;
    const Eigen::Index len = std::min(k, begin + kColBlock) - begin;
    out.middleCols(begin, len).noalias() = phi.transpose() * scaled.middleCols(begin, len);
  }
  return 0.5 * (out + out.transpose());
}

}  // namespace parallel

Vec moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights, const Vec& xi) {
  return points.cols() >= kParallelThreshold ? parallel::moment(points, weights, xi)
                                             : serial::moment(points, weights, xi);
}

Mat second_moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights) {
  return points.cols() >= kParallelThreshold ? parallel::second_moment(points, weights)
                                             : serial::second_moment(points, weights);
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& phi, const Eigen::VectorXd& weights) {
  // The blocked product is also the fast single-thread path, so always use it.
  return parallel::weighted_gram(phi, weights);
}

void map_columns(const Eigen::MatrixXd& points, Eigen::VectorXd& out,
                 const std::function<double(const Vec&)>& f) {
  out.resize(points.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < points.cols(); ++i) out(i) = f(points.col(i));
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace confspec::kernels
