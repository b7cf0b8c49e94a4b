#pragma once

#include "confspec/types.hpp"

#include <functional>

// Data-parallel inner loops. Each kernel has a serial reference version and an
// OpenMP version; the OpenMP versions reduce over fixed-size blocks whose
// partial sums are combined in order, so results do not depend on the thread
// count. The two versions differ only by floating-point reassociation.
namespace confspec::kernels {

/// Block length of the deterministic reductions.
inline constexpr Eigen::Index kBlock = 512;

/// Sizes below this run the serial path from the dispatching entry points.
inline constexpr Eigen::Index kParallelThreshold = 4096;

namespace serial {
/// sum_i w_i d_xi(x_i)
Vec moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights, const Vec& xi);
/// sum_i w_i x_i x_i^T
Mat second_moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights);
/// Phi^T diag(w) Phi
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& phi, const Eigen::VectorXd& weights);
}  // namespace serial

namespace parallel {
Vec moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights, const Vec& xi);
Mat second_moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights);
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& phi, const Eigen::VectorXd& weights);
}  // namespace parallel

Vec moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights, const Vec& xi);
Mat second_moment(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights);
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& phi, const Eigen::VectorXd& weights);

/// out(i) = f(column i), evaluated in parallel (no reduction).
void map_columns(const Eigen::MatrixXd& points, Eigen::VectorXd& out,
                 const std::function<double(const Vec&)>& f);

int max_threads();

}  // namespace confspec::kernels
