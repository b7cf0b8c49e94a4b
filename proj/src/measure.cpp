#include "confspec/measure.hpp"

#include "confspec/kernels.hpp"
#include "confspec/metric.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace confspec {

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.cols() != weights_.size()) throw std::invalid_argument("DiscreteMeasure: size mismatch");
  if (points_.rows() < 3 || points_.rows() > kMaxAmbient)
    throw std::invalid_argument("DiscreteMeasure: ambient dimension must be in [3, 5]");
  if ((weights_.array() < 0.0).any() || !weights_.allFinite())
    throw std::invalid_argument("DiscreteMeasure: weights must be finite and nonnegative");
  for (Eigen::Index i = 0; i < points_.cols(); ++i) {
    const double norm = points_.col(i).norm();
    if (std::abs(norm - 1.0) > 1e-8) throw std::invalid_argument("DiscreteMeasure: atom is not a unit vector");
    points_.col(i) /= norm;
  }
  mass_ = weights_.sum();
  if (!(mass_ > 0.0)) throw std::invalid_argument("DiscreteMeasure: total mass must be positive");
}

DiscreteMeasure DiscreteMeasure::from_grid(const QuadratureGrid& g) { return DiscreteMeasure(g.nodes, g.weights); }

DiscreteMeasure metric_measure(const ConformalMetric& g, const QuadratureGrid& grid) {
  if (g.n() != grid.n) throw std::invalid_argument("metric_measure: dimension mismatch");
  Eigen::VectorXd logf;
  kernels::map_columns(grid.nodes, logf, [&](const Vec& x) { return g.log_factor(x); });
  const Eigen::VectorXd w = grid.weights.array() * (g.n() * logf.array()).exp();
  return DiscreteMeasure(grid.nodes, w);
}

DiscreteMeasure pushforward(const DiscreteMeasure& nu, const MoebiusMap& t) {
  if (t.ambient() != nu.ambient()) throw std::invalid_argument("pushforward: dimension mismatch");
  Eigen::MatrixXd moved(nu.points().rows(), nu.size());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < nu.size(); ++i) moved.col(i) = t.apply(nu.atom(i));
  return DiscreteMeasure(std::move(moved), nu.weights());
}

DiscreteMeasure lift(const DiscreteMeasure& nu, const Cap& a, std::size_t* boundary_atoms) {
  if (a.ambient() != nu.ambient()) throw std::invalid_argument("lift: dimension mismatch");
  Eigen::MatrixXd moved(nu.points().rows(), nu.size());
  std::size_t on_boundary = 0;
#pragma omp parallel for schedule(static) reduction(+ : on_boundary)
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    const Vec x = nu.atom(i);
    const double margin = cap_margin(a, x);
    if (std::abs(margin) < 1e-12) ++on_boundary;
    moved.col(i) = margin > -1e-12 ? x : cap_reflection(a, x);
  }
  if (boundary_atoms) *boundary_atoms = on_boundary;
  return DiscreteMeasure(std::move(moved), nu.weights());
}

Vec renormalization_moment(const DiscreteMeasure& nu, const Vec& xi) {
  return kernels::moment(nu.points(), nu.weights(), xi) / nu.mass();
}

namespace {

Mat moment_jacobian(const DiscreteMeasure& nu, const Vec& xi, double h) {
  const int d = nu.ambient();
  Mat jac(d, d);
  for (int k = 0; k < d; ++k) {
    Vec plus = xi, minus = xi;
    plus(k) += h;
    minus(k) -= h;
    jac.col(k) = (renormalization_moment(nu, plus) - renormalization_moment(nu, minus)) / (2.0 * h);
  }
  return jac;
}

// Largest step fraction keeping xi + t*step at most halfway to the sphere.
Vec capped_step(const Vec& xi, const Vec& step) {
  const double room = 1.0 - xi.norm();
  const double limit = 0.5 * room;
  const double len = step.norm();
  return len > limit ? Vec(step * (limit / len)) : step;
}

}  // namespace

RenormalizationPoint hersch_renormalize(const DiscreteMeasure& nu, const HerschOptions& options) {
  const int d = nu.ambient();
  Vec xi = options.initial_guess ? *options.initial_guess : Vec::Zero(d);
  if (xi.size() != d) throw std::invalid_argument("hersch_renormalize: initial guess dimension mismatch");
  if (!(xi.norm() < 1.0 - options.boundary_margin))
    throw std::invalid_argument("hersch_renormalize: initial guess outside the ball");

  if (nu.weights().maxCoeff() > 0.5 * nu.mass())
    throw BoundaryEscape("hersch_renormalize: an atom carries more than half the mass; no renormalization point");

  Vec m = renormalization_moment(nu, xi);
  double res = m.norm();
  for (int it = 0; it < options.max_iterations; ++it) {
    if (res <= options.tolerance) return {BallPoint(xi), res, it};

    const double room = 1.0 - xi.norm();
    const double h = std::min(1e-6, 1e-3 * room);
    const Mat jac = moment_jacobian(nu, xi, h);
    Eigen::ColPivHouseholderQR<Mat> qr(jac);
    Vec step = qr.rank() == d ? Vec(-qr.solve(m)) : Vec(-m);
    step = capped_step(xi, step);

    bool accepted = false;
    double t = 1.0;
    for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
      const Vec trial = xi + t * step;
      const Vec tm = renormalization_moment(nu, trial);
      if (tm.norm() < (1.0 - 1e-4 * t) * res) {
        xi = trial;
        m = tm;
        res = tm.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Moment descent: M(xi) points from the solution towards xi.
      Vec fallback = capped_step(xi, Vec(-m * (1.0 - xi.squaredNorm())));
      for (int bt = 0; bt < 40 && !accepted; ++bt, fallback *= 0.5) {
        const Vec trial = xi + fallback;
        const Vec tm = renormalization_moment(nu, trial);
        if (tm.norm() < res) {
          xi = trial;
          m = tm;
          res = tm.norm();
          accepted = true;
        }
      }
    }
    if (xi.norm() > 1.0 - options.boundary_margin) {
      std::ostringstream msg;
      msg << "hersch_renormalize: renormalization point escaped to |xi| = " << std::setprecision(17) << xi.norm()
          << " (measure too concentrated)";
      throw BoundaryEscape(msg.str());
    }
    if (!accepted) {
      // A step too small to change the residual at working precision is a converged iterate.
      if (res <= 1e3 * options.tolerance) return {BallPoint(xi), res, it + 1};
      throw NonConvergence("hersch_renormalize: no descent step at residual " + std::to_string(res));
    }
  }
  if (res <= options.tolerance) return {BallPoint(xi), res, options.max_iterations};
  std::ostringstream msg;
  msg << "hersch_renormalize: no convergence after " << options.max_iterations << " iterations, residual " << res;
  throw NonConvergence(msg.str());
}

void write_measure_csv(std::ostream& out, const DiscreteMeasure& nu) {
  for (int k = 0; k < nu.ambient(); ++k) out << 'x' << k << ',';
  out << "weight\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    for (int k = 0; k < nu.ambient(); ++k) out << nu.points()(k, i) << ',';
    out << nu.weights()(i) << '\n';
  }
}

DiscreteMeasure read_measure_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("measure CSV: missing header");
  int columns = 1;
  for (char c : line) columns += c == ',';
  if (line.rfind("x0", 0) != 0 || line.find("weight") == std::string::npos || columns < 4)
    throw std::invalid_argument("measure CSV: header must be x0,...,xn,weight");
  const int d = columns - 1;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int count = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++count;
    }
    if (count != columns) throw std::invalid_argument("measure CSV: row " + std::to_string(rows + 1) + " has wrong column count");
    ++rows;
  }
  Eigen::MatrixXd pts(d, static_cast<Eigen::Index>(rows));
  Eigen::VectorXd w(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (int k = 0; k < d; ++k) pts(k, static_cast<Eigen::Index>(r)) = values[r * columns + k];
    w(static_cast<Eigen::Index>(r)) = values[r * columns + d];
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

}  // namespace confspec
