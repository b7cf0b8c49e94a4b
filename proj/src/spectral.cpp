#include "confspec/spectral.hpp"

#include "confspec/kernels.hpp"

#include <cmath>

namespace confspec {

double SpectrumReport::invariant(int k) const {
  if (k < 0 || k >= static_cast<int>(eigenvalues.size()))
    throw std::invalid_argument("SpectrumReport: eigenvalue index out of range");
  return eigenvalues[static_cast<std::size_t>(k)] * std::pow(volume, 2.0 / n);
}

double lambda_invariant(const SpectrumReport& report, int k) { return report.invariant(k); }

int default_basis_degree(int n) { return n == 2 ? 15 : 10; }

int default_spectral_grid_order(int n, int basis_degree) { return 2 * basis_degree + (n == 2 ? 20 : 10); }

SpectrumReport spectrum(const ConformalMetric& g, int basis_degree, int k_max, int grid_order) {
  const int n = g.n();
  if (basis_degree < g.lw() + 2)
    throw std::invalid_argument("spectrum: basis degree must be >= L_w + 2");
  const auto basis = HarmonicBasis::cached(n, basis_degree);
  const int dim = basis->size();
  if (k_max < 0 || k_max >= dim) throw std::invalid_argument("spectrum: k_max must be < basis dimension");
  if (grid_order <= 0) grid_order = default_spectral_grid_order(n, basis_degree);

  const QuadratureGrid grid = sphere_grid(n, grid_order);
  const Eigen::Index nodes = grid.size();
  const int d = n + 1;

  // Assemble in node chunks so the basis tables stay small.
  constexpr Eigen::Index kChunk = 2048;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, dim);
  double volume = 0.0;
  for (Eigen::Index begin = 0; begin < nodes; begin += kChunk) {
    const Eigen::Index len = std::min(kChunk, nodes - begin);
    Eigen::MatrixXd phi(len, dim);
    std::vector<Eigen::MatrixXd> grads(static_cast<std::size_t>(d), Eigen::MatrixXd(len, dim));
    Eigen::VectorXd logf(len);
#pragma omp parallel
    {
      Eigen::VectorXd vals(dim);
      Eigen::MatrixXd gr(d, dim);
#pragma omp for schedule(static)
      for (Eigen::Index i = 0; i < len; ++i) {
        const Vec x = grid.nodes.col(begin + i);
        basis->values_and_gradients(x, vals, gr);
        phi.row(i) = vals.transpose();
        for (int c = 0; c < d; ++c) grads[static_cast<std::size_t>(c)].row(i) = gr.row(c);
        logf(i) = g.log_factor(x);
      }
    }
    const Eigen::VectorXd w = grid.weights.segment(begin, len);
    const Eigen::VectorXd mass_w = w.array() * (n * logf.array()).exp();
    const Eigen::VectorXd stiff_w = w.array() * ((n - 2) * logf.array()).exp();
    volume += mass_w.sum();
    b += kernels::weighted_gram(phi, mass_w);
    for (int c = 0; c < d; ++c) a += kernels::weighted_gram(grads[static_cast<std::size_t>(c)], stiff_w);
  }

  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success)
    throw NumericalError("spectrum: mass matrix is not positive definite (quadrature too coarse?)");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, b, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (eig.info() != Eigen::Success) throw NumericalError("spectrum: generalized eigensolver failed");

  SpectrumReport rep;
  rep.n = n;
  rep.basis_degree = basis_degree;
  rep.grid_order = grid_order;
  rep.volume = volume;
  rep.eigenvalues.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + k_max + 1);
  return rep;
}

NormalizedMetric normalize(const ConformalMetric& g, const NormalizeOptions& options) {
  const int n = g.n();
  const int d = n + 1;
  const QuadratureGrid grid = sphere_grid(n, options.grid_order);

  const DiscreteMeasure dv = metric_measure(g, grid);
  const double volume = dv.mass();
  const RenormalizationPoint rp = hersch_renormalize(dv, options.hersch);

  // Pulling back by d_{-xi} pushes dv_g forward by d_xi, which is balanced.
  const ConformalMetric balanced = g.pulled_back(MoebiusMap::moebius(Vec(-rp.xi.coords())));
  const MaximalDirection top = maximal_direction(gram(pushforward(dv, MoebiusMap::moebius(rp.xi.coords()))),
                                                 options.multiplicity_tol);

  Mat q = frame_from_axis(top.s);
  if (q.determinant() < 0.0) q.col(d - 1) = -q.col(d - 1);
  const double log_c = -std::log(volume) / n;
  ConformalMetric normalized = balanced.pulled_back(MoebiusMap::orthogonal(q)).scaled(log_c);

  const DiscreteMeasure check = metric_measure(normalized, grid);
  MaximalDirection dir = maximal_direction(gram(check), options.multiplicity_tol);

  return NormalizedMetric{std::move(normalized), g, rp.xi, q, log_c, volume, dir, dir.multiple};
}

}  // namespace confspec
