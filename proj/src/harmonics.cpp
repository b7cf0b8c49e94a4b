#include "confspec/harmonics.hpp"

#include "confspec/quadrature.hpp"

#include <map>
#include <mutex>

namespace confspec {

namespace {

double binomial(int top, int bottom) {
  if (bottom < 0 || top < 0 || bottom > top) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= bottom; ++i) r = r * (top - bottom + i) / i;
  return r;
}

struct Entry {
  int degree;
  double value;
  Vec grad;  // over the variables of the current level
};

// Solid harmonics of degree <= L in the d trailing coordinates of x.
void solid_level(const Vec& x, int first, int L, std::vector<Entry>& out) {
  const int d = static_cast<int>(x.size()) - first;
  out.clear();
  if (d == 2) {
    const double u = x(first), v = x(first + 1);
    double re = 1.0, im = 0.0;  // z^m
    double re_prev = 0.0, im_prev = 0.0;  // z^{m-1}
    for (int m = 0; m <= L; ++m) {
      if (m > 0) {
        re_prev = re;
        im_prev = im;
        const double nre = re * u - im * v;
        const double nim = re * v + im * u;
        re = nre;
        im = nim;
      }
      Entry c{m, re, Vec::Zero(2)};
      if (m > 0) c.grad << m * re_prev, -m * im_prev;
      out.push_back(c);
      if (m > 0) {
        Entry s{m, im, Vec::Zero(2)};
        s.grad << m * im_prev, m * re_prev;
        out.push_back(s);
      }
    }
    return;
  }

  std::vector<Entry> inner;
  solid_level(x, first + 1, L, inner);
  const Vec local = x.segment(first, d);
  const double t = local(0);
  const double r2 = local.squaredNorm();

  // Homogenized Gegenbauer polynomials P_k^{lambda} and gradients, per inner degree m.
  std::vector<std::vector<double>> pv(L + 1);
  std::vector<std::vector<Vec>> pg(L + 1);
  for (int m = 0; m <= L; ++m) {
    const double lambda = m + 0.5 * (d - 2);
    const int kmax = L - m;
    pv[m].assign(kmax + 1, 0.0);
    pg[m].assign(kmax + 1, Vec::Zero(d));
    pv[m][0] = 1.0;
    if (kmax >= 1) {
      pv[m][1] = 2.0 * lambda * t;
      pg[m][1](0) = 2.0 * lambda;
    }
    for (int k = 2; k <= kmax; ++k) {
      const double a = 2.0 * (k + lambda - 1.0);
      const double b = k + 2.0 * lambda - 2.0;
      pv[m][k] = (a * t * pv[m][k - 1] - b * r2 * pv[m][k - 2]) / k;
      Vec g = a * t * pg[m][k - 1] - b * r2 * pg[m][k - 2] - 2.0 * b * pv[m][k - 2] * local;
      g(0) += a * pv[m][k - 1];
      pg[m][k] = g / k;
    }
  }

  for (int l = 0; l <= L; ++l) {
    for (const Entry& e : inner) {
      if (e.degree > l) continue;
      const int k = l - e.degree;
      const double p = pv[e.degree][k];
      Entry out_e{l, p * e.value, e.value * pg[e.degree][k]};
      out_e.grad.tail(d - 1) += p * e.grad;
      out.push_back(std::move(out_e));
    }
  }
}

}  // namespace

int HarmonicBasis::harmonic_dimension(int n, int l) {
  if (l < 0) return 0;
  return static_cast<int>(binomial(l + n, n) - binomial(l + n - 2, n) + 0.5);
}

int HarmonicBasis::basis_dimension(int n, int L) {
  int total = 0;
  for (int l = 0; l <= L; ++l) total += harmonic_dimension(n, l);
  return total;
}

HarmonicBasis::HarmonicBasis(int n, int max_degree) : n_(n), max_degree_(max_degree) {
  if (n < 2 || n + 1 > kMaxAmbient) throw std::invalid_argument("HarmonicBasis: n must be in [2, 4]");
  if (max_degree < 0) throw std::invalid_argument("HarmonicBasis: degree must be >= 0");

  const QuadratureGrid g = sphere_grid(n, 2 * max_degree + 2);
  std::vector<Entry> entries;
  Eigen::VectorXd norms;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    solid_level(g.nodes.col(i), 0, max_degree, entries);
    if (i == 0) {
      degrees_.reserve(entries.size());
      for (const Entry& e : entries) degrees_.push_back(e.degree);
      norms = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(entries.size()));
    }
    for (std::size_t k = 0; k < entries.size(); ++k) norms(k) += g.weights(i) * entries[k].value * entries[k].value;
  }
  scale_ = norms.cwiseSqrt().cwiseInverse();
  if (size() != basis_dimension(n, max_degree)) throw std::logic_error("HarmonicBasis: dimension mismatch");
}

void HarmonicBasis::values(const Vec& x, Eigen::Ref<Eigen::VectorXd> out) const {
  thread_local std::vector<Entry> entries;
  solid_level(x, 0, max_degree_, entries);
  for (int k = 0; k < size(); ++k) out(k) = scale_(k) * entries[k].value;
}

void HarmonicBasis::values_and_gradients(const Vec& x, Eigen::Ref<Eigen::VectorXd> vals,
                                         Eigen::Ref<Eigen::MatrixXd> grads) const {
  thread_local std::vector<Entry> entries;
  solid_level(x, 0, max_degree_, entries);
  for (int k = 0; k < size(); ++k) {
    const double v = entries[k].value;
    vals(k) = scale_(k) * v;
    // Homogeneous of degree l: the radial derivative is l * value.
    grads.col(k) = scale_(k) * (entries[k].grad - degrees_[k] * v * x);
  }
}

std::shared_ptr<const HarmonicBasis> HarmonicBasis::cached(int n, int max_degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const HarmonicBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, max_degree}];
  if (!slot) slot = std::make_shared<const HarmonicBasis>(n, max_degree);
  return slot;
}

}  // namespace confspec
