#include "confspec/moebius.hpp"

#include <cmath>
#include <string>

namespace confspec {

namespace {

constexpr double kSphereTol = 1e-12;

bool on_sphere(const Vec& x) { return std::abs(x.squaredNorm() - 1.0) < 1e-10; }

}  // namespace

SpherePoint::SpherePoint(const Vec& coords) : x_(coords) {
  const double norm = x_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw std::invalid_argument("SpherePoint: zero or non-finite vector");
  if (x_.size() < 3 || x_.size() > kMaxAmbient)
    throw std::invalid_argument("SpherePoint: ambient dimension must be in [3, 5]");
  if (std::abs(norm - 1.0) > kSphereTol) x_ /= norm;
}

BallPoint::BallPoint(const Vec& coords) : x_(coords) {
  if (!(x_.norm() < 1.0)) throw std::invalid_argument("BallPoint: |xi| must be < 1");
}

Cap::Cap(double r, const SpherePoint& p) : r_(r), p_(p) {
  if (!(std::abs(r) <= kMaxAbsRadius))
    throw std::invalid_argument("Cap: |r| must be <= 1 - 1e-6, got " + std::to_string(r));
}

Vec moebius_apply(const Vec& xi, const Vec& x) {
  const double xx = x.squaredNorm();
  const double xd = xi.dot(x);
  const double xi2 = xi.squaredNorm();
  const double den = 1.0 + 2.0 * xd + xx * xi2;
  if (std::abs(den) < 1e-14) throw NumericalError("moebius_apply: near-singular denominator");
  Vec out = ((1.0 - xi2) * x + (1.0 + 2.0 * xd + xx) * xi) / den;
  if (std::abs(xx - 1.0) < 1e-10) out.normalize();
  return out;
}

SpherePoint moebius_apply(const BallPoint& xi, const SpherePoint& x) {
  return SpherePoint(moebius_apply(xi.coords(), x.coords()));
}

BallPoint moebius_apply(const BallPoint& xi, const BallPoint& x) {
  return BallPoint(moebius_apply(xi.coords(), x.coords()));
}

Mat moebius_jacobian(const Vec& xi, const Vec& x) {
  const int d = static_cast<int>(x.size());
  const double xx = x.squaredNorm();
  const double xd = xi.dot(x);
  const double xi2 = xi.squaredNorm();
  const double den = 1.0 + 2.0 * xd + xx * xi2;
  if (std::abs(den) < 1e-14) throw NumericalError("moebius_jacobian: near-singular denominator");
  const Vec num = (1.0 - xi2) * x + (1.0 + 2.0 * xd + xx) * xi;
  const Vec out = num / den;
  const Vec grad_den = 2.0 * xi + 2.0 * xi2 * x;
  Mat dnum = (1.0 - xi2) * Mat::Identity(d, d) + xi * (2.0 * xi + 2.0 * x).transpose();
  return (dnum - out * grad_den.transpose()) / den;
}

Vec reflection(const Vec& p, const Vec& x) { return x - 2.0 * p.dot(x) * p; }

Mat reflection_matrix(const Vec& p) {
  const int d = static_cast<int>(p.size());
  return Mat::Identity(d, d) - 2.0 * p * p.transpose();
}

Vec cap_reflection(const Cap& a, const Vec& x) {
  const Vec& p = a.p().coords();
  const Vec center = a.r() * p;
  Vec y = moebius_apply(Vec(-center), x);
  y = reflection(p, y);
  Vec out = moebius_apply(center, y);
  if (on_sphere(x)) out.normalize();
  return out;
}

SpherePoint cap_reflection(const Cap& a, const SpherePoint& x) {
  return SpherePoint(cap_reflection(a, x.coords()));
}

Mat cap_reflection_jacobian(const Cap& a, const Vec& x) {
  const Vec& p = a.p().coords();
  const Vec center = a.r() * p;
  const Vec y1 = moebius_apply(Vec(-center), x);
  const Vec y2 = reflection(p, y1);
  return moebius_jacobian(center, y2) * reflection_matrix(p) * moebius_jacobian(Vec(-center), x);
}

double cap_margin(const Cap& a, const Vec& x) {
  const Vec& p = a.p().coords();
  return moebius_apply(Vec(-a.r() * p), x).dot(p);
}

bool cap_contains(const Cap& a, const SpherePoint& x) { return cap_margin(a, x.coords()) > 0.0; }

Cap complement(const Cap& a) { return Cap(-a.r(), SpherePoint(-a.p().coords())); }

double conformal_factor(const Vec& xi, const Vec& x) {
  const double xi2 = xi.squaredNorm();
  return (1.0 - xi2) / (1.0 + 2.0 * xi.dot(x) + xi2);
}

double conformal_factor(const BallPoint& xi, const SpherePoint& x) {
  return conformal_factor(xi.coords(), x.coords());
}

double cap_reflection_factor(const Cap& a, const Vec& x) {
  const Vec& p = a.p().coords();
  const Vec center = a.r() * p;
  const Vec y1 = moebius_apply(Vec(-center), x);
  return conformal_factor(Vec(-center), x) * conformal_factor(center, reflection(p, y1));
}

Mat frame_from_axis(const Vec& q) {
  const int d = static_cast<int>(q.size());
  Vec v = unit_vector(d, 0) - q;
  const double vv = v.squaredNorm();
  if (vv < 1e-24) return Mat::Identity(d, d);
  return Mat::Identity(d, d) - (2.0 / vv) * v * v.transpose();
}

Vec canonical_axis(const Vec& p) {
  for (int i = 0; i < p.size(); ++i) {
    if (std::abs(p(i)) > 1e-12) return p(i) > 0.0 ? p : Vec(-p);
  }
  return p;
}

}  // namespace confspec

namespace confspec {

MoebiusMap MoebiusMap::moebius(const Vec& xi) {
  if (!(xi.norm() < 1.0)) throw std::invalid_argument("MoebiusMap: |xi| must be < 1");
  MoebiusMap m(static_cast<int>(xi.size()));
  m.steps_.push_back({Kind::Moebius, xi, Mat()});
  return m;
}

MoebiusMap MoebiusMap::reflection(const Vec& p) {
  MoebiusMap m(static_cast<int>(p.size()));
  m.steps_.push_back({Kind::Linear, Vec(), reflection_matrix(p.normalized())});
  return m;
}

MoebiusMap MoebiusMap::orthogonal(const Mat& q) {
  const int d = static_cast<int>(q.rows());
  if ((q.transpose() * q - Mat::Identity(d, d)).norm() > 1e-10)
    throw std::invalid_argument("MoebiusMap: matrix is not orthogonal");
  MoebiusMap m(d);
  m.steps_.push_back({Kind::Linear, Vec(), q});
  return m;
}

MoebiusMap MoebiusMap::cap_reflection(const Cap& a) {
  const Vec center = a.r() * a.p().coords();
  return moebius(Vec(-center)).then(reflection(a.p().coords())).then(moebius(center));
}

MoebiusMap MoebiusMap::then(const MoebiusMap& other) const {
  if (other.ambient_ != ambient_) throw std::invalid_argument("MoebiusMap: dimension mismatch");
  MoebiusMap m = *this;
  m.steps_.insert(m.steps_.end(), other.steps_.begin(), other.steps_.end());
  return m;
}

MoebiusMap MoebiusMap::inverse() const {
  MoebiusMap m(ambient_);
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    if (it->kind == Kind::Moebius) m.steps_.push_back({Kind::Moebius, Vec(-it->xi), Mat()});
    else m.steps_.push_back({Kind::Linear, Vec(), it->q.transpose()});
  }
  return m;
}

Vec MoebiusMap::apply(const Vec& x) const {
  Vec y = x;
  for (const Step& s : steps_) y = s.kind == Kind::Moebius ? moebius_apply(s.xi, y) : Vec(s.q * y);
  return y;
}

double MoebiusMap::factor(const Vec& x) const { return std::exp(log_factor(x)); }

double MoebiusMap::log_factor(const Vec& x) const {
  Vec y = x;
  double acc = 0.0;
  for (const Step& s : steps_) {
    if (s.kind == Kind::Moebius) {
      acc += std::log(conformal_factor(s.xi, y));
      y = moebius_apply(s.xi, y);
    } else {
      y = s.q * y;
    }
  }
  return acc;
}

}  // namespace confspec
