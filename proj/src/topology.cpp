#include "confspec/topology.hpp"

#include "confspec/constants.hpp"
#include "confspec/quadrature.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace confspec {

namespace {

// Positively oriented tangent frame at x: det[x, v_1, ..., v_n] = +1.
Mat oriented_frame(const Vec& x) {
  Mat f = frame_from_axis(x);
  if (f.determinant() < 0.0) f.col(f.cols() - 1) = -f.col(f.cols() - 1);
  return f;
}

// Ambient images Df v_k of the frame vectors by central differences.
Eigen::MatrixXd tangent_jacobian(const SampledMap& f, const Vec& x, const Mat& frame, double h) {
  const int n = f.n();
  Eigen::MatrixXd j(n + 1, n);
  for (int k = 0; k < n; ++k) {
    const Vec v = frame.col(k + 1);
    j.col(k) = (f((x + h * v).normalized()) - f((x - h * v).normalized())) / (2.0 * h);
  }
  return j;
}

double oriented_det(const Vec& fx, const Eigen::MatrixXd& jac) {
  Mat m(fx.size(), fx.size());
  m.col(0) = fx;
  m.rightCols(jac.cols()) = jac;
  return m.determinant();
}

Vec random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec v(d);
  for (int k = 0; k < d; ++k) v(k) = normal(rng);
  return v.normalized();
}

std::vector<double> approach(double start_r, double r) {
  if (r <= start_r) return {r};
  const int steps = std::max(1, static_cast<int>(std::ceil((r - start_r) / 0.05)));
  std::vector<double> out(steps + 1);
  for (int i = 0; i <= steps; ++i) out[i] = start_r + (r - start_r) * i / steps;
  return out;
}

}  // namespace

SampledMap::SampledMap(int n, std::string name, Rule rule, bool smooth)
    : n_(n), name_(std::move(name)), rule_(std::move(rule)), smooth_(smooth) {
  if (n < 1 || n + 1 > kMaxAmbient) throw std::invalid_argument("SampledMap: unsupported dimension");
}

SampledMap SampledMap::identity(int n) {
  return SampledMap(n, "identity", [](const Vec& x) { return x; });
}

SampledMap SampledMap::antipodal(int n) {
  return SampledMap(n, "antipodal", [](const Vec& x) { return Vec(-x); });
}

SampledMap SampledMap::orthogonal(const Mat& q, std::string name) {
  if (q.rows() != q.cols()) throw std::invalid_argument("SampledMap::orthogonal: need a square matrix");
  if ((q.transpose() * q - Mat::Identity(q.rows(), q.cols())).norm() > 1e-10)
    throw std::invalid_argument("SampledMap::orthogonal: matrix is not orthogonal");
  return SampledMap(static_cast<int>(q.rows()) - 1, std::move(name), [q](const Vec& x) { return Vec(q * x); });
}

SampledMap SampledMap::interpolate(const Eigen::MatrixXd& points, const Eigen::MatrixXd& values, double bandwidth,
                                   std::string name) {
  if (points.rows() != values.rows() || points.cols() != values.cols() || points.cols() == 0)
    throw std::invalid_argument("SampledMap::interpolate: points and values must pair up");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("SampledMap::interpolate: bandwidth must be positive");
  const double cutoff = std::cos(std::min(4.0 * bandwidth, std::numbers::pi));
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  auto rule = [points, values, cutoff, inv](const Vec& x) {
    Vec acc = Vec::Zero(x.size());
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
      const double c = std::clamp(points.col(i).dot(x), -1.0, 1.0);
      if (c < cutoff) continue;
      const double theta = std::acos(c);
      acc += std::exp(-theta * theta * inv) * values.col(i);
    }
    const double norm = acc.norm();
    if (!(norm > 1e-12)) throw NumericalError("interpolated map: kernel average vanishes");
    return Vec(acc / norm);
  };
  return SampledMap(static_cast<int>(points.rows()) - 1, std::move(name), rule, false);
}

SampledMap SampledMap::blend(const SampledMap& f, const SampledMap& g, double t) {
  if (f.n() != g.n()) throw std::invalid_argument("SampledMap::blend: dimension mismatch");
  std::ostringstream name;
  name << "blend(" << f.name() << ", " << g.name() << ", " << t << ")";
  return SampledMap(f.n(), name.str(), [f, g, t](const Vec& x) {
    const Vec v = (1.0 - t) * f(x) + t * g(x);
    const double norm = v.norm();
    if (!(norm > 1e-12)) throw NumericalError("blend: maps are antipodal at a sample point");
    return Vec(v / norm);
  });
}

Vec SampledMap::operator()(const Vec& x) const {
  Vec y = rule_(x);
  if (y.size() != ambient() || std::abs(y.norm() - 1.0) > 1e-8)
    throw NumericalError("SampledMap " + name_ + ": output is not a unit vector");
  return y;
}

SampledMap SampledMap::precompose(const Mat& r) const {
  const SampledMap self = *this;
  return SampledMap(n_, name_ + " o R", [self, r](const Vec& x) { return self(Vec(r * x)); }, smooth_);
}

std::string to_string(DegreeMethod m) {
  return m == DegreeMethod::JacobianIntegral ? "jacobian-integral" : "preimage-count";
}

DegreeReport preimage_degree(const SampledMap& f, const Vec& y, int seed_order) {
  const int n = f.n();
  const QuadratureGrid seeds = sphere_grid(n, seed_order);
  const double h = 1e-6;
  std::vector<Vec> roots;
  int signed_count = 0;
  for (Eigen::Index i = 0; i < seeds.size(); ++i) {
    Vec x = seeds.nodes.col(i);
    if ((f(x) - y).norm() > 0.5) continue;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      const Vec fx = f(x);
      const Vec res = y - fx;
      if (res.norm() < 1e-11) {
        converged = true;
        break;
      }
      const Mat frame = oriented_frame(x);
      const Eigen::MatrixXd jac = tangent_jacobian(f, x, frame, h);
      const Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(tangent_part(fx, res));
      Vec step = frame.rightCols(n) * delta;
      if (step.norm() > 0.3) step *= 0.3 / step.norm();
      x = (x + step).normalized();
    }
    if (!converged) continue;
    const bool seen = std::any_of(roots.begin(), roots.end(), [&](const Vec& r) { return (r - x).norm() < 1e-6; });
    if (seen) continue;
    roots.push_back(x);
    const double det = oriented_det(f(x), tangent_jacobian(f, x, oriented_frame(x), h));
    if (std::abs(det) < 1e-8) throw NonIntegerDegree("preimage count: sampled value is not regular", 0.0);
    signed_count += det > 0.0 ? 1 : -1;
  }
  DegreeReport rep;
  rep.degree = signed_count;
  rep.raw_integral = signed_count;
  rep.method = DegreeMethod::PreimageCount;
  rep.grid_order = seed_order;
  rep.preimages = static_cast<int>(roots.size());
  return rep;
}

DegreeReport degree(const SampledMap& f, const DegreeOptions& options) {
  const Dimension n(f.n());
  const int order = options.grid_order > 0 ? options.grid_order : (n == 2 ? 80 : 40);
  const Cap equator(0.0, SpherePoint(unit_vector(n + 1, 0)));
  const QuadratureGrid grid = cap_split_grid(n, equator, order);

  Eigen::VectorXd integrand(grid.size());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Vec x = grid.nodes.col(i);
    const Mat frame = oriented_frame(x);
    integrand(i) = grid.weights(i) * oriented_det(f(x), tangent_jacobian(f, x, frame, options.fd_step));
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) total += integrand(i);

  DegreeReport rep;
  rep.raw_integral = total / sphere_volume(n);
  rep.degree = static_cast<int>(std::lround(rep.raw_integral));
  rep.rounding_gap = std::abs(rep.raw_integral - rep.degree);
  rep.method = DegreeMethod::JacobianIntegral;
  rep.grid_order = order;
  if (rep.rounding_gap >= options.max_gap) {
    std::ostringstream msg;
    msg << "degree integral of " << f.name() << " is not near an integer: " << rep.raw_integral;
    throw NonIntegerDegree(msg.str(), rep.raw_integral);
  }
  if (options.cross_check) {
    std::mt19937_64 rng(options.seed);
    try {
      const DegreeReport pc = preimage_degree(f, random_unit(n + 1, rng));
      rep.cross_check = pc.degree;
      rep.preimages = pc.preimages;
    } catch (const NumericalError&) {
      // Cross-check only; the integral stands.
    }
  }
  return rep;
}

double equivariance_residual(const SampledMap& f, int grid_order) {
  const QuadratureGrid grid = sphere_grid(f.n(), grid_order);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Vec p = grid.nodes.col(i);
    worst = std::max(worst, (f(Vec(-p)) - reflection(p, f(p))).norm());
  }
  return worst;
}

Claim3Report claim3_verify(const SampledMap& f, double residual_gate, const DegreeOptions& options) {
  Claim3Report rep;
  rep.residual = equivariance_residual(f);
  rep.equivariant = rep.residual <= residual_gate;
  rep.degree = degree(f, options);
  const int deg = rep.degree.degree;
  rep.holds = f.n() % 2 == 0 ? (deg % 2 != 0) : deg == 1;
  return rep;
}

namespace {

// Extends f~ from the closed upper hemisphere x_0 >= 0 by f(x) = R_x f~(-x).
// f~ must equal the identity on the equator for continuity.
SampledMap hemisphere_extension(int n, std::string name, std::function<Vec(const Vec&)> upper) {
  return SampledMap(n, std::move(name), [upper](const Vec& x) {
    if (x(0) >= 0.0) return upper(x);
    return reflection(x, upper(Vec(-x)));
  });
}

Vec smooth_field(const Vec& x) {
  const int d = static_cast<int>(x.size());
  Vec c(d);
  for (int k = 0; k < d; ++k) c(k) = std::sin(2.0 * x((k + 1) % d) + 0.7 * k) + x(k) * x((k + 2) % d);
  return c;
}

Mat rotation_in_plane(int d, int i, int j, double angle) {
  Mat q = Mat::Identity(d, d);
  q(i, i) = std::cos(angle);
  q(j, j) = std::cos(angle);
  q(i, j) = -std::sin(angle);
  q(j, i) = std::sin(angle);
  return q;
}

}  // namespace

std::vector<SampledMap> equivariant_sample_maps(int n) {
  if (n != 2 && n != 3) throw std::invalid_argument("equivariant_sample_maps: n must be 2 or 3");
  const int d = n + 1;
  std::vector<SampledMap> maps;
  maps.push_back(SampledMap::identity(n));
  maps.push_back(SampledMap::antipodal(n));

  // normalize(lambda(x) x + X(x)) with lambda even and X an even tangent field.
  Mat skew = Mat::Zero(d, d);
  skew(1, 2) = 1.0;
  skew(2, 1) = -1.0;
  skew(0, d - 1) = 0.5;
  skew(d - 1, 0) = -0.5;
  Vec b = Vec::Zero(d);
  b(0) = 0.6;
  b(1) = 0.8;
  maps.emplace_back(n, "twisted identity", [skew, b](const Vec& x) {
    return Vec((x + 1.5 * x.dot(b) * tangent_part(x, skew * x)).normalized());
  });
  Vec c = Vec::Zero(d);
  for (int k = 0; k < d; ++k) c(k) = 0.3 + 0.2 * k * (k % 2 == 0 ? 1 : -1);
  maps.emplace_back(n, "drifted identity", [c](const Vec& x) { return Vec((x + tangent_part(x, c)).normalized()); });
  maps.emplace_back(n, "drifted antipodal", [c](const Vec& x) { return Vec((-x + tangent_part(x, c)).normalized()); });
  maps.emplace_back(n, "folded", [d](const Vec& x) {
    const Vec e0 = unit_vector(d, 0);
    return Vec(((x(0) * x(0) - 0.25) * x + 0.5 * tangent_part(x, e0)).normalized());
  });

  // Hemisphere extensions of perturbations of the identity.
  for (double eps : {0.3, 1.5}) {
    std::ostringstream name;
    name << "hemisphere perturbation " << eps;
    maps.push_back(hemisphere_extension(n, name.str(), [eps](const Vec& x) {
      return Vec((x + eps * x(0) * x(0) * tangent_part(x, smooth_field(x))).normalized());
    }));
  }
  const Mat q = rotation_in_plane(d, 1, 2, 1.1) * rotation_in_plane(d, 0, d - 1, 0.4);
  maps.push_back(hemisphere_extension(n, "hemisphere rotation", [q](const Vec& x) {
    return Vec((x + 2.0 * x(0) * x(0) * tangent_part(x, q * x - x)).normalized());
  }));
  // Polar angle theta -> 5 theta on the upper hemisphere: folds twice over, equal to x on the equator.
  maps.push_back(hemisphere_extension(n, "hemisphere wrap", [d](const Vec& x) {
    const double theta = std::acos(std::clamp(x(0), -1.0, 1.0));
    const Vec rest = x.tail(d - 1);
    const double rn = rest.norm();
    Vec y(d);
    y(0) = std::cos(5.0 * theta);
    y.tail(d - 1) = rn > 1e-15 ? Vec(std::sin(5.0 * theta) * rest / rn) : Vec(Vec::Zero(d - 1));
    return Vec(y.normalized());
  }));
  return maps;
}

LiftMapSamples sample_lift_map(const MeasureFactory& factory, const Eigen::MatrixXd& points, const LiftOptions& options,
                               double start_r) {
  LiftMapSamples out;
  std::vector<Vec> ps, fs;
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const SpherePoint p(points.col(i));
    try {
      const LiftPath path = lift_path(factory, p, approach(start_r, 0.0), options);
      ps.push_back(p.coords());
      fs.push_back(path.samples.back().s);
    } catch (const MultiplicityEncountered& m) {
      out.multiple_at.push_back(p.coords());
      out.multiple_r.push_back(m.r());
    }
  }
  const int d = static_cast<int>(points.rows());
  out.points.resize(d, static_cast<Eigen::Index>(ps.size()));
  out.values.resize(d, static_cast<Eigen::Index>(fs.size()));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    out.points.col(static_cast<Eigen::Index>(i)) = ps[i];
    out.values.col(static_cast<Eigen::Index>(i)) = fs[i];
  }
  return out;
}

}  // namespace confspec
