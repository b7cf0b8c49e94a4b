#pragma once

#include "confspec/types.hpp"

#include <vector>

namespace confspec {

/// Unit vector of R^{n+1}; renormalized on construction.
class SpherePoint {
public:
  explicit SpherePoint(const Vec& coords);
  const Vec& coords() const { return x_; }
  int ambient() const { return static_cast<int>(x_.size()); }
  double operator()(int i) const { return x_(i); }

private:
  Vec x_;
};

/// Interior point of the open unit ball B^{n+1}.
class BallPoint {
public:
  explicit BallPoint(const Vec& coords);
  static BallPoint origin(int ambient) { return BallPoint(Vec::Zero(ambient)); }
  const Vec& coords() const { return x_; }
  int ambient() const { return static_cast<int>(x_.size()); }
  double norm() const { return x_.norm(); }

private:
  Vec x_;
};

/// Spherical cap a_{r,p} = d_{rp}({x : x.p > 0}), r in (-1, 1).
class Cap {
public:
  /// Radii with |r| > 1 - 1e-6 are rejected.
  static constexpr double kMaxAbsRadius = 1.0 - 1e-6;

  Cap(double r, const SpherePoint& p);
  double r() const { return r_; }
  const SpherePoint& p() const { return p_; }
  int ambient() const { return p_.ambient(); }
  /// The cap is {x : x.p > height()} with height = 2r / (1 + r^2).
  double height() const { return 2.0 * r_ / (1.0 + r_ * r_); }

private:
  double r_;
  SpherePoint p_;
};

/// d_xi on the closed ball. The output is renormalized when |x| = 1.
Vec moebius_apply(const Vec& xi, const Vec& x);
SpherePoint moebius_apply(const BallPoint& xi, const SpherePoint& x);
BallPoint moebius_apply(const BallPoint& xi, const BallPoint& x);

/// Ambient Jacobian of the rational map d_xi at x.
Mat moebius_jacobian(const Vec& xi, const Vec& x);

/// R_p(x) = x - 2 (p.x) p.
Vec reflection(const Vec& p, const Vec& x);
Mat reflection_matrix(const Vec& p);

/// tau_a = d_{rp} o R_p o d_{-rp}; defined on the closed ball.
Vec cap_reflection(const Cap& a, const Vec& x);
SpherePoint cap_reflection(const Cap& a, const SpherePoint& x);
Mat cap_reflection_jacobian(const Cap& a, const Vec& x);

/// Signed membership margin d_{-rp}(x).p; positive inside a.
double cap_margin(const Cap& a, const Vec& x);
bool cap_contains(const Cap& a, const SpherePoint& x);

/// a_{r,p}^* = a_{-r,-p}.
Cap complement(const Cap& a);

/// lambda with (d_xi)^* g0 = lambda^2 g0 on the sphere: (1 - |xi|^2) / |x + xi|^2.
double conformal_factor(const Vec& xi, const Vec& x);
double conformal_factor(const BallPoint& xi, const SpherePoint& x);

/// Conformal factor of tau_a at a sphere point.
double cap_reflection_factor(const Cap& a, const Vec& x);

/// Orthogonal projection of v onto the tangent space at the unit vector x.
inline Vec tangent_part(const Vec& x, const Vec& v) { return v - x.dot(v) * x; }

/// Orthonormal frame whose first column is the unit vector q (Householder completion).
Mat frame_from_axis(const Vec& q);

/// Canonical representative of the line [p]: first nonzero coordinate positive.
Vec canonical_axis(const Vec& p);

/// Composite of d_xi maps, hyperplane reflections and orthogonal maps,
/// applied in the order the steps were appended.
class MoebiusMap {
public:
  explicit MoebiusMap(int ambient) : ambient_(ambient) {}

  static MoebiusMap identity(int ambient) { return MoebiusMap(ambient); }
  static MoebiusMap moebius(const Vec& xi);
  static MoebiusMap reflection(const Vec& p);
  static MoebiusMap orthogonal(const Mat& q);
  /// tau_a as the three-step composite d_{rp} o R_p o d_{-rp}.
  static MoebiusMap cap_reflection(const Cap& a);

  /// x -> other(this(x)).
  MoebiusMap then(const MoebiusMap& other) const;
  MoebiusMap inverse() const;

  Vec apply(const Vec& x) const;
  Vec operator()(const Vec& x) const { return apply(x); }
  /// Conformal factor on the sphere (product over the Moebius steps).
  double factor(const Vec& x) const;
  /// log of factor(x), accumulated step by step.
  double log_factor(const Vec& x) const;

  int ambient() const { return ambient_; }
  bool is_identity() const { return steps_.empty(); }
  std::size_t step_count() const { return steps_.size(); }

private:
  enum class Kind { Moebius, Linear };
  struct Step {
    Kind kind;
    Vec xi;  // Moebius
    Mat q;   // Linear (reflection or orthogonal)
  };
  int ambient_;
  std::vector<Step> steps_;
};

}  // namespace confspec
