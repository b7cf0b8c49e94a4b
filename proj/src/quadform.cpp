#include "confspec/quadform.hpp"

#include "confspec/kernels.hpp"

#include <cmath>
#include <sstream>

namespace confspec {

Mat gram(const DiscreteMeasure& nu) { return kernels::second_moment(nu.points(), nu.weights()); }

MaximalDirection maximal_direction(const Mat& q, double tol) {
  if (q.rows() != q.cols() || q.rows() < 2) throw std::invalid_argument("maximal_direction: need a square matrix");
  const Mat sym = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  const int d = static_cast<int>(sym.rows());
  MaximalDirection out;
  out.eigenvalues.resize(d);
  out.eigenvectors.resize(d, d);
  for (int k = 0; k < d; ++k) {
    out.eigenvalues(k) = eig.eigenvalues()(d - 1 - k);
    out.eigenvectors.col(k) = eig.eigenvectors().col(d - 1 - k);
  }
  out.s = out.eigenvectors.col(0).normalized();
  out.value = out.eigenvalues(0);
  out.gap = out.eigenvalues(0) - out.eigenvalues(1);
  out.multiple = out.gap <= tol * std::abs(out.value);
  return out;
}

CapFamily renormalized_family(const DiscreteMeasure& g_measure, const Cap& a, const FamilyOptions& options) {
  DiscreteMeasure lifted = lift(g_measure, a);
  RenormalizationPoint xi = hersch_renormalize(lifted, options.hersch);
  DiscreteMeasure renormalized = pushforward(lifted, MoebiusMap::moebius(xi.xi.coords()));
  MaximalDirection direction = maximal_direction(gram(renormalized), options.multiplicity_tol);
  return CapFamily{a, std::move(xi), std::move(lifted), std::move(renormalized), std::move(direction)};
}

Mat cap_orthogonal_map(const Cap& a, const Vec& xi, const Vec& xi_star) {
  const int d = a.ambient();
  Mat r(d, d);
  const Vec minus_xi = -xi;
  for (int i = 0; i < d; ++i) {
    const Vec e = unit_vector(d, i);
    r.col(i) = moebius_apply(xi_star, cap_reflection(a, moebius_apply(minus_xi, e)));
  }
  return r;
}

Claim1Report claim1_check(const CapFamily& at_a, const CapFamily& at_complement) {
  const Cap& a = at_a.cap;
  const int d = a.ambient();
  const Vec& xi = at_a.xi.xi.coords();
  const Vec& xi_star = at_complement.xi.xi.coords();
  Claim1Report rep;
  rep.xi_residual = (xi_star + cap_reflection(a, Vec(-xi))).norm();
  const Mat r = cap_orthogonal_map(a, xi, xi_star);
  rep.orthogonality_defect = (r.transpose() * r - Mat::Identity(d, d)).norm();
  rep.signed_dot = at_complement.direction.s.dot(r * at_a.direction.s);
  rep.direction_residual = 1.0 - std::abs(rep.signed_dot);
  return rep;
}

Claim1Report claim1_check(const DiscreteMeasure& g_measure, const Cap& a, const FamilyOptions& options) {
  const CapFamily fa = renormalized_family(g_measure, a, options);
  const CapFamily fc = renormalized_family(g_measure, complement(a), options);
  return claim1_check(fa, fc);
}

namespace {

class Tracker {
public:
  Tracker(const MeasureFactory& factory, const SpherePoint& p, const LiftOptions& options)
      : factory_(factory), p_(p), options_(options) {
    path_.p = p.coords();
  }

  LiftSample evaluate(double r) {
    const Cap a(r, p_);
    FamilyOptions fo = options_.family;
    if (!path_.samples.empty()) fo.hersch.initial_guess = path_.samples.back().xi;
    CapFamily fam = [&] {
      try {
        return renormalized_family(factory_(a), a, fo);
      } catch (const NumericalError&) {
        if (!fo.hersch.initial_guess) throw;
        fo.hersch.initial_guess.reset();
        return renormalized_family(factory_(a), a, fo);
      }
    }();
    if (fam.direction.multiple) {
      std::ostringstream msg;
      msg << "multiplicity encountered at r = " << r << " (relative gap " << fam.direction.gap / fam.direction.value
          << ")";
      throw MultiplicityEncountered(msg.str(), r, fam.direction.gap, path_);
    }
    LiftSample s;
    s.r = r;
    s.s = fam.direction.s;
    s.gap = fam.direction.gap;
    s.value = fam.direction.value;
    s.xi = fam.xi.xi.coords();
    return s;
  }

  void start(double r, const Vec& reference) {
    LiftSample s = evaluate(r);
    if (s.s.dot(reference) < 0.0) s.s = -s.s;
    path_.samples.push_back(std::move(s));
  }

  void advance(double r_to, int depth, bool inserted) {
    const LiftSample& prev = path_.samples.back();
    const double r_from = prev.r;
    LiftSample cand = evaluate(r_to);
    const double dot = prev.s.dot(cand.s);
    if (std::abs(dot) < options_.min_dot && depth < options_.max_halvings) {
      advance(0.5 * (r_from + r_to), depth + 1, true);
      advance(r_to, depth + 1, inserted);
      return;
    }
    if (dot < 0.0) cand.s = -cand.s;
    cand.inserted = inserted;
    path_.samples.push_back(std::move(cand));
  }

  LiftPath take() { return std::move(path_); }

private:
  const MeasureFactory& factory_;
  SpherePoint p_;
  LiftOptions options_;
  LiftPath path_;
};

}  // namespace

LiftPath track_directions(const MeasureFactory& factory, const SpherePoint& p, const std::vector<double>& r_grid,
                          const Vec& reference, const LiftOptions& options) {
  if (r_grid.empty()) throw std::invalid_argument("track_directions: empty r grid");
  if (reference.size() != p.ambient()) throw std::invalid_argument("track_directions: reference dimension mismatch");
  const bool ascending = r_grid.size() < 2 || r_grid[1] > r_grid[0];
  for (std::size_t i = 1; i < r_grid.size(); ++i) {
    if ((r_grid[i] > r_grid[i - 1]) != ascending || r_grid[i] == r_grid[i - 1])
      throw std::invalid_argument("track_directions: r grid must be strictly monotone");
  }
  Tracker tracker(factory, p, options);
  tracker.start(r_grid.front(), reference);
  for (std::size_t i = 1; i < r_grid.size(); ++i) tracker.advance(r_grid[i], 0, false);
  return tracker.take();
}

LiftPath lift_path(const MeasureFactory& factory, const SpherePoint& p, const std::vector<double>& r_grid,
                   const LiftOptions& options) {
  return track_directions(factory, p, r_grid, Vec(-unit_vector(p.ambient(), 0)), options);
}

LiftPath lift_path(const DiscreteMeasure& g_measure, const SpherePoint& p, const std::vector<double>& r_grid,
                   const LiftOptions& options) {
  const MeasureFactory fixed = [&g_measure](const Cap&) { return g_measure; };
  return lift_path(fixed, p, r_grid, options);
}

double claim2_dot(const Cap& a, const LiftSample& at_a, const LiftSample& at_complement) {
  const Mat r = cap_orthogonal_map(a, at_a.xi, at_complement.xi);
  return at_complement.s.dot(r * at_a.s);
}

}  // namespace confspec
