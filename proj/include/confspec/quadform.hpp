#pragma once

#include "confspec/measure.hpp"
#include "confspec/moebius.hpp"

#include <functional>
#include <vector>

namespace confspec {

/// Q_ij = int x_i x_j d nu.
Mat gram(const DiscreteMeasure& nu);

struct MaximalDirection {
  Vec s;             // unit top eigenvector; sign unspecified
  double value = 0;  // top eigenvalue
  double gap = 0;    // top minus second eigenvalue
  bool multiple = false;
  Vec eigenvalues;   // descending
  Mat eigenvectors;  // columns match eigenvalues
};

inline constexpr double kMultiplicityTolerance = 1e-4;

/// Top eigenpair of a symmetric PSD matrix; multiple iff gap <= tol * value.
MaximalDirection maximal_direction(const Mat& q, double tol = kMultiplicityTolerance);

struct FamilyOptions {
  HerschOptions hersch;
  double multiplicity_tol = kMultiplicityTolerance;
};

/// The pipeline a -> (dmu_a, xi(a), dnu_a, [s(a)]).
struct CapFamily {
  Cap cap;
  RenormalizationPoint xi;
  DiscreteMeasure lifted;        // dmu_a
  DiscreteMeasure renormalized;  // dnu_a = (d_xi(a))_* dmu_a
  MaximalDirection direction;
};

CapFamily renormalized_family(const DiscreteMeasure& g_measure, const Cap& a, const FamilyOptions& options = {});

/// R_a = d_{xi*} o tau_a o d_{-xi} restricted to the sphere, as a matrix whose
/// columns are the images of the basis vectors.
Mat cap_orthogonal_map(const Cap& a, const Vec& xi, const Vec& xi_star);

struct Claim1Report {
  double xi_residual = 0;            // |xi(a*) + tau_a(-xi(a))|
  double direction_residual = 0;     // 1 - |<s(a*), R_a s(a)>|
  double orthogonality_defect = 0;   // |R_a^T R_a - I|
  double signed_dot = 0;             // <s(a*), R_a s(a)> for the raw eigenvectors
};

Claim1Report claim1_check(const DiscreteMeasure& g_measure, const Cap& a, const FamilyOptions& options = {});
Claim1Report claim1_check(const CapFamily& at_a, const CapFamily& at_complement);

/// Produces dv_g discretized for a given cap (e.g. on a cap-split grid).
using MeasureFactory = std::function<DiscreteMeasure(const Cap&)>;

struct LiftSample {
  double r = 0;
  Vec s;        // sign-tracked maximal direction
  double gap = 0;
  double value = 0;
  Vec xi;
  bool inserted = false;  // added by step halving
};

struct LiftPath {
  Vec p;
  std::vector<LiftSample> samples;
};

/// Raised when the Gram form of some dnu_a is multiple along a path.
class MultiplicityEncountered : public NumericalError {
public:
  MultiplicityEncountered(const std::string& what, double r, double gap, LiftPath partial)
      : NumericalError(what), r_(r), gap_(gap), partial_(std::move(partial)) {}
  double r() const { return r_; }
  double gap() const { return gap_; }
  const LiftPath& partial() const { return partial_; }

private:
  double r_;
  double gap_;
  LiftPath partial_;
};

struct LiftOptions {
  FamilyOptions family;
  /// Step halving kicks in when consecutive |dot| falls below this.
  double min_dot = 0.5;
  int max_halvings = 12;
};

/// Continuation of [s(a_{r,p})] along r_grid (monotone), choosing signs so that
/// consecutive directions have positive dot product. The first sample is
/// oriented by `reference` (the boundary condition s(-1, .) = -e_1 by default).
LiftPath track_directions(const MeasureFactory& factory, const SpherePoint& p, const std::vector<double>& r_grid,
                          const Vec& reference, const LiftOptions& options = {});

/// track_directions with reference -e_1 (index 0 of the ambient basis).
LiftPath lift_path(const MeasureFactory& factory, const SpherePoint& p, const std::vector<double>& r_grid,
                   const LiftOptions& options = {});
LiftPath lift_path(const DiscreteMeasure& g_measure, const SpherePoint& p, const std::vector<double>& r_grid,
                   const LiftOptions& options = {});

/// <s(a*), R_a s(a)> for tracked samples at a = a_{r,p} and a* = a_{-r,-p}; -1 under the sign relation s(a*) = -R_a s(a).
double claim2_dot(const Cap& a, const LiftSample& at_a, const LiftSample& at_complement);

}  // namespace confspec
