#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rcl/kostlan.hpp"
#include "rcl/roots.hpp"

namespace rcl {

/// A point of CP^2 stored as its canonical representative: unit Euclidean
/// norm, first nonzero coordinate real and positive.
class ProjPoint {
 public:
  ProjPoint() = default;
  explicit ProjPoint(const Eigen::Vector3cd& x);

  const Eigen::Vector3cd& coords() const { return coords_; }

 private:
  Eigen::Vector3cd coords_ = Eigen::Vector3cd::UnitX();
};

/// Fubini-Study distance on unit representatives, arccos |<p, q>|, evaluated
/// as atan2(|q - <p,q> p|, |<p,q>|) for accuracy at short range. Lines are
/// round spheres of radius 1/2 in this normalization.
template <typename Derived1, typename Derived2>
double fs_distance(const Eigen::MatrixBase<Derived1>& p, const Eigen::MatrixBase<Derived2>& q) {
  const auto inner = p.dot(q);  // conj(p) . q
  const double c = std::abs(inner);
  const double s = (q - inner * p).norm();
  return std::atan2(s, c);
}

inline double fs_distance(const ProjPoint& p, const ProjPoint& q) {
  return fs_distance(p.coords(), q.coords());
}

// ---------------------------------------------------------------------------
// CP^1, the base of the branched cover. A base point is a unit vector of C^2;
// the round unit sphere S^2 is used for meshing, related by the Hopf map.

using BasePoint = Eigen::Vector2cd;

Eigen::Vector3d sphere_from_base(const BasePoint& b);
BasePoint base_from_sphere(const Eigen::Vector3d& n);

/// Fubini-Study distance on CP^1 (half the angle on S^2).
inline double base_distance(const BasePoint& a, const BasePoint& b) { return fs_distance(a, b); }

/// Projection from a center point: the frame's third column is the center and
/// the first two columns span the base line, so fibers are
/// { frame * (b0, b1, w) : w in C }.
class Pencil {
 public:
  /// Throws PencilDegenerateError if the center lies within `clearance`
  /// (normalized value) of Z(p).
  Pencil(const Eigen::Matrix3cd& frame, const HomogeneousPoly3& p, double clearance = 1e-6);

  /// Haar-random unitary frame drawn from the seed.
  static Pencil random(const HomogeneousPoly3& p, EnsembleSeed seed, double clearance = 1e-6);

  const Eigen::Matrix3cd& frame() const { return frame_; }
  ProjPoint center() const { return ProjPoint(frame_.col(2)); }

 private:
  Eigen::Matrix3cd frame_;
};

struct FiberRoots {
  BasePoint base;
  std::vector<Complex> roots;
  double condition = 0;  // minimum pairwise root separation
};

/// A simple zero of the discriminant and the double root above it.
struct BranchPoint {
  BasePoint base;
  Eigen::Vector3d sphere;
  Complex ramification;        // fiber coordinate of the double root (w.r.t. `base`)
  std::vector<Complex> simple; // the other d-2 roots
  double min_root_gap = 0;     // distance from the double root to the nearest simple root
  double second_derivative = 0;  // |d^2p/dw^2| relative to the coefficient scale
  int multiplicity = 1;
};

struct TrackOptions {
  double residual_tolerance = 1e-10;
  double clearance = 1e-9;  // minimum base distance from the path to any branch point
  double max_step = 0.125;
  double min_step = 1e-12;
};

struct TrackResult {
  FiberRoots end;
  std::vector<int> permutation;  // start sheet index -> end sheet index
  int steps = 0;
};

/// A polynomial bound to a pencil: the transformed polynomial P(frame * Y)
/// whose fibers are univariate polynomials in Y2.
class BranchedCover {
 public:
  BranchedCover(const HomogeneousPoly3& p, const Pencil& pencil);

  int degree() const { return transformed_.degree(); }
  const HomogeneousPoly3& original() const { return original_; }
  const HomogeneousPoly3& transformed() const { return transformed_; }
  const Pencil& pencil() const { return pencil_; }

  /// Ascending coefficients of w -> P~(b0, b1, w). `b` need not be unit.
  std::vector<Complex> fiber_polynomial(const BasePoint& b) const;
  FiberRoots fiber_roots(const BasePoint& b) const;

  /// The point frame * (b0, b1, w) of CP^2, unit-normalized.
  Eigen::Vector3cd embed(const BasePoint& b, Complex w) const;

  /// Branch points of the projection Z(P) -> CP^1, computed once and cached.
  const std::vector<BranchPoint>& branch_points() const;

  /// Continues fiber roots along a polyline of base points. `start` must be
  /// the fiber over path.front(). When `avoid` is given, every segment must
  /// stay `opts.clearance` away from those branch points.
  TrackResult track(std::span<const BasePoint> path, const FiberRoots& start,
                    const TrackOptions& opts = {},
                    const std::vector<BranchPoint>* avoid = nullptr) const;

  /// Tracks the fiber over `from` toward the branch point and returns, per
  /// start sheet, the index of the fiber point it lands on: 0..d-3 for the
  /// simple roots of `branch`, d-2 for the ramification point.
  std::vector<int> track_into_branch(const FiberRoots& from, const BranchPoint& branch,
                                     const TrackOptions& opts = {}) const;

 private:
  // Continues roots along q(t) = (1-t) a + t b for t in [0, t_end]; returns the
  // roots over q(t_end).
  std::vector<Complex> continue_segment(const BasePoint& a, const BasePoint& b,
                                        std::vector<Complex> roots, double t_end,
                                        const TrackOptions& opts, int* steps) const;

  HomogeneousPoly3 original_;
  Pencil pencil_;
  HomogeneousPoly3 transformed_;
  std::vector<MultiIndex> indices_;
  mutable std::optional<std::vector<BranchPoint>> branch_cache_;
};

// Free-function forms.
FiberRoots fiber_roots(const HomogeneousPoly3& p, const Pencil& pencil, const BasePoint& b);
std::vector<BranchPoint> discriminant_points(const HomogeneousPoly3& p, const Pencil& pencil);
TrackResult track_roots(const HomogeneousPoly3& p, const Pencil& pencil,
                        std::span<const BasePoint> path, const FiberRoots& start,
                        const TrackOptions& opts = {});

/// Angular distance on the unit sphere from x to the great-circle arc a-b.
double arc_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& x);

/// One line per branch point: sphere coordinates, base coordinate, min root
/// gap, multiplicity certificate.
void write_branch_report(std::ostream& out, const std::vector<BranchPoint>& branches);

}  // namespace rcl
