#pragma once

#include <memory>
#include <random>
#include <vector>

#include "vifix/sampling.hpp"
#include "vifix/space.hpp"

namespace vifix {

/// Analytic description of a nonempty closed convex subset of R^d together
/// with its metric projection. Primitive kinds have exact closed-form
/// projections; intersections are projected with Dykstra's algorithm.
///
/// Values are immutable and cheap to copy.
class ConvexSet {
 public:
  enum class Kind { halfspace, ball, box, affine, intersection };

  /// {x : <normal, x> <= offset}, normal != 0.
  static ConvexSet halfspace(Vector normal, double offset);
  /// {x : ||x - center|| <= radius}, radius > 0.
  static ConvexSet ball(Vector center, double radius);
  /// {x : lo <= x <= hi componentwise}.
  static ConvexSet box(Vector lo, Vector hi);
  /// {point + span(directions)} with mutually orthonormal directions
  /// (within 1e-10). An empty direction list gives the singleton {point}.
  static ConvexSet affine(Vector point, std::vector<Vector> directions);
  /// Intersection of the members. Nonemptiness is the caller's
  /// responsibility and is checked through the witness, which must lie in
  /// every member (within 1e-9).
  static ConvexSet intersection(std::vector<ConvexSet> members, Vector witness);
  /// All of R^d (affine set spanned by the canonical basis).
  static ConvexSet whole_space(std::size_t dim);

  Kind kind() const;
  std::size_t dim() const;

  /// A point of the set: the stored witness for intersections, the natural
  /// base point otherwise.
  Vector witness_point() const;

  // Parameter accessors; each is valid for its kind only.
  const Vector& normal() const;
  double offset() const;
  const Vector& center() const;
  double radius() const;
  const Vector& lo() const;
  const Vector& hi() const;
  const Vector& base_point() const;
  const std::vector<Vector>& directions() const;
  const std::vector<ConvexSet>& members() const;

 private:
  struct Data;
  explicit ConvexSet(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

/// Metric projection P_C(x). Exact closed form for primitive kinds; Dykstra's
/// alternating projections for intersections, run until the correction
/// increments settle below tol.abs_tol and the iterate is within tol.abs_tol
/// of every member. Throws ConvergenceError (carrying the best iterate and
/// its membership residual) if Dykstra does not settle within tol.max_iter
/// cycles.
Vector project(const ConvexSet& set, const Vector& x, const Tolerance& tol = Tolerance(1e-12, 0.0, 100000));

/// Distance from x to the set. Exact for primitive kinds; for intersections
/// returns the max distance to a member, which is a lower bound on the true
/// distance (and exact membership indicator at 0).
double distance_to(const ConvexSet& set, const Vector& x);

/// True iff x is within `slack` of the set (for intersections: of every member).
bool contains(const ConvexSet& set, const Vector& x, double slack);

/// A point sampled from the set: polar in balls, componentwise in boxes,
/// reflected Gaussian in halfspaces, Gaussian in affine subspaces, and a
/// Dykstra-projected member sample for intersections.
Vector sample_point(const ConvexSet& set, std::mt19937_64& rng);

struct ProjectionViReport {
  double max_violation;
  Vector worst_point;
};

/// Samples `sample_count` points y from the set and reports
/// max_y <y - z, x - z> for a claimed projection z of x. Nonpositive (up to
/// rounding) iff z = P_C(x) on the sampled evidence.
ProjectionViReport check_projection_vi(const ConvexSet& set, const Vector& x,
                                       const Vector& z, std::size_t sample_count,
                                       std::mt19937_64& rng);

}  // namespace vifix
