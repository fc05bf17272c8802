#include "vifix/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vifix {

struct ConvexSet::Data {
  Kind kind;
  std::size_t dim;

  // halfspace
  Vector normal = Vector::zero(1);
  double offset = 0.0;
  // ball
  Vector center = Vector::zero(1);
  double radius = 0.0;
  // box
  Vector lo = Vector::zero(1);
  Vector hi = Vector::zero(1);
  // affine
  Vector base_point = Vector::zero(1);
  std::vector<Vector> directions;
  // intersection
  std::vector<ConvexSet> members;
  Vector witness = Vector::zero(1);
};

ConvexSet::ConvexSet(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

ConvexSet ConvexSet::halfspace(Vector normal, double offset) {
  if (norm(normal) == 0.0) {
    throw std::invalid_argument("ConvexSet::halfspace: normal must be nonzero");
  }
  if (!std::isfinite(offset)) {
    throw std::invalid_argument("ConvexSet::halfspace: offset must be finite");
  }
  auto d = std::make_shared<Data>();
  d->kind = Kind::halfspace;
  d->dim = normal.dim();
  d->normal = std::move(normal);
  d->offset = offset;
  return ConvexSet(std::move(d));
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ConvexSet::ball: radius must be positive");
  }
  auto d = std::make_shared<Data>();
  d->kind = Kind::ball;
  d->dim = center.dim();
  d->center = std::move(center);
  d->radius = radius;
  return ConvexSet(std::move(d));
}

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
  if (lo.dim() != hi.dim()) {
    throw DimensionMismatch(lo.dim(), hi.dim(), "ConvexSet::box");
  }
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    if (lo[i] > hi[i]) {
      throw std::invalid_argument("ConvexSet::box: lo must be <= hi componentwise");
    }
  }
  auto d = std::make_shared<Data>();
  d->kind = Kind::box;
  d->dim = lo.dim();
  d->lo = std::move(lo);
  d->hi = std::move(hi);
  return ConvexSet(std::move(d));
}

ConvexSet ConvexSet::affine(Vector point, std::vector<Vector> directions) {
  const std::size_t dim = point.dim();
  for (const Vector& q : directions) {
    if (q.dim() != dim) {
      throw DimensionMismatch(dim, q.dim(), "ConvexSet::affine");
    }
  }
  if (directions.size() > dim) {
    throw std::invalid_argument("ConvexSet::affine: more directions than dimensions");
  }
  for (std::size_t i = 0; i < directions.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double ip = inner(directions[i], directions[j]);
      const double expected = (i == j) ? 1.0 : 0.0;
      if (std::abs(ip - expected) > 1e-10) {
        throw std::invalid_argument(
            "ConvexSet::affine: spanning directions must be orthonormal within 1e-10");
      }
    }
  }
  auto d = std::make_shared<Data>();
  d->kind = Kind::affine;
  d->dim = dim;
  d->base_point = std::move(point);
  d->directions = std::move(directions);
  return ConvexSet(std::move(d));
}

ConvexSet ConvexSet::whole_space(std::size_t dim) {
  std::vector<Vector> dirs;
  dirs.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    dirs.push_back(Vector::unit(dim, i));
  }
  return affine(Vector::zero(dim), std::move(dirs));
}

ConvexSet ConvexSet::intersection(std::vector<ConvexSet> members, Vector witness) {
  if (members.empty()) {
    throw std::invalid_argument("ConvexSet::intersection: member list must be nonempty");
  }
  const std::size_t dim = members.front().dim();
  for (const ConvexSet& m : members) {
    if (m.dim() != dim) {
      throw DimensionMismatch(dim, m.dim(), "ConvexSet::intersection");
    }
  }
  if (witness.dim() != dim) {
    throw DimensionMismatch(dim, witness.dim(), "ConvexSet::intersection witness");
  }
  for (const ConvexSet& m : members) {
    if (!contains(m, witness, 1e-9)) {
      throw std::invalid_argument(
          "ConvexSet::intersection: witness must lie in every member (within 1e-9)");
    }
  }
  auto d = std::make_shared<Data>();
  d->kind = Kind::intersection;
  d->dim = dim;
  d->members = std::move(members);
  d->witness = std::move(witness);
  return ConvexSet(std::move(d));
}

ConvexSet::Kind ConvexSet::kind() const { return data_->kind; }
std::size_t ConvexSet::dim() const { return data_->dim; }

namespace {

void expect_kind(const ConvexSet& set, ConvexSet::Kind kind, const char* what) {
  if (set.kind() != kind) {
    throw std::logic_error(std::string(what) + ": accessor does not match set kind");
  }
}

}  // namespace

const Vector& ConvexSet::normal() const {
  expect_kind(*this, Kind::halfspace, "ConvexSet::normal");
  return data_->normal;
}
double ConvexSet::offset() const {
  expect_kind(*this, Kind::halfspace, "ConvexSet::offset");
  return data_->offset;
}
const Vector& ConvexSet::center() const {
  expect_kind(*this, Kind::ball, "ConvexSet::center");
  return data_->center;
}
double ConvexSet::radius() const {
  expect_kind(*this, Kind::ball, "ConvexSet::radius");
  return data_->radius;
}
const Vector& ConvexSet::lo() const {
  expect_kind(*this, Kind::box, "ConvexSet::lo");
  return data_->lo;
}
const Vector& ConvexSet::hi() const {
  expect_kind(*this, Kind::box, "ConvexSet::hi");
  return data_->hi;
}
const Vector& ConvexSet::base_point() const {
  expect_kind(*this, Kind::affine, "ConvexSet::base_point");
  return data_->base_point;
}
const std::vector<Vector>& ConvexSet::directions() const {
  expect_kind(*this, Kind::affine, "ConvexSet::directions");
  return data_->directions;
}
const std::vector<ConvexSet>& ConvexSet::members() const {
  expect_kind(*this, Kind::intersection, "ConvexSet::members");
  return data_->members;
}

Vector ConvexSet::witness_point() const {
  switch (data_->kind) {
    case Kind::halfspace:
      return project(*this, Vector::zero(data_->dim));
    case Kind::ball:
      return data_->center;
    case Kind::box:
      return combine(0.5, data_->lo, 0.5, data_->hi);
    case Kind::affine:
      return data_->base_point;
    case Kind::intersection:
      return data_->witness;
  }
  throw std::logic_error("ConvexSet::witness_point: unreachable");
}

namespace {

Vector project_halfspace(const ConvexSet& set, const Vector& x) {
  const Vector& a = set.normal();
  const double excess = inner(a, x) - set.offset();
  if (excess <= 0.0) {
    return x;
  }
  const double scale = excess / inner(a, a);
  return combine(1.0, x, -scale, a);
}

Vector project_ball(const ConvexSet& set, const Vector& x) {
  const Vector& c = set.center();
  const double dist = distance(x, c);
  if (dist <= set.radius()) {
    return x;
  }
  const double scale = set.radius() / dist;
  // c + scale*(x - c)
  return combine(1.0 - scale, c, scale, x);
}

Vector project_box(const ConvexSet& set, const Vector& x) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    out[i] = std::clamp(x[i], set.lo()[i], set.hi()[i]);
  }
  return Vector(std::move(out));
}

Vector project_affine(const ConvexSet& set, const Vector& x) {
  const Vector& p = set.base_point();
  const Vector diff = combine(1.0, x, -1.0, p);
  Vector out = p;
  for (const Vector& q : set.directions()) {
    out = combine(1.0, out, inner(q, diff), q);
  }
  return out;
}

// Boyle-Dykstra alternating projections with per-member corrections. Stops
// once the corrections settle (sum of squared correction changes per cycle
// below tol.abs_tol^2) and the iterate is within tol.abs_tol of every member.
Vector project_intersection(const ConvexSet& set, const Vector& x, const Tolerance& tol) {
  const auto& members = set.members();
  const std::size_t m = members.size();
  const std::size_t d = set.dim();

  Vector current = x;
  std::vector<Vector> corrections(m, Vector::zero(d));

  double residual = distance_to(set, current);
  Vector best = current;
  double best_residual = residual;

  for (std::size_t cycle = 0; cycle < tol.max_iter; ++cycle) {
    double correction_change_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Vector shifted = combine(1.0, current, 1.0, corrections[i]);
      Vector projected = project(members[i], shifted, tol);
      Vector new_correction = combine(1.0, shifted, -1.0, projected);
      const double delta = distance(new_correction, corrections[i]);
      correction_change_sq += delta * delta;
      corrections[i] = std::move(new_correction);
      current = std::move(projected);
    }
    residual = distance_to(set, current);
    if (residual < best_residual) {
      best = current;
      best_residual = residual;
    }
    if (std::sqrt(correction_change_sq) <= tol.abs_tol && residual <= tol.abs_tol) {
      return current;
    }
  }
  throw ConvergenceError(
      "project: Dykstra did not converge within " + std::to_string(tol.max_iter) +
          " cycles (membership residual " + std::to_string(best_residual) + ")",
      best, best_residual);
}

}  // namespace

Vector project(const ConvexSet& set, const Vector& x, const Tolerance& tol) {
  if (x.dim() != set.dim()) {
    throw DimensionMismatch(set.dim(), x.dim(), "project");
  }
  switch (set.kind()) {
    case ConvexSet::Kind::halfspace:
      return project_halfspace(set, x);
    case ConvexSet::Kind::ball:
      return project_ball(set, x);
    case ConvexSet::Kind::box:
      return project_box(set, x);
    case ConvexSet::Kind::affine:
      return project_affine(set, x);
    case ConvexSet::Kind::intersection:
      return project_intersection(set, x, tol);
  }
  throw std::logic_error("project: unreachable");
}

double distance_to(const ConvexSet& set, const Vector& x) {
  if (x.dim() != set.dim()) {
    throw DimensionMismatch(set.dim(), x.dim(), "distance_to");
  }
  switch (set.kind()) {
    case ConvexSet::Kind::halfspace: {
      const double excess = inner(set.normal(), x) - set.offset();
      return std::max(0.0, excess) / norm(set.normal());
    }
    case ConvexSet::Kind::ball:
      return std::max(0.0, distance(x, set.center()) - set.radius());
    case ConvexSet::Kind::box:
      return distance(x, project(set, x));
    case ConvexSet::Kind::affine:
      return distance(x, project(set, x));
    case ConvexSet::Kind::intersection: {
      double worst = 0.0;
      for (const ConvexSet& m : set.members()) {
        worst = std::max(worst, distance_to(m, x));
      }
      return worst;
    }
  }
  throw std::logic_error("distance_to: unreachable");
}

bool contains(const ConvexSet& set, const Vector& x, double slack) {
  return distance_to(set, x) <= slack;
}

Vector sample_point(const ConvexSet& set, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t d = set.dim();

  switch (set.kind()) {
    case ConvexSet::Kind::ball:
      return sample_in_ball(Region(set.center(), set.radius()), rng);
    case ConvexSet::Kind::box: {
      std::vector<double> out(d);
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = set.lo()[i] + (set.hi()[i] - set.lo()[i]) * unif(rng);
      }
      return Vector(std::move(out));
    }
    case ConvexSet::Kind::halfspace: {
      // Gaussian around the boundary's foot point, reflected inside.
      Vector anchor = project(set, Vector::zero(d));
      std::vector<double> out(d);
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = anchor[i] + gauss(rng);
      }
      Vector y(std::move(out));
      const Vector& a = set.normal();
      const double excess = inner(a, y) - set.offset();
      if (excess > 0.0) {
        y = combine(1.0, y, -2.0 * excess / inner(a, a), a);
      }
      return y;
    }
    case ConvexSet::Kind::affine: {
      Vector y = set.base_point();
      for (const Vector& q : set.directions()) {
        y = combine(1.0, y, gauss(rng), q);
      }
      return y;
    }
    case ConvexSet::Kind::intersection: {
      // Sample around the witness and project back into the set.
      const Vector w = set.witness_point();
      std::vector<double> out(d);
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = w[i] + gauss(rng);
      }
      return project(set, Vector(std::move(out)));
    }
  }
  throw std::logic_error("sample_point: unreachable");
}

ProjectionViReport check_projection_vi(const ConvexSet& set, const Vector& x,
                                       const Vector& z, std::size_t sample_count,
                                       std::mt19937_64& rng) {
  if (x.dim() != set.dim()) {
    throw DimensionMismatch(set.dim(), x.dim(), "check_projection_vi");
  }
  if (z.dim() != set.dim()) {
    throw DimensionMismatch(set.dim(), z.dim(), "check_projection_vi");
  }
  if (sample_count < 1) {
    throw std::invalid_argument("check_projection_vi: sample_count must be >= 1");
  }
  const Vector gap = combine(1.0, x, -1.0, z);
  double max_violation = -std::numeric_limits<double>::infinity();
  Vector worst = z;
  for (std::size_t k = 0; k < sample_count; ++k) {
    const Vector y = sample_point(set, rng);
    const double v = inner(combine(1.0, y, -1.0, z), gap);
    if (v > max_violation) {
      max_violation = v;
      worst = y;
    }
  }
  return ProjectionViReport{max_violation, std::move(worst)};
}

}  // namespace vifix
