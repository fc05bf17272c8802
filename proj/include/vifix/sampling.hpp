#pragma once

#include <random>

#include "vifix/space.hpp"

namespace vifix {

/// Closed ball {x : ||x - center|| <= radius}, used as the bounded region of
/// the sampled estimators.
struct Region {
  Vector center;
  double radius;

  Region(Vector center, double radius);
};

/// Uniform sample from the region (polar sampling: Gaussian direction,
/// radius scaled by U^(1/d)).
Vector sample_in_ball(const Region& region, std::mt19937_64& rng);

}  // namespace vifix
