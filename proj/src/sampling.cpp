#include "vifix/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace vifix {

Region::Region(Vector center_, double radius_)
    : center(std::move(center_)), radius(radius_) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("Region: radius must be positive and finite");
  }
}

Vector sample_in_ball(const Region& region, std::mt19937_64& rng) {
  const std::size_t d = region.center.dim();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> dir(d);
  double len = 0.0;
  do {
    len = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      dir[i] = gauss(rng);
      len += dir[i] * dir[i];
    }
    len = std::sqrt(len);
  } while (len < 1e-300);

  const double r = region.radius * std::pow(unif(rng), 1.0 / static_cast<double>(d));
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = region.center[i] + r * dir[i] / len;
  }
  return Vector(std::move(out));
}

}  // namespace vifix
