#include "vifix/mappings.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace vifix {

struct NonexpansiveMap::Node {
  Kind kind;
  std::size_t dim;

  // projection
  ConvexSet set = ConvexSet::whole_space(1);
  Tolerance proj_tol = Tolerance(1e-12, 0.0, 100000);
  // averaged
  double alpha = 1.0;
  // composition / convex_combination / w_mapping
  std::vector<NonexpansiveMap> children;
  std::vector<double> weights;  // convex_combination weights or w_mapping gammas
};

NonexpansiveMap::NonexpansiveMap(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

NonexpansiveMap NonexpansiveMap::identity(std::size_t dim) {
  if (dim < 1) {
    throw std::invalid_argument("NonexpansiveMap::identity: dim must be >= 1");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::identity;
  n->dim = dim;
  return NonexpansiveMap(std::move(n));
}

NonexpansiveMap NonexpansiveMap::projection(ConvexSet set, Tolerance proj_tol) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::projection;
  n->dim = set.dim();
  n->set = std::move(set);
  n->proj_tol = proj_tol;
  return NonexpansiveMap(std::move(n));
}

NonexpansiveMap NonexpansiveMap::averaged(double alpha, NonexpansiveMap inner) {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw std::invalid_argument("NonexpansiveMap::averaged: alpha must be in (0, 1]");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::averaged;
  n->dim = inner.dim();
  n->alpha = alpha;
  n->children.push_back(std::move(inner));
  return NonexpansiveMap(std::move(n));
}

NonexpansiveMap NonexpansiveMap::composition(std::vector<NonexpansiveMap> maps) {
  if (maps.empty()) {
    throw std::invalid_argument("NonexpansiveMap::composition: map list must be nonempty");
  }
  const std::size_t dim = maps.front().dim();
  for (const auto& m : maps) {
    if (m.dim() != dim) {
      throw DimensionMismatch(dim, m.dim(), "NonexpansiveMap::composition");
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::composition;
  n->dim = dim;
  n->children = std::move(maps);
  return NonexpansiveMap(std::move(n));
}

NonexpansiveMap NonexpansiveMap::convex_combination(std::vector<double> weights,
                                                    std::vector<NonexpansiveMap> maps) {
  if (maps.empty() || weights.size() != maps.size()) {
    throw std::invalid_argument(
        "NonexpansiveMap::convex_combination: need matching nonempty weights and maps");
  }
  const std::size_t dim = maps.front().dim();
  double total = 0.0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].dim() != dim) {
      throw DimensionMismatch(dim, maps[i].dim(), "NonexpansiveMap::convex_combination");
    }
    if (weights[i] < 0.0) {
      throw std::invalid_argument(
          "NonexpansiveMap::convex_combination: weights must be nonnegative");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "NonexpansiveMap::convex_combination: weights must sum to 1");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::convex_combination;
  n->dim = dim;
  n->weights = std::move(weights);
  n->children = std::move(maps);
  return NonexpansiveMap(std::move(n));
}

NonexpansiveMap NonexpansiveMap::w_mapping(std::vector<NonexpansiveMap> maps,
                                           std::vector<double> gammas) {
  if (maps.empty() || gammas.size() != maps.size()) {
    throw std::invalid_argument(
        "NonexpansiveMap::w_mapping: need matching nonempty maps and gammas");
  }
  const std::size_t dim = maps.front().dim();
  for (const auto& m : maps) {
    if (m.dim() != dim) {
      throw DimensionMismatch(dim, m.dim(), "NonexpansiveMap::w_mapping");
    }
  }
  for (double g : gammas) {
    if (!(g > 0.0) || !(g < 1.0)) {
      throw std::invalid_argument("NonexpansiveMap::w_mapping: gammas must lie in (0, 1)");
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::w_mapping;
  n->dim = dim;
  n->weights = std::move(gammas);
  n->children = std::move(maps);
  return NonexpansiveMap(std::move(n));
}

NonexpansiveMap::Kind NonexpansiveMap::kind() const { return node_->kind; }
std::size_t NonexpansiveMap::dim() const { return node_->dim; }

Vector NonexpansiveMap::operator()(const Vector& x) const {
  if (x.dim() != node_->dim) {
    throw DimensionMismatch(node_->dim, x.dim(), "NonexpansiveMap::apply");
  }
  switch (node_->kind) {
    case Kind::identity:
      return x;
    case Kind::projection:
      return project(node_->set, x, node_->proj_tol);
    case Kind::averaged: {
      const Vector sx = node_->children.front()(x);
      return combine(1.0 - node_->alpha, x, node_->alpha, sx);
    }
    case Kind::composition: {
      Vector out = x;
      for (auto it = node_->children.rbegin(); it != node_->children.rend(); ++it) {
        out = (*it)(out);
      }
      return out;
    }
    case Kind::convex_combination: {
      Vector acc = Vector::zero(node_->dim);
      for (std::size_t i = 0; i < node_->children.size(); ++i) {
        acc = combine(1.0, acc, node_->weights[i], node_->children[i](x));
      }
      return acc;
    }
    case Kind::w_mapping: {
      // U_{n+1} x = x; U_k x = gamma_k T_k (U_{k+1} x) + (1 - gamma_k) x.
      Vector w = x;
      for (std::size_t k = node_->children.size(); k-- > 0;) {
        const Vector t = node_->children[k](w);
        w = combine(node_->weights[k], t, 1.0 - node_->weights[k], x);
      }
      return w;
    }
  }
  throw std::logic_error("NonexpansiveMap::apply: unreachable");
}

Vector apply(const NonexpansiveMap& map, const Vector& x) { return map(x); }

NonexpansiveMap build_w_mapping(std::vector<NonexpansiveMap> maps,
                                std::vector<double> gammas) {
  return NonexpansiveMap::w_mapping(std::move(maps), std::move(gammas));
}

struct MapSequence::Data {
  std::function<NonexpansiveMap(std::size_t)> generator;
  ConvexSet fixed_set;
  SequenceFlags flags;

  std::mutex cache_mutex;
  std::unordered_map<std::size_t, NonexpansiveMap> cache;

  Data(std::function<NonexpansiveMap(std::size_t)> gen, ConvexSet f, SequenceFlags fl)
      : generator(std::move(gen)), fixed_set(std::move(f)), flags(fl) {}
};

MapSequence::MapSequence(std::shared_ptr<Data> data) : data_(std::move(data)) {}

namespace {

// Cheap construction-time sanity check that the witness is indeed a common
// fixed point of the first few maps.
void check_witness_fixed(const MapSequence& seq) {
  const Vector p = seq.common_fixed_set().witness_point();
  for (std::size_t n = 1; n <= 3; ++n) {
    const Vector tp = seq.map_at(n)(p);
    if (distance(tp, p) > 1e-10) {
      throw std::invalid_argument(
          "MapSequence: fixed-set witness is not a common fixed point "
          "(||T_n p - p|| > 1e-10 at n = " + std::to_string(n) + ")");
    }
  }
}

}  // namespace

MapSequence MapSequence::constant(NonexpansiveMap map, ConvexSet fixed_set) {
  if (map.dim() != fixed_set.dim()) {
    throw DimensionMismatch(fixed_set.dim(), map.dim(), "MapSequence::constant");
  }
  SequenceFlags flags{true, true, true};
  auto data = std::make_shared<Data>(
      [map](std::size_t) { return map; }, std::move(fixed_set), flags);
  MapSequence seq(std::move(data));
  check_witness_fixed(seq);
  return seq;
}

MapSequence MapSequence::cyclic(std::vector<NonexpansiveMap> maps, ConvexSet fixed_set) {
  if (maps.empty()) {
    throw std::invalid_argument("MapSequence::cyclic: map list must be nonempty");
  }
  for (const auto& m : maps) {
    if (m.dim() != fixed_set.dim()) {
      throw DimensionMismatch(fixed_set.dim(), m.dim(), "MapSequence::cyclic");
    }
  }
  auto data = std::make_shared<Data>(
      [maps](std::size_t n) { return maps[(n - 1) % maps.size()]; },
      std::move(fixed_set), SequenceFlags{});
  MapSequence seq(std::move(data));
  check_witness_fixed(seq);
  return seq;
}

MapSequence MapSequence::w_mapping_family(std::vector<NonexpansiveMap> base,
                                          std::function<double(std::size_t)> gammas,
                                          ConvexSet fixed_set) {
  if (base.empty()) {
    throw std::invalid_argument("MapSequence::w_mapping_family: base list must be nonempty");
  }
  for (const auto& m : base) {
    if (m.dim() != fixed_set.dim()) {
      throw DimensionMismatch(fixed_set.dim(), m.dim(), "MapSequence::w_mapping_family");
    }
  }
  SequenceFlags flags{true, true, true};
  auto generator = [base, gammas](std::size_t n) {
    std::vector<NonexpansiveMap> maps;
    std::vector<double> gs;
    maps.reserve(n);
    gs.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
      maps.push_back(base[(k - 1) % base.size()]);
      gs.push_back(gammas(k));
    }
    return NonexpansiveMap::w_mapping(std::move(maps), std::move(gs));
  };
  auto data = std::make_shared<Data>(std::move(generator), std::move(fixed_set), flags);
  MapSequence seq(std::move(data));
  check_witness_fixed(seq);
  return seq;
}

MapSequence MapSequence::w_mapping_family(std::vector<NonexpansiveMap> base, double gamma,
                                          ConvexSet fixed_set) {
  return w_mapping_family(std::move(base), [gamma](std::size_t) { return gamma; },
                          std::move(fixed_set));
}

MapSequence MapSequence::from_generator(std::function<NonexpansiveMap(std::size_t)> generator,
                                        ConvexSet fixed_set, SequenceFlags flags) {
  auto data = std::make_shared<Data>(std::move(generator), std::move(fixed_set), flags);
  MapSequence seq(std::move(data));
  check_witness_fixed(seq);
  return seq;
}

NonexpansiveMap MapSequence::map_at(std::size_t n) const {
  if (n < 1) {
    throw std::invalid_argument("MapSequence::map_at: index is 1-based");
  }
  {
    std::lock_guard<std::mutex> lock(data_->cache_mutex);
    auto it = data_->cache.find(n);
    if (it != data_->cache.end()) {
      return it->second;
    }
  }
  NonexpansiveMap built = data_->generator(n);
  if (built.dim() != data_->fixed_set.dim()) {
    throw DimensionMismatch(data_->fixed_set.dim(), built.dim(), "MapSequence::map_at");
  }
  std::lock_guard<std::mutex> lock(data_->cache_mutex);
  auto [it, inserted] = data_->cache.emplace(n, std::move(built));
  return it->second;
}

const ConvexSet& MapSequence::common_fixed_set() const { return data_->fixed_set; }
const SequenceFlags& MapSequence::flags() const { return data_->flags; }
std::size_t MapSequence::dim() const { return data_->fixed_set.dim(); }

double estimate_sup_diff(const MapSequence& seq, std::size_t n, const Region& region,
                         std::size_t sample_count, std::mt19937_64& rng) {
  if (n < 1) {
    throw std::invalid_argument("estimate_sup_diff: index is 1-based");
  }
  if (sample_count < 1) {
    throw std::invalid_argument("estimate_sup_diff: sample_count must be >= 1");
  }
  const NonexpansiveMap tn = seq.map_at(n);
  const NonexpansiveMap tn1 = seq.map_at(n + 1);
  double sup = 0.0;
  for (std::size_t k = 0; k < sample_count; ++k) {
    const Vector y = sample_in_ball(region, rng);
    sup = std::max(sup, distance(tn1(y), tn(y)));
  }
  return sup;
}

double empirical_nonexpansiveness(const NonexpansiveMap& map, std::size_t pair_count,
                                  const Region& region, std::mt19937_64& rng) {
  if (pair_count < 1) {
    throw std::invalid_argument("empirical_nonexpansiveness: pair_count must be >= 1");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < pair_count; ++k) {
    const Vector x = sample_in_ball(region, rng);
    const Vector y = sample_in_ball(region, rng);
    const double gap = distance(x, y);
    if (gap < 1e-12) {
      continue;
    }
    worst = std::max(worst, distance(map(x), map(y)) / gap);
  }
  return worst;
}

}  // namespace vifix
