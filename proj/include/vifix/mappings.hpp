#pragma once

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "vifix/sets.hpp"
#include "vifix/space.hpp"

namespace vifix {

/// A nonexpansive self-map of R^d, nonexpansive by construction: metric
/// projections are nonexpansive, and averaging, composition, convex
/// combination and the W-mapping recursion preserve nonexpansiveness.
///
/// Values are immutable and cheap to copy; apply() is pure.
class NonexpansiveMap {
 public:
  enum class Kind { identity, projection, averaged, composition, convex_combination, w_mapping };

  static NonexpansiveMap identity(std::size_t dim);
  static NonexpansiveMap projection(ConvexSet set,
                                    Tolerance proj_tol = Tolerance(1e-12, 0.0, 100000));
  /// (1 - alpha)*I + alpha*inner with alpha in (0, 1].
  static NonexpansiveMap averaged(double alpha, NonexpansiveMap inner);
  /// maps[0] ∘ maps[1] ∘ ... (applied right to left).
  static NonexpansiveMap composition(std::vector<NonexpansiveMap> maps);
  /// sum_i weights[i]*maps[i] with nonnegative weights summing to 1.
  static NonexpansiveMap convex_combination(std::vector<double> weights,
                                            std::vector<NonexpansiveMap> maps);
  /// The W-mapping U_1 over maps T_1..T_n and gammas in (0,1), defined by
  /// the downward recursion U_{n+1} = I, U_k = gamma_k T_k U_{k+1} + (1 - gamma_k) I.
  static NonexpansiveMap w_mapping(std::vector<NonexpansiveMap> maps,
                                   std::vector<double> gammas);

  Kind kind() const;
  std::size_t dim() const;

  Vector operator()(const Vector& x) const;

 private:
  struct Node;
  explicit NonexpansiveMap(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Evaluates the map at x.
Vector apply(const NonexpansiveMap& map, const Vector& x);

/// Builds the W-mapping x -> U_{n,1} x from T_1..T_n and gamma_1..gamma_n.
/// Every gamma_k must lie strictly inside (0, 1).
NonexpansiveMap build_w_mapping(std::vector<NonexpansiveMap> maps,
                                std::vector<double> gammas);

/// Convergence-condition provenance flags. They are never verified
/// numerically: condition (Z) quantifies over weak cluster points, and the
/// summability conditions over all bounded subsets, neither of which is
/// checkable from finite data. Constructors set a flag only for families
/// known from the literature to satisfy the condition (constant sequences;
/// W-mapping families). Callers building sequences through from_generator
/// must supply flags backed by the same kind of provenance.
struct SequenceFlags {
  bool condition_z = false;
  bool condition_aktt = false;
  bool condition_r = false;
};

/// Indexed family {T_n} (n >= 1) of nonexpansive maps with a declared
/// nonempty common fixed-point set F. Maps are constructed once per index;
/// the memo cache is guarded so that concurrent map_at/apply calls yield the
/// same results as sequential ones.
class MapSequence {
 public:
  /// T_n = map for every n. Sets all three condition flags.
  static MapSequence constant(NonexpansiveMap map, ConvexSet fixed_set);
  /// T_n = maps[(n-1) mod maps.size()]. No condition flag is certified.
  static MapSequence cyclic(std::vector<NonexpansiveMap> maps, ConvexSet fixed_set);
  /// T_n = U_{n,1} over base[(k-1) mod base.size()] for k = 1..n with the
  /// given gamma schedule (each gamma_k in (0,1)). Sets all three flags.
  static MapSequence w_mapping_family(std::vector<NonexpansiveMap> base,
                                      std::function<double(std::size_t)> gammas,
                                      ConvexSet fixed_set);
  static MapSequence w_mapping_family(std::vector<NonexpansiveMap> base,
                                      double gamma, ConvexSet fixed_set);
  /// Arbitrary generator (1-based index). Flags are taken at face value.
  static MapSequence from_generator(std::function<NonexpansiveMap(std::size_t)> generator,
                                    ConvexSet fixed_set, SequenceFlags flags);

  /// T_n for n >= 1 (memoized).
  NonexpansiveMap map_at(std::size_t n) const;
  const ConvexSet& common_fixed_set() const;
  const SequenceFlags& flags() const;
  std::size_t dim() const;

 private:
  struct Data;
  explicit MapSequence(std::shared_ptr<Data> data);
  std::shared_ptr<Data> data_;
};

/// Sampled lower bound on sup{||T_{n+1} y - T_n y|| : y in region} over
/// `sample_count` uniform samples.
double estimate_sup_diff(const MapSequence& seq, std::size_t n, const Region& region,
                         std::size_t sample_count, std::mt19937_64& rng);

/// Max over sampled pairs of ||Sx - Sy|| / ||x - y|| (pairs closer than
/// 1e-12 are skipped). Library-constructed maps stay <= 1 + 1e-9.
double empirical_nonexpansiveness(const NonexpansiveMap& map, std::size_t pair_count,
                                  const Region& region, std::mt19937_64& rng);

}  // namespace vifix
