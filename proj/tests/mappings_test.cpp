#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "vifix/mappings.hpp"

using namespace vifix;

namespace {

Vector random_vector(std::size_t dim, std::mt19937_64& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  std::vector<double> coords(dim);
  for (auto& c : coords) {
    c = unif(rng);
  }
  return Vector(std::move(coords));
}

}  // namespace

TEST_CASE("apply basics") {
  const NonexpansiveMap id = NonexpansiveMap::identity(2);
  const Vector x{1.5, -0.5};
  CHECK(apply(id, x) == x);

  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const NonexpansiveMap proj = NonexpansiveMap::projection(ball);
  CHECK(distance(apply(proj, Vector{2.0, 0.0}), Vector{1.0, 0.0}) < 1e-12);

  const NonexpansiveMap half = NonexpansiveMap::averaged(0.5, proj);
  const Vector expected = combine(0.5, Vector{2.0, 0.0}, 0.5, Vector{1.0, 0.0});
  CHECK(distance(apply(half, Vector{2.0, 0.0}), expected) < 1e-15);
}

TEST_CASE("composition applies right to left") {
  // f shifts into the ball, g projects onto a line; order matters.
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const ConvexSet line = ConvexSet::affine(Vector{0.0, 0.0}, {Vector{1.0, 0.0}});
  const NonexpansiveMap pb = NonexpansiveMap::projection(ball);
  const NonexpansiveMap pl = NonexpansiveMap::projection(line);

  const Vector x{2.0, 2.0};
  const Vector expected = apply(pb, apply(pl, x));
  CHECK(distance(apply(NonexpansiveMap::composition({pb, pl}), x), expected) < 1e-15);
}

TEST_CASE("w-mapping single level is the exact averaged form") {
  const ConvexSet hs = ConvexSet::halfspace(Vector{1.0, 0.0}, 0.0);
  const NonexpansiveMap t = NonexpansiveMap::projection(hs);
  const double gamma = 0.3;
  const NonexpansiveMap u = build_w_mapping({t}, {gamma});

  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 20; ++rep) {
    const Vector x = random_vector(2, rng);
    const Vector expected = combine(gamma, apply(t, x), 1.0 - gamma, x);
    CHECK(apply(u, x) == expected);  // bitwise: same arithmetic
  }
}

TEST_CASE("w-mapping with a single identity map is the identity") {
  const NonexpansiveMap u = build_w_mapping({NonexpansiveMap::identity(3)}, {0.5});
  std::mt19937_64 rng(73);
  const Vector x = random_vector(3, rng);
  // gamma*I + (1-gamma)*I collapses exactly.
  CHECK(distance(apply(u, x), x) < 1e-15);
}

TEST_CASE("two-level w-mapping matches the hand-unrolled recursion") {
  const ConvexSet h1 = ConvexSet::halfspace(Vector{1.0, 0.0}, 0.0);
  const ConvexSet h2 = ConvexSet::halfspace(Vector{0.0, 1.0}, 0.0);
  const NonexpansiveMap t1 = NonexpansiveMap::projection(h1);
  const NonexpansiveMap t2 = NonexpansiveMap::projection(h2);
  const NonexpansiveMap u = build_w_mapping({t1, t2}, {0.5, 0.5});

  const Vector x{2.0, 4.0};
  // U_{2,2} x = 0.5*T2 x + 0.5*x; T2 (2,4) = (2,0); U_{2,2} x = (2,2).
  // U_{2,1} x = 0.5*T1 (2,2) + 0.5*x = 0.5*(0,2) + 0.5*(2,4) = (1,3).
  CHECK(distance(apply(u, x), Vector{1.0, 3.0}) < 1e-15);
}

TEST_CASE("w-mapping fixes common fixed points up to depth 50") {
  const ConvexSet h1 = ConvexSet::halfspace(Vector{1.0, 1.0, 0.0}, 1.0);
  const ConvexSet h2 = ConvexSet::halfspace(Vector{1.0, -1.0, 1.0}, 1.0);
  const Vector p = Vector::zero(3);  // lies in both halfspaces
  const NonexpansiveMap t1 = NonexpansiveMap::projection(h1);
  const NonexpansiveMap t2 = NonexpansiveMap::projection(h2);

  std::vector<NonexpansiveMap> maps;
  std::vector<double> gammas;
  for (std::size_t n = 1; n <= 50; ++n) {
    maps.push_back(n % 2 == 1 ? t1 : t2);
    gammas.push_back(0.5);
    const NonexpansiveMap u = build_w_mapping(maps, gammas);
    CHECK(distance(apply(u, p), p) <= 1e-10);
  }
}

TEST_CASE("w-mapping rejects gammas outside (0,1)") {
  const NonexpansiveMap id = NonexpansiveMap::identity(2);
  CHECK_THROWS_AS(build_w_mapping({id}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_w_mapping({id}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_w_mapping({id, id}, {0.5}), std::invalid_argument);
}

TEST_CASE("map sequences memoize and report flags") {
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const MapSequence seq =
      MapSequence::constant(NonexpansiveMap::projection(ball), ball);
  CHECK(seq.flags().condition_z);
  CHECK(seq.flags().condition_aktt);
  CHECK(seq.flags().condition_r);

  const ConvexSet h1 = ConvexSet::halfspace(Vector{1.0, 0.0}, 0.0);
  const ConvexSet h2 = ConvexSet::halfspace(Vector{0.0, 1.0}, 0.0);
  const MapSequence cyc = MapSequence::cyclic(
      {NonexpansiveMap::projection(h1), NonexpansiveMap::projection(h2)},
      ConvexSet::intersection({h1, h2}, Vector{-1.0, -1.0}));
  CHECK_FALSE(cyc.flags().condition_z);

  const Vector x{2.0, 2.0};
  CHECK(distance(apply(cyc.map_at(1), x), Vector{0.0, 2.0}) < 1e-12);
  CHECK(distance(apply(cyc.map_at(2), x), Vector{2.0, 0.0}) < 1e-12);
  CHECK(distance(apply(cyc.map_at(3), x), apply(cyc.map_at(1), x)) == 0.0);
}

TEST_CASE("map sequence rejects a witness that is not a common fixed point") {
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const ConvexSet wrong_fixed_set = ConvexSet::ball(Vector{10.0, 10.0}, 0.5);
  CHECK_THROWS_AS(
      MapSequence::constant(NonexpansiveMap::projection(ball), wrong_fixed_set),
      std::invalid_argument);
}

TEST_CASE("concurrent map_at agrees with sequential results") {
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0, 0.0}, 2.0);
  const MapSequence seq = MapSequence::w_mapping_family(
      {NonexpansiveMap::projection(ball)}, 0.5, ball);

  const Vector x{3.0, 0.0, 0.0};
  std::vector<Vector> sequential;
  for (std::size_t n = 1; n <= 16; ++n) {
    sequential.push_back(apply(seq.map_at(n), x));
  }

  std::vector<Vector> concurrent(16, Vector::zero(3));
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t n = 4 * t + 1; n <= 4 * static_cast<std::size_t>(t) + 4; ++n) {
        concurrent[n - 1] = apply(seq.map_at(n), x);
      }
    });
  }
  for (auto& w : workers) {
    w.join();
  }
  for (std::size_t n = 0; n < 16; ++n) {
    CHECK(distance(concurrent[n], sequential[n]) == 0.0);
  }
}

TEST_CASE("estimate_sup_diff is zero for constant sequences") {
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const MapSequence seq = MapSequence::constant(NonexpansiveMap::projection(ball), ball);
  std::mt19937_64 rng(79);
  const double est = estimate_sup_diff(seq, 3, Region(Vector::zero(2), 3.0), 200, rng);
  CHECK(est == 0.0);
}

TEST_CASE("estimate_sup_diff sees the radius gap of nested balls") {
  // T_n projects onto ball(0, 1 + 2^-n): consecutive projections differ by at
  // most the radius gap 2^-n on any region.
  const ConvexSet whole = ConvexSet::whole_space(2);
  auto generator = [](std::size_t n) {
    return NonexpansiveMap::projection(
        ConvexSet::ball(Vector{0.0, 0.0}, 1.0 + std::pow(2.0, -static_cast<double>(n))));
  };
  // Every ball contains ball(0,1), so 0 is a common fixed point; use the unit
  // ball as the declared common fixed set.
  const MapSequence seq = MapSequence::from_generator(
      generator, ConvexSet::ball(Vector{0.0, 0.0}, 1.0), SequenceFlags{});

  std::mt19937_64 rng(83);
  const Region region(Vector::zero(2), 3.0);
  for (std::size_t n = 1; n <= 8; ++n) {
    const double est = estimate_sup_diff(seq, n, region, 400, rng);
    CHECK(est <= std::pow(2.0, -static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("w-mapping family sup-differences shrink with n") {
  const ConvexSet h1 = ConvexSet::halfspace(Vector{1.0, 1.0}, 1.0);
  const ConvexSet h2 = ConvexSet::halfspace(Vector{1.0, -1.0}, 1.0);
  const MapSequence seq = MapSequence::w_mapping_family(
      {NonexpansiveMap::projection(h1), NonexpansiveMap::projection(h2)}, 0.5,
      ConvexSet::intersection({h1, h2}, Vector{0.0, 0.0}));

  std::mt19937_64 rng(89);
  const Region region(Vector::zero(2), 3.0);
  const double early = estimate_sup_diff(seq, 1, region, 300, rng);
  const double mid = estimate_sup_diff(seq, 8, region, 300, rng);
  const double late = estimate_sup_diff(seq, 24, region, 300, rng);
  CHECK(early > mid);
  CHECK(mid > late);
  CHECK(late < 1e-4);
}

TEST_CASE("empirical nonexpansiveness of library maps") {
  std::mt19937_64 rng(97);
  const Region region(Vector::zero(3), 4.0);

  const NonexpansiveMap id = NonexpansiveMap::identity(3);
  CHECK(empirical_nonexpansiveness(id, 1000, region, rng) == doctest::Approx(1.0));

  const ConvexSet ball = ConvexSet::ball(Vector{0.5, 0.0, 0.0}, 1.0);
  const ConvexSet hs = ConvexSet::halfspace(Vector{1.0, 2.0, -1.0}, 0.5);
  const NonexpansiveMap pb = NonexpansiveMap::projection(ball);
  const NonexpansiveMap ph = NonexpansiveMap::projection(hs);

  const std::vector<NonexpansiveMap> zoo = {
      pb,
      ph,
      NonexpansiveMap::averaged(0.7, pb),
      NonexpansiveMap::composition({pb, ph}),
      NonexpansiveMap::convex_combination({0.3, 0.7}, {pb, ph}),
      build_w_mapping({pb, ph}, {0.5, 0.25}),
  };
  for (const auto& map : zoo) {
    CHECK(empirical_nonexpansiveness(map, 1000, region, rng) <= 1.0 + 1e-9);
  }

  // averaged(0.5, identity) is the identity; the ratio 1 is attained.
  const NonexpansiveMap avg_id = NonexpansiveMap::averaged(0.5, id);
  CHECK(empirical_nonexpansiveness(avg_id, 1000, region, rng) == doctest::Approx(1.0));
}

TEST_CASE("constructor precondition errors") {
  const NonexpansiveMap id = NonexpansiveMap::identity(2);
  CHECK_THROWS_AS(NonexpansiveMap::averaged(0.0, id), std::invalid_argument);
  CHECK_THROWS_AS(NonexpansiveMap::averaged(1.5, id), std::invalid_argument);
  CHECK_THROWS_AS(NonexpansiveMap::convex_combination({0.5, 0.4}, {id, id}),
                  std::invalid_argument);
  CHECK_THROWS_AS(NonexpansiveMap::convex_combination({-0.5, 1.5}, {id, id}),
                  std::invalid_argument);
  CHECK_THROWS_AS(NonexpansiveMap::composition({}), std::invalid_argument);
  CHECK_THROWS_AS(apply(id, Vector{1.0, 2.0, 3.0}), DimensionMismatch);
}
