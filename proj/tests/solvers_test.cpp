#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vifix/oracle.hpp"
#include "vifix/solvers.hpp"

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

MapSequence identity_sequence(std::size_t dim) {
  return MapSequence::constant(NonexpansiveMap::identity(dim),
                               ConvexSet::whole_space(dim));
}

}  // namespace

TEST_CASE("schedule kinds and flags") {
  const StepSchedule harmonic = StepSchedule::harmonic();
  CHECK(harmonic.lambda(1) == doctest::Approx(0.5));
  CHECK(harmonic.lambda(9) == doctest::Approx(0.1));
  CHECK(harmonic.flags().vanishes);
  CHECK(harmonic.flags().divergent_sum);
  CHECK(harmonic.flags().summable_differences);

  const StepSchedule root = make_schedule("power", 0.5);
  CHECK(root.lambda(3) == doctest::Approx(0.5));
  CHECK(root.flags().vanishes);
  CHECK(root.flags().divergent_sum);

  const StepSchedule fixed = make_schedule("constant", 0.1);
  CHECK(fixed.lambda(1000) == doctest::Approx(0.1));
  CHECK_FALSE(fixed.flags().vanishes);

  CHECK_THROWS_AS(make_schedule("geometric", 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_schedule("power", 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_schedule("power", 1.5), std::invalid_argument);
  CHECK_THROWS_AS(make_schedule("constant", 1.5), std::invalid_argument);
}

TEST_CASE("harmonic differences telescope and partial sums diverge") {
  const StepSchedule harmonic = StepSchedule::harmonic();
  double diff_sum = 0.0;
  double sum = 0.0;
  for (std::size_t n = 1; n <= 1000000; ++n) {
    sum += harmonic.lambda(n);
    diff_sum += std::abs(harmonic.lambda(n + 1) - harmonic.lambda(n));
  }
  CHECK(diff_sum <= 1.0 + 1e-9);  // telescopes to lambda_1 - lambda_{N+1} < 1
  CHECK(sum > 10.0);
}

TEST_CASE("halpern with identity maps follows the product recursion") {
  // x_{n+1} - u = (1 - lambda_n)(x_n - u), so
  // x_n = u + (x_1 - u) * prod_{k<n} (1 - lambda_k).
  const std::size_t dim = 4;
  const MapSequence seq = identity_sequence(dim);
  std::mt19937_64 rng(127);
  const Vector u = random_vector(dim, rng);
  const Vector x1 = random_vector(dim, rng);
  const StepSchedule schedule = StepSchedule::harmonic();

  // With identity maps the fixed-point residual is identically zero, so
  // stop on the oracle distance with abs_tol 0 to force the full run.
  const Tolerance tol(0.0, 0.0, 200);
  const IterationTrace trace = halpern_iterate(seq, u, x1, schedule, tol, u);
  REQUIRE(trace.steps.size() == 200);
  CHECK(trace.terminated_by == Termination::max_iter);

  double product = 1.0;
  for (std::size_t n = 1; n <= 200; ++n) {
    const Vector expected = combine(1.0, u, product, combine(1.0, x1, -1.0, u));
    CHECK(distance(trace.steps[n - 1].iterate, expected) < 1e-12);
    product *= 1.0 - schedule.lambda(n);
  }
  // Harmonic product telescopes to 1/n.
  CHECK(distance(trace.steps[199].iterate,
                 combine(1.0, u, 1.0 / 200.0, combine(1.0, x1, -1.0, u))) < 1e-12);
}

TEST_CASE("halpern started at a fixed anchor stays put") {
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const MapSequence seq = MapSequence::constant(NonexpansiveMap::projection(ball), ball);
  const Vector u{0.25, 0.25};  // inside the ball, so T u = u
  const Tolerance tol(0.0, 0.0, 50);
  // Unreachable oracle keeps the run going for all 50 steps.
  const IterationTrace trace =
      halpern_iterate(seq, u, u, StepSchedule::harmonic(), tol, Vector{5.0, 5.0});
  REQUIRE(trace.steps.size() == 50);
  for (const auto& step : trace.steps) {
    CHECK(distance(step.iterate, u) == 0.0);
    CHECK(step.fix_residual == 0.0);
  }
}

TEST_CASE("halpern over cyclic halfspace projections reaches the Dykstra limit") {
  const ConvexSet h1 = ConvexSet::halfspace(Vector{1.0, 1.0, 0.0, 0.0, 0.0}, 1.0);
  const ConvexSet h2 = ConvexSet::halfspace(Vector{1.0, -1.0, 0.0, 0.0, 0.0}, 1.0);
  const ConvexSet inter = ConvexSet::intersection({h1, h2}, Vector::zero(5));
  const MapSequence seq = MapSequence::cyclic(
      {NonexpansiveMap::projection(h1), NonexpansiveMap::projection(h2)}, inter);

  const Vector u{3.0, 0.0, 1.0, -1.0, 2.0};
  const Vector limit = halpern_limit_oracle(inter, u, Tolerance(1e-10, 0.0, 100000));
  const Tolerance tol(1e-3, 0.0, 200000);
  const IterationTrace trace =
      halpern_iterate(seq, u, Vector::zero(5), StepSchedule::harmonic(), tol, limit);
  CHECK(trace.terminated_by == Termination::tolerance);
  CHECK(trace.final_step().oracle_distance.value() <= 1e-3);
}

TEST_CASE("averaged halpern with beta 0 reproduces halpern step for step") {
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const MapSequence seq = MapSequence::constant(NonexpansiveMap::projection(ball), ball);
  std::mt19937_64 rng(131);
  const Vector u = random_vector(2, rng);
  const Vector x1 = random_vector(2, rng);
  const Tolerance tol(0.0, 0.0, 100);
  const std::optional<Vector> far = Vector{9.0, 9.0};

  const IterationTrace plain =
      halpern_iterate(seq, u, x1, StepSchedule::harmonic(), tol, far);
  const IterationTrace averaged = halpern_averaged_iterate(
      seq, u, x1, StepSchedule::harmonic(), AveragingSchedule::constant(0.0), tol, far);
  REQUIRE(plain.steps.size() == 100);
  REQUIRE(plain.steps.size() == averaged.steps.size());
  for (std::size_t i = 0; i < plain.steps.size(); ++i) {
    CHECK(distance(plain.steps[i].iterate, averaged.steps[i].iterate) == 0.0);
  }
}

TEST_CASE("averaged halpern with identity maps ignores beta") {
  const MapSequence seq = identity_sequence(3);
  std::mt19937_64 rng(137);
  const Vector u = random_vector(3, rng);
  const Vector x1 = random_vector(3, rng);
  const Tolerance tol(0.0, 0.0, 300);

  const IterationTrace a = halpern_averaged_iterate(
      seq, u, x1, StepSchedule::harmonic(), AveragingSchedule::constant(0.25), tol, u);
  const IterationTrace b = halpern_averaged_iterate(
      seq, u, x1, StepSchedule::harmonic(), AveragingSchedule::constant(0.75), tol, u);
  // beta x + (1 - beta) x = x either way.
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(distance(a.steps[i].iterate, b.steps[i].iterate) < 1e-13);
  }
  // and the limit is u.
  CHECK(distance(a.steps.back().iterate, u) < 1e-2 * distance(x1, u) + 1e-12);
}

TEST_CASE("averaged halpern over a w-mapping family converges to the projection") {
  const ConvexSet h1 = ConvexSet::halfspace(Vector{1.0, 1.0}, 1.0);
  const ConvexSet h2 = ConvexSet::halfspace(Vector{1.0, -1.0}, 1.0);
  const ConvexSet inter = ConvexSet::intersection({h1, h2}, Vector{0.0, 0.0});
  const MapSequence seq = MapSequence::w_mapping_family(
      {NonexpansiveMap::projection(h1), NonexpansiveMap::projection(h2)}, 0.5, inter);
  CHECK(seq.flags().condition_z);
  CHECK(seq.flags().condition_r);

  const Vector u{3.0, 0.5};
  const Vector limit = halpern_limit_oracle(inter, u, Tolerance(1e-10, 0.0, 100000));
  const Tolerance tol(2e-3, 0.0, 20000);
  const IterationTrace trace = halpern_averaged_iterate(
      seq, u, Vector{0.0, 0.0}, StepSchedule::harmonic(),
      AveragingSchedule::constant(0.5), tol, limit);
  CHECK(trace.terminated_by == Termination::tolerance);
  CHECK(trace.final_step().oracle_distance.value() <= 2e-3);
}

TEST_CASE("hsdm with a translation reduces to halpern exactly") {
  std::mt19937_64 rng(139);
  for (int rep = 0; rep < 5; ++rep) {
    const ConvexSet ball = ConvexSet::ball(random_vector(3, rng, 1.0), 1.5);
    const MapSequence seq =
        MapSequence::constant(NonexpansiveMap::projection(ball), ball);
    const Vector u = random_vector(3, rng);
    const Vector start = random_vector(3, rng);
    const Tolerance tol(0.0, 0.0, 500);
    const std::optional<Vector> far = Vector{20.0, 20.0, 20.0};

    const IterationTrace halpern =
        halpern_iterate(seq, u, start, StepSchedule::harmonic(), tol, far);
    const IterationTrace hsdm = hsdm_iterate(seq, MonotoneOperator::translation(u),
                                             start, StepSchedule::harmonic(), tol, far);
    REQUIRE(halpern.steps.size() == 500);
    REQUIRE(halpern.steps.size() == hsdm.steps.size());
    for (std::size_t i = 0; i < halpern.steps.size(); ++i) {
      CHECK(distance(halpern.steps[i].iterate, hsdm.steps[i].iterate) <= 1e-14);
    }
  }
}

TEST_CASE("hsdm with identity maps contracts along the certified product") {
  // y_{n+1} = (1 - 0.6 lambda_n) y_n for A = 0.6 I.
  const MapSequence seq = identity_sequence(2);
  const MonotoneOperator a = MonotoneOperator::affine({{0.6, 0.0}, {0.0, 0.6}},
                                                      Vector::zero(2));
  const Vector y1{5.0, -3.0};
  const StepSchedule schedule = StepSchedule::harmonic();
  const Tolerance tol(0.0, 0.0, 400);
  const IterationTrace trace = hsdm_iterate(seq, a, y1, schedule, tol, Vector::zero(2));

  double product = 1.0;
  for (std::size_t n = 1; n <= trace.steps.size(); ++n) {
    CHECK(distance(trace.steps[n - 1].iterate, scale(product, y1)) < 1e-12);
    product *= 1.0 - 0.6 * schedule.lambda(n);
  }
  CHECK(norm(trace.steps.back().iterate) < norm(y1) * 0.05);
}

TEST_CASE("hsdm converges to the VI solution on the unit ball") {
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const MapSequence seq = MapSequence::constant(NonexpansiveMap::projection(ball), ball);
  const MonotoneOperator a = MonotoneOperator::translation(Vector{2.0, 0.0});
  const Tolerance tol(1e-3, 0.0, 200000);
  const IterationTrace trace = hsdm_iterate(seq, a, Vector{0.0, 0.0},
                                            StepSchedule::harmonic(), tol,
                                            Vector{1.0, 0.0});
  CHECK(trace.terminated_by == Termination::tolerance);
  CHECK(distance(trace.final_step().iterate, Vector{1.0, 0.0}) <= 1e-3);
}

TEST_CASE("wmap scheme with one map equals hsdm over the averaged map") {
  const ConvexSet hs = ConvexSet::halfspace(Vector{1.0, 2.0}, 0.5);
  const NonexpansiveMap t = NonexpansiveMap::projection(hs);
  const double gamma = 0.4;
  const MonotoneOperator a = MonotoneOperator::translation(Vector{2.0, 2.0});
  const Vector y1{1.0, 1.0};
  const Tolerance tol(0.0, 0.0, 100);

  const IterationTrace wmap = wmap_hsdm_iterate(
      [&](std::size_t) { return t; }, [&](std::size_t) { return gamma; }, a, y1,
      StepSchedule::harmonic(), tol);

  const MapSequence averaged_seq = MapSequence::constant(
      NonexpansiveMap::averaged(gamma, t), hs);
  const IterationTrace direct =
      hsdm_iterate(averaged_seq, a, y1, StepSchedule::harmonic(), tol);

  REQUIRE(wmap.steps.size() == direct.steps.size());
  for (std::size_t i = 0; i < wmap.steps.size(); ++i) {
    CHECK(distance(wmap.steps[i].iterate, direct.steps[i].iterate) <= 1e-14);
  }
}

TEST_CASE("wmap scheme with identity base maps collapses to the A-only recursion") {
  const MonotoneOperator a = MonotoneOperator::affine({{0.7, 0.0}, {0.0, 0.7}},
                                                      Vector::zero(2));
  const Vector y1{2.0, 2.0};
  const StepSchedule schedule = StepSchedule::harmonic();
  const Tolerance tol(0.0, 0.0, 200);
  const IterationTrace trace = wmap_hsdm_iterate(
      [](std::size_t) { return NonexpansiveMap::identity(2); },
      [](std::size_t) { return 0.5; }, a, y1, schedule, tol, Vector::zero(2));

  double product = 1.0;
  for (std::size_t n = 1; n <= trace.steps.size(); ++n) {
    CHECK(distance(trace.steps[n - 1].iterate, scale(product, y1)) < 1e-12);
    product *= 1.0 - 0.7 * schedule.lambda(n);
  }
}

TEST_CASE("wmap scheme converges to the VI solution over two halfspaces in R3") {
  const ConvexSet h1 = ConvexSet::halfspace(Vector{1.0, 1.0, 0.0}, 1.0);
  const ConvexSet h2 = ConvexSet::halfspace(Vector{1.0, -1.0, 0.5}, 1.0);
  const ConvexSet inter = ConvexSet::intersection({h1, h2}, Vector::zero(3));
  const Vector u{2.0, 0.5, 0.0};

  const Vector limit = halpern_limit_oracle(inter, u, Tolerance(1e-10, 0.0, 100000));
  const NonexpansiveMap t1 = NonexpansiveMap::projection(h1);
  const NonexpansiveMap t2 = NonexpansiveMap::projection(h2);
  const Tolerance tol(1e-3, 0.0, 20000);
  const IterationTrace trace = wmap_hsdm_iterate(
      [&](std::size_t n) { return n % 2 == 1 ? t1 : t2; },
      [](std::size_t) { return 0.5; }, MonotoneOperator::translation(u), Vector::zero(3),
      StepSchedule::harmonic(), tol, limit);
  CHECK(trace.terminated_by == Termination::tolerance);
  CHECK(trace.final_step().oracle_distance.value() <= 1e-3);
}

TEST_CASE("trace determinism") {
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const MapSequence seq = MapSequence::constant(NonexpansiveMap::projection(ball), ball);
  const MonotoneOperator a = MonotoneOperator::translation(Vector{2.0, 0.0});
  const Tolerance tol(1e-4, 0.0, 50000);
  const IterationTrace t1 = hsdm_iterate(seq, a, Vector{0.3, -0.7},
                                         StepSchedule::harmonic(), tol);
  const IterationTrace t2 = hsdm_iterate(seq, a, Vector{0.3, -0.7},
                                         StepSchedule::harmonic(), tol);
  REQUIRE(t1.steps.size() == t2.steps.size());
  for (std::size_t i = 0; i < t1.steps.size(); ++i) {
    CHECK(t1.steps[i].iterate == t2.steps[i].iterate);  // bitwise
    CHECK(t1.steps[i].fix_residual == t2.steps[i].fix_residual);
  }
}

TEST_CASE("constant schedules are accepted but need not converge") {
  const MapSequence seq = identity_sequence(2);
  const Vector u{1.0, 0.0};
  const Tolerance tol(1e-12, 0.0, 200);
  const IterationTrace trace = halpern_iterate(seq, u, Vector{0.0, 0.0},
                                               StepSchedule::constant(0.5), tol);
  // x_{n+1} = 0.5 u + 0.5 x_n converges here; the point is only that the
  // solver runs and reports its termination honestly.
  CHECK((trace.terminated_by == Termination::max_iter ||
         trace.final_step().fix_residual <= 1e-12));
}

TEST_CASE("coupling experiment is exactly fixed when started at the solution") {
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const MapSequence seq = MapSequence::constant(NonexpansiveMap::projection(ball), ball);
  const Vector u{0.5, 0.25};  // inside the ball: w = P_F(u) = u
  const MonotoneOperator a = MonotoneOperator::translation(u);
  const Tolerance tol(1e-6, 0.0, 100);

  const CouplingResult result = coupling_experiment(seq, a, u, StepSchedule::harmonic(), tol);
  CHECK(distance(result.vi_solution, u) < 1e-12);
  for (double d : result.coupling_diffs) {
    CHECK(d == 0.0);
  }
  for (const auto& step : result.trace_y.steps) {
    CHECK(distance(step.iterate, u) < 1e-12);
  }
}

TEST_CASE("coupling diffs vanish and are dominated by the proof recursion") {
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const MapSequence seq = MapSequence::constant(NonexpansiveMap::projection(ball), ball);
  const MonotoneOperator a = MonotoneOperator::affine({{0.7, 0.1}, {-0.1, 0.7}},
                                                      Vector{1.4, 0.0});
  const Tolerance tol(1e-3, 0.0, 100000);
  const CouplingResult result =
      coupling_experiment(seq, a, Vector{-0.5, 0.5}, StepSchedule::harmonic(), tol);

  CHECK(result.trace_x.terminated_by == Termination::tolerance);
  CHECK(result.trace_y.terminated_by == Termination::tolerance);
  CHECK(result.coupling_diffs.back() <= 2e-3);

  // Both traces end within tolerance of the same oracle point.
  CHECK(result.trace_x.final_step().oracle_distance.value() <= 1e-3);
  CHECK(result.trace_y.final_step().oracle_distance.value() <= 1e-3);

  // eps_{n+1} = (1 - (1-theta) lambda_n) eps_n +
  //             (1-theta) lambda_n * theta/(1-theta) * ||x_n - w||
  const double rate = result.contraction_rate;
  const std::size_t steps = result.coupling_diffs.size();
  std::vector<double> eps(steps, 0.0);
  std::vector<double> gammas(steps - 1);
  std::vector<double> lambdas(steps - 1);
  eps[0] = result.coupling_diffs[0];
  for (std::size_t n = 0; n + 1 < steps; ++n) {
    const double lam = (1.0 - rate) * result.trace_x.steps[n].lambda_n;
    const double gam =
        rate / (1.0 - rate) * result.trace_x.steps[n].oracle_distance.value();
    lambdas[n] = lam;
    gammas[n] = gam;
    eps[n + 1] = (1.0 - lam) * eps[n] + lam * gam;
  }
  for (std::size_t n = 0; n < steps; ++n) {
    CHECK(result.coupling_diffs[n] <= eps[n] + 1e-9);
  }

  // The measured diffs themselves satisfy the lemma recursion.
  const std::vector<double> measured(result.coupling_diffs.begin(),
                                     result.coupling_diffs.end());
  const auto report = check_sequence_lemma(measured, gammas, lambdas, 1e-2);
  CHECK(report.recursion_satisfied);
}

TEST_CASE("check_sequence_lemma") {
  SUBCASE("all-zero sequences satisfy the recursion") {
    const std::vector<double> eps(11, 0.0);
    const std::vector<double> zeros(10, 0.0);
    const auto report = check_sequence_lemma(eps, zeros, zeros, 1e-12);
    CHECK(report.recursion_satisfied);
    CHECK(report.tail_max == 0.0);
    CHECK(report.tail_within_tol);
  }

  SUBCASE("harmonic closed-form product decays like 1/(n+1)") {
    // eps_{n+1} = (1 - lambda_n) eps_n with lambda_n = 1/(n+1) gives
    // eps_n = 1/n or, after N steps from eps_1 = 1, eps_{N+1} = 1/(N+1).
    const std::size_t n_steps = 1000;
    std::vector<double> eps(n_steps + 1);
    std::vector<double> gammas(n_steps, 0.0);
    std::vector<double> lambdas(n_steps);
    eps[0] = 1.0;
    for (std::size_t n = 0; n < n_steps; ++n) {
      lambdas[n] = 1.0 / static_cast<double>(n + 2);
      eps[n + 1] = (1.0 - lambdas[n]) * eps[n];
    }
    CHECK(eps.back() == doctest::Approx(1.0 / static_cast<double>(n_steps + 1)));
    const auto report = check_sequence_lemma(eps, gammas, lambdas, 2e-3);
    CHECK(report.recursion_satisfied);
    CHECK(report.tail_max <= 2e-3);
    CHECK(report.tail_within_tol);
  }

  SUBCASE("a violation at one index is detected") {
    std::vector<double> eps = {1.0, 0.5, 0.9, 0.25};
    const std::vector<double> gammas = {0.0, 0.0, 0.0};
    const std::vector<double> lambdas = {0.5, 0.5, 0.5};
    // eps[2] = 0.9 > (1 - 0.5)*0.5 = 0.25.
    const auto report = check_sequence_lemma(eps, gammas, lambdas, 1.0);
    CHECK_FALSE(report.recursion_satisfied);
  }

  SUBCASE("length mismatches are rejected") {
    CHECK_THROWS_AS(check_sequence_lemma({1.0, 0.5}, {0.0}, {0.5, 0.5}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_sequence_lemma({1.0}, {}, {0.5}, 1.0), std::invalid_argument);
  }
}

TEST_CASE("stopping honors the oracle when provided") {
  const MapSequence seq = identity_sequence(2);
  const Vector u{1.0, 0.0};
  const Tolerance tol(1e-2, 0.0, 100000);
  const IterationTrace with_oracle = halpern_iterate(
      seq, u, Vector{0.0, 0.0}, StepSchedule::harmonic(), tol, u);
  CHECK(with_oracle.terminated_by == Termination::tolerance);
  CHECK(with_oracle.final_step().oracle_distance.value() <= 1e-2);

  // Without an oracle the identity sequence has zero fixed-point residual
  // immediately (every point is fixed), so it stops at step 1.
  const IterationTrace without = halpern_iterate(
      seq, u, Vector{0.0, 0.0}, StepSchedule::harmonic(), tol);
  CHECK(without.steps.size() == 1);
  CHECK(without.terminated_by == Termination::tolerance);
}
