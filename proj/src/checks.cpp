#include "vifix/checks.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "vifix/oracle.hpp"
#include "vifix/solvers.hpp"

namespace vifix {

namespace {

Vector random_vector(std::size_t dim, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  std::vector<double> coords(dim);
  for (auto& c : coords) {
    c = unif(rng);
  }
  return Vector(std::move(coords));
}

std::string describe(double value, double threshold) {
  std::ostringstream out;
  out << "worst " << value << " vs threshold " << threshold;
  return out.str();
}

CheckResult check_cauchy_schwarz(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dims(2, 50);
  double worst = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t d = dims(rng);
    const Vector x = random_vector(d, rng, 10.0);
    const Vector y = random_vector(d, rng, 10.0);
    const double bound = norm(x) * norm(y);
    if (bound > 0.0) {
      worst = std::max(worst, std::abs(inner(x, y)) / bound - 1.0);
    }
  }
  return {"cauchy-schwarz", worst <= 1e-12, describe(worst, 1e-12)};
}

CheckResult check_parallelogram(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dims(2, 50);
  double worst = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t d = dims(rng);
    const Vector x = random_vector(d, rng, 10.0);
    const Vector y = random_vector(d, rng, 10.0);
    const double lhs = std::pow(norm(combine(1.0, x, 1.0, y)), 2) +
                       std::pow(norm(combine(1.0, x, -1.0, y)), 2);
    const double rhs = 2.0 * std::pow(norm(x), 2) + 2.0 * std::pow(norm(y), 2);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, rhs));
  }
  return {"parallelogram", worst <= 1e-10, describe(worst, 1e-10)};
}

std::vector<ConvexSet> primitive_zoo(std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.4, 2.0);
  Vector normal = random_vector(dim, rng, 2.0);
  if (norm(normal) < 1e-6) {
    normal = Vector::unit(dim, 0);
  }
  const Vector lo = random_vector(dim, rng, 2.0);
  std::vector<double> hi(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    hi[i] = lo[i] + unif(rng);
  }
  std::vector<Vector> dirs;
  for (std::size_t i = 0; i + 1 < dim; ++i) {
    dirs.push_back(Vector::unit(dim, i));
  }
  return {
      ConvexSet::halfspace(normal, unif(rng)),
      ConvexSet::ball(random_vector(dim, rng, 2.0), unif(rng)),
      ConvexSet::box(lo, Vector(hi)),
      ConvexSet::affine(random_vector(dim, rng, 2.0), dirs),
  };
}

CheckResult check_projection_vi_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = -1.0;
  for (int rep = 0; rep < 250; ++rep) {
    for (const ConvexSet& set : primitive_zoo(3, rng)) {
      const Vector x = random_vector(3, rng, 4.0);
      const Vector z = project(set, x);
      worst = std::max(worst, check_projection_vi(set, x, z, 64, rng).max_violation);
    }
  }
  // A deliberately wrong projection must produce a positive violation.
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const double wrong =
      check_projection_vi(ball, Vector{2.0, 0.0}, Vector{0.0, 1.0}, 1000, rng)
          .max_violation;
  const bool passed = worst <= 1e-9 && wrong > 0.0;
  return {"projection-vi",
          passed, describe(worst, 1e-9) + "; wrong-z violation " + std::to_string(wrong)};
}

CheckResult check_projection_nonexpansive(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    for (const ConvexSet& set : primitive_zoo(4, rng)) {
      const Vector x = random_vector(4, rng, 4.0);
      const Vector y = random_vector(4, rng, 4.0);
      const double gap = distance(x, y);
      if (gap > 1e-12) {
        worst = std::max(worst, distance(project(set, x), project(set, y)) - gap);
      }
    }
  }
  return {"projection-nonexpansive", worst <= 1e-10, describe(worst, 1e-10)};
}

CheckResult check_projection_idempotent(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    for (const ConvexSet& set : primitive_zoo(4, rng)) {
      const Vector z = project(set, random_vector(4, rng, 4.0));
      worst = std::max(worst, distance(project(set, z), z));
    }
  }
  return {"projection-idempotent", worst <= 1e-10, describe(worst, 1e-10)};
}

CheckResult check_dykstra_closed_form(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ConvexSet h1 = ConvexSet::halfspace(Vector{1.0, 0.0}, 1.0);
  const ConvexSet h2 = ConvexSet::halfspace(Vector{0.0, 1.0}, 0.5);
  const ConvexSet wedge = ConvexSet::intersection({h1, h2}, Vector{0.0, 0.0});
  const Tolerance tight(1e-12, 0.0, 100000);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const Vector x = random_vector(2, rng, 5.0);
    const Vector expected{std::min(x[0], 1.0), std::min(x[1], 0.5)};
    worst = std::max(worst, distance(project(wedge, x, tight), expected));
  }
  return {"dykstra-closed-form", worst <= 1e-8, describe(worst, 1e-8)};
}

CheckResult check_nonexpansiveness(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ConvexSet ball = ConvexSet::ball(Vector{0.5, 0.0, 0.0}, 1.0);
  const ConvexSet hs = ConvexSet::halfspace(Vector{1.0, 2.0, -1.0}, 0.5);
  const NonexpansiveMap pb = NonexpansiveMap::projection(ball);
  const NonexpansiveMap ph = NonexpansiveMap::projection(hs);
  const std::vector<NonexpansiveMap> zoo = {
      NonexpansiveMap::identity(3),
      pb,
      ph,
      NonexpansiveMap::averaged(0.7, pb),
      NonexpansiveMap::composition({pb, ph}),
      NonexpansiveMap::convex_combination({0.3, 0.7}, {pb, ph}),
      build_w_mapping({pb, ph}, {0.5, 0.25}),
  };
  const Region region(Vector::zero(3), 4.0);
  double worst = 0.0;
  for (const auto& map : zoo) {
    worst = std::max(worst, empirical_nonexpansiveness(map, 1000, region, rng));
  }
  return {"nonexpansiveness", worst <= 1.0 + 1e-9, describe(worst, 1.0 + 1e-9)};
}

CheckResult check_w_fixed_point(std::uint64_t seed) {
  (void)seed;
  const ConvexSet h1 = ConvexSet::halfspace(Vector{1.0, 1.0, 0.0}, 1.0);
  const ConvexSet h2 = ConvexSet::halfspace(Vector{1.0, -1.0, 1.0}, 1.0);
  const Vector p = Vector::zero(3);
  const NonexpansiveMap t1 = NonexpansiveMap::projection(h1);
  const NonexpansiveMap t2 = NonexpansiveMap::projection(h2);
  std::vector<NonexpansiveMap> maps;
  std::vector<double> gammas;
  double worst = 0.0;
  for (std::size_t n = 1; n <= 50; ++n) {
    maps.push_back(n % 2 == 1 ? t1 : t2);
    gammas.push_back(0.5);
    worst = std::max(worst, distance(apply(build_w_mapping(maps, gammas), p), p));
  }
  return {"w-fixed-point", worst <= 1e-10, describe(worst, 1e-10)};
}

CheckResult check_theta_contraction(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.5, 0.95);
  const Region region(Vector::zero(3), 5.0);
  double worst_excess = -1.0;
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::vector<double>> rows(3, std::vector<double>(3, 0.0));
    for (int i = 0; i < 3; ++i) {
      rows[i][i] = unif(rng);
    }
    const MonotoneOperator a = MonotoneOperator::affine(rows, Vector::zero(3));
    const auto report = verify_constants(a, 1000, region, rng);
    worst_excess = std::max(worst_excess, report.max_contraction_ratio - theta(a));
  }
  return {"theta-contraction", worst_excess <= 1e-9, describe(worst_excess, 1e-9)};
}

CheckResult check_operator_constants(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Region region(Vector::zero(2), 5.0);
  const MonotoneOperator good =
      MonotoneOperator::affine({{0.6, 0.0}, {0.0, 0.9}}, Vector{0.1, 0.2});
  const auto good_report = verify_constants(good, 1000, region, rng);
  const MonotoneOperator bad = MonotoneOperator::affine_with_declared_constants(
      {{0.6, 0.0}, {0.0, 0.6}}, Vector::zero(2), 0.8, 0.8);
  const auto bad_report = verify_constants(bad, 1000, region, rng);
  const bool passed = good_report.passed && !bad_report.passed;
  return {"operator-constants", passed,
          std::string("certified operator ") + (good_report.passed ? "passed" : "failed") +
              ", misdeclared operator " + (bad_report.passed ? "passed" : "caught")};
}

CheckResult check_rescale_invariance(std::uint64_t seed) {
  (void)seed;
  const Tolerance tol(1e-8, 0.0, 100000);
  double worst = 0.0;
  const std::vector<std::pair<ConvexSet, MonotoneOperator>> scenarios = {
      {ConvexSet::ball(Vector{0.0, 0.0}, 1.0),
       MonotoneOperator::affine({{0.6, 0.0}, {0.0, 0.9}}, Vector{1.2, 0.0})},
      {ConvexSet::box(Vector{-1.0, -1.0}, Vector{1.0, 1.0}),
       MonotoneOperator::translation(Vector{2.0, 0.5})},
      {ConvexSet::halfspace(Vector{1.0, 1.0}, 0.5),
       MonotoneOperator::affine({{0.7, 0.1}, {-0.1, 0.7}}, Vector{1.0, -0.5})},
  };
  for (const auto& [set, op] : scenarios) {
    const Vector base = solve_vi_banach(set, op, tol).solution;
    for (double mu : {0.2, 0.4}) {
      const Vector rescaled = solve_vi_banach(set, rescale(op, mu), tol).solution;
      worst = std::max(worst, distance(base, rescaled));
    }
  }
  return {"rescale-invariance", worst <= 1e-6, describe(worst, 1e-6)};
}

CheckResult check_reduction_identity(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const ConvexSet ball = ConvexSet::ball(random_vector(3, rng, 1.0), 1.5);
    const MapSequence seq =
        MapSequence::constant(NonexpansiveMap::projection(ball), ball);
    const Vector u = random_vector(3, rng, 3.0);
    const Vector start = random_vector(3, rng, 3.0);
    const Tolerance tol(0.0, 0.0, 300);
    const std::optional<Vector> far = Vector{30.0, 30.0, 30.0};
    const IterationTrace h =
        halpern_iterate(seq, u, start, StepSchedule::harmonic(), tol, far);
    const IterationTrace y = hsdm_iterate(seq, MonotoneOperator::translation(u), start,
                                          StepSchedule::harmonic(), tol, far);
    for (std::size_t i = 0; i < h.steps.size(); ++i) {
      worst = std::max(worst, distance(h.steps[i].iterate, y.steps[i].iterate));
    }
  }
  return {"reduction-identity", worst <= 1e-14, describe(worst, 1e-14)};
}

CheckResult check_schedule_conditions(std::uint64_t seed) {
  (void)seed;
  const StepSchedule harmonic = StepSchedule::harmonic();
  double diff_sum = 0.0;
  double sum = 0.0;
  for (std::size_t n = 1; n <= 1000000; ++n) {
    sum += harmonic.lambda(n);
    diff_sum += std::abs(harmonic.lambda(n + 1) - harmonic.lambda(n));
  }
  const bool passed = diff_sum <= 1.0 + 1e-9 && sum > 10.0;
  std::ostringstream detail;
  detail << "difference partial sum " << diff_sum << " (bound 1), partial sum " << sum
         << " (> 10)";
  return {"schedule-conditions", passed, detail.str()};
}

CheckResult check_sequence_lemma_suite(std::uint64_t seed) {
  (void)seed;
  const std::size_t n_steps = 2000;
  std::vector<double> eps(n_steps + 1);
  std::vector<double> gammas(n_steps, 0.0);
  std::vector<double> lambdas(n_steps);
  eps[0] = 1.0;
  for (std::size_t n = 0; n < n_steps; ++n) {
    lambdas[n] = 1.0 / static_cast<double>(n + 2);
    eps[n + 1] = (1.0 - lambdas[n]) * eps[n];
  }
  const auto good = check_sequence_lemma(eps, gammas, lambdas, 1e-3);
  std::vector<double> broken = eps;
  broken[n_steps / 2] = 1.0;  // violates the recursion at one index
  const auto bad = check_sequence_lemma(broken, gammas, lambdas, 1e-3);
  const bool passed = good.recursion_satisfied && good.tail_within_tol &&
                      !bad.recursion_satisfied;
  return {"sequence-lemma", passed,
          "tail_max " + std::to_string(good.tail_max) + ", violation caught: " +
              (bad.recursion_satisfied ? "no" : "yes")};
}

CheckResult check_oracle_uniqueness(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const MonotoneOperator a = MonotoneOperator::affine({{0.7, 0.2}, {-0.2, 0.7}},
                                                      Vector{1.5, 0.3});
  const Tolerance tol(1e-9, 0.0, 100000);
  const OracleResult r1 = solve_vi_banach(ball, a, tol);
  const OracleResult r2 = solve_vi_banach(ball, a, tol, random_vector(2, rng, 0.7));
  double worst_rate = 0.0;
  for (std::size_t k = 0; k + 1 < r1.step_norms.size(); ++k) {
    if (r1.step_norms[k] > 1e-13) {
      worst_rate = std::max(worst_rate, r1.step_norms[k + 1] / r1.step_norms[k]);
    }
  }
  const bool passed = distance(r1.solution, r2.solution) <= 2.0 * tol.abs_tol &&
                      worst_rate <= theta(a) + 1e-9;
  return {"oracle-uniqueness", passed,
          "start gap " + std::to_string(distance(r1.solution, r2.solution)) +
              ", step decay " + std::to_string(worst_rate) + " vs theta " +
              std::to_string(theta(a))};
}

CheckResult check_coupling(std::uint64_t seed) {
  (void)seed;
  const ConvexSet ball = ConvexSet::ball(Vector{0.0, 0.0}, 1.0);
  const MapSequence seq = MapSequence::constant(NonexpansiveMap::projection(ball), ball);
  const MonotoneOperator a = MonotoneOperator::affine({{0.7, 0.1}, {-0.1, 0.7}},
                                                      Vector{1.4, 0.0});
  const Tolerance tol(1e-3, 0.0, 100000);
  const CouplingResult result =
      coupling_experiment(seq, a, Vector{-0.5, 0.5}, StepSchedule::harmonic(), tol);
  const double rate = result.contraction_rate;
  const auto& diffs = result.coupling_diffs;
  bool dominated = true;
  double eps = diffs.front();
  for (std::size_t n = 0; n < diffs.size(); ++n) {
    if (diffs[n] > eps + 1e-9) {
      dominated = false;
      break;
    }
    if (n + 1 < diffs.size()) {
      const double lam = (1.0 - rate) * result.trace_x.steps[n].lambda_n;
      const double gam =
          rate / (1.0 - rate) * result.trace_x.steps[n].oracle_distance.value();
      eps = (1.0 - lam) * eps + lam * gam;
    }
  }
  const bool passed = dominated && diffs.back() <= 2.0 * tol.abs_tol &&
                      result.trace_x.terminated_by == Termination::tolerance &&
                      result.trace_y.terminated_by == Termination::tolerance;
  return {"coupling", passed,
          "final diff " + std::to_string(diffs.back()) + ", dominated: " +
              (dominated ? "yes" : "no")};
}

using CheckFn = CheckResult (*)(std::uint64_t);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> table = {
      {"cauchy-schwarz", check_cauchy_schwarz},
      {"parallelogram", check_parallelogram},
      {"projection-vi", check_projection_vi_suite},
      {"projection-nonexpansive", check_projection_nonexpansive},
      {"projection-idempotent", check_projection_idempotent},
      {"dykstra-closed-form", check_dykstra_closed_form},
      {"nonexpansiveness", check_nonexpansiveness},
      {"w-fixed-point", check_w_fixed_point},
      {"theta-contraction", check_theta_contraction},
      {"operator-constants", check_operator_constants},
      {"rescale-invariance", check_rescale_invariance},
      {"reduction-identity", check_reduction_identity},
      {"schedule-conditions", check_schedule_conditions},
      {"sequence-lemma", check_sequence_lemma_suite},
      {"oracle-uniqueness", check_oracle_uniqueness},
      {"coupling", check_coupling},
  };
  return table;
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> names;
  names.reserve(registry().size());
  for (const auto& [name, fn] : registry()) {
    names.push_back(name);
  }
  return names;
}

std::string list_checks() {
  std::string out;
  for (const auto& name : check_names()) {
    out += name;
    out += "\n";
  }
  return out;
}

CheckResult run_check(const std::string& name, std::uint64_t seed) {
  for (const auto& [key, fn] : registry()) {
    if (key == name) {
      return fn(seed);
    }
  }
  throw std::invalid_argument("run_check: unknown check '" + name +
                              "'; see list_checks()");
}

std::vector<CheckResult> run_all_checks(std::uint64_t seed) {
  std::vector<CheckResult> results;
  results.reserve(registry().size());
  for (const auto& [name, fn] : registry()) {
    results.push_back(fn(seed));
  }
  return results;
}

}  // namespace vifix
