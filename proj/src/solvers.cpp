#include "vifix/solvers.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "vifix/oracle.hpp"

namespace vifix {

StepSchedule::StepSchedule(Kind kind, double param, Flags flags)
    : kind_(kind), param_(param), flags_(flags) {}

StepSchedule StepSchedule::harmonic() {
  return StepSchedule(Kind::harmonic, 1.0, Flags{true, true, true});
}

StepSchedule StepSchedule::power(double p) {
  if (!(p > 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("StepSchedule::power: p must lie in (0, 1]");
  }
  // Differences are O(n^{-1-p}), hence summable for every p in (0, 1].
  return StepSchedule(Kind::power, p, Flags{true, true, true});
}

StepSchedule StepSchedule::constant(double c) {
  if (!(c >= 0.0) || !(c <= 1.0)) {
    throw std::invalid_argument("StepSchedule::constant: c must lie in [0, 1]");
  }
  return StepSchedule(Kind::constant, c, Flags{c == 0.0, c > 0.0, true});
}

double StepSchedule::lambda(std::size_t n) const {
  if (n < 1) {
    throw std::invalid_argument("StepSchedule::lambda: index is 1-based");
  }
  switch (kind_) {
    case Kind::harmonic:
      return 1.0 / static_cast<double>(n + 1);
    case Kind::power:
      return std::pow(static_cast<double>(n + 1), -param_);
    case Kind::constant:
      return param_;
  }
  throw std::logic_error("StepSchedule::lambda: unreachable");
}

StepSchedule make_schedule(const std::string& kind, double param) {
  if (kind == "harmonic") {
    return StepSchedule::harmonic();
  }
  if (kind == "power") {
    return StepSchedule::power(param);
  }
  if (kind == "constant") {
    return StepSchedule::constant(param);
  }
  throw std::invalid_argument("make_schedule: unknown kind '" + kind +
                              "' (expected harmonic, power or constant)");
}

AveragingSchedule::AveragingSchedule(std::function<double(std::size_t)> rule, Flags flags)
    : rule_(std::move(rule)), flags_(flags) {}

AveragingSchedule AveragingSchedule::constant(double beta) {
  if (!(beta >= 0.0) || !(beta <= 1.0)) {
    throw std::invalid_argument("AveragingSchedule::constant: beta must lie in [0, 1]");
  }
  return AveragingSchedule([beta](std::size_t) { return beta; },
                           Flags{beta > 0.0, beta < 1.0});
}

AveragingSchedule AveragingSchedule::from_function(std::function<double(std::size_t)> rule,
                                                   Flags flags) {
  return AveragingSchedule(std::move(rule), flags);
}

double AveragingSchedule::beta(std::size_t n) const {
  if (n < 1) {
    throw std::invalid_argument("AveragingSchedule::beta: index is 1-based");
  }
  const double b = rule_(n);
  if (!(b >= 0.0) || !(b <= 1.0)) {
    throw std::invalid_argument("AveragingSchedule: rule produced beta outside [0, 1]");
  }
  return b;
}

namespace {

// t + lam*(target - t) componentwise. The same lerp is used by the Halpern
// and HSDM updates so that the translation reduction is exact in floating
// point, not just in exact arithmetic.
Vector step_towards(const Vector& t, const Vector& target, double lam) {
  std::vector<double> out(t.dim());
  for (std::size_t i = 0; i < t.dim(); ++i) {
    out[i] = t[i] + lam * (target[i] - t[i]);
  }
  return Vector(std::move(out));
}

// t - lam*a componentwise.
Vector descend(const Vector& t, const Vector& a, double lam) {
  std::vector<double> out(t.dim());
  for (std::size_t i = 0; i < t.dim(); ++i) {
    out[i] = t[i] - lam * a[i];
  }
  return Vector(std::move(out));
}

struct StopRule {
  const std::optional<Vector>& oracle;
  double abs_tol;

  // Returns the distance used for stopping plus whether to stop.
  bool should_stop(const TraceStep& step) const {
    if (oracle.has_value()) {
      return step.oracle_distance.value() <= abs_tol;
    }
    return step.fix_residual <= abs_tol;
  }
};

TraceStep make_step(std::size_t n, double lam, Vector iterate, const Vector& mapped,
                    const std::optional<Vector>& oracle) {
  TraceStep step{n, lam, std::move(iterate), 0.0, std::nullopt, std::nullopt};
  step.fix_residual = distance(step.iterate, mapped);
  if (oracle.has_value()) {
    step.oracle_distance = distance(step.iterate, *oracle);
  }
  return step;
}

void check_dims(std::size_t dim, const Vector& v, const char* where) {
  if (v.dim() != dim) {
    throw DimensionMismatch(dim, v.dim(), where);
  }
}

}  // namespace

IterationTrace halpern_iterate(const MapSequence& seq, const Vector& u, const Vector& x1,
                               const StepSchedule& schedule, const Tolerance& tol,
                               const std::optional<Vector>& oracle) {
  check_dims(seq.dim(), u, "halpern_iterate: u");
  check_dims(seq.dim(), x1, "halpern_iterate: x1");
  if (oracle) {
    check_dims(seq.dim(), *oracle, "halpern_iterate: oracle");
  }

  IterationTrace trace{"halpern", {}, Termination::max_iter};
  const StopRule stop{oracle, tol.abs_tol};
  Vector x = x1;
  for (std::size_t n = 1; n <= tol.max_iter; ++n) {
    const double lam = schedule.lambda(n);
    const Vector t = seq.map_at(n)(x);
    trace.steps.push_back(make_step(n, lam, std::move(x), t, oracle));
    if (stop.should_stop(trace.steps.back())) {
      trace.terminated_by = Termination::tolerance;
      return trace;
    }
    x = step_towards(t, u, lam);
  }
  return trace;
}

IterationTrace halpern_averaged_iterate(const MapSequence& seq, const Vector& u,
                                        const Vector& x1, const StepSchedule& schedule,
                                        const AveragingSchedule& beta, const Tolerance& tol,
                                        const std::optional<Vector>& oracle) {
  check_dims(seq.dim(), u, "halpern_averaged_iterate: u");
  check_dims(seq.dim(), x1, "halpern_averaged_iterate: x1");
  if (oracle) {
    check_dims(seq.dim(), *oracle, "halpern_averaged_iterate: oracle");
  }

  IterationTrace trace{"halpern_averaged", {}, Termination::max_iter};
  const StopRule stop{oracle, tol.abs_tol};
  Vector x = x1;
  for (std::size_t n = 1; n <= tol.max_iter; ++n) {
    const double lam = schedule.lambda(n);
    const double b = beta.beta(n);
    const Vector sx = seq.map_at(n)(x);
    // beta_n x_n + (1 - beta_n) S_n x_n, written so beta = 0 gives S_n x_n
    // bitwise and the scheme then reproduces halpern_iterate step for step.
    const Vector inner_avg = step_towards(sx, x, b);
    trace.steps.push_back(make_step(n, lam, std::move(x), sx, oracle));
    if (stop.should_stop(trace.steps.back())) {
      trace.terminated_by = Termination::tolerance;
      return trace;
    }
    x = step_towards(inner_avg, u, lam);
  }
  return trace;
}

IterationTrace hsdm_iterate(const MapSequence& seq, const MonotoneOperator& A,
                            const Vector& y1, const StepSchedule& schedule,
                            const Tolerance& tol, const std::optional<Vector>& oracle) {
  if (A.dim() != seq.dim()) {
    throw DimensionMismatch(seq.dim(), A.dim(), "hsdm_iterate: operator");
  }
  check_dims(seq.dim(), y1, "hsdm_iterate: y1");
  if (oracle) {
    check_dims(seq.dim(), *oracle, "hsdm_iterate: oracle");
  }

  IterationTrace trace{"hsdm", {}, Termination::max_iter};
  const StopRule stop{oracle, tol.abs_tol};
  Vector y = y1;
  for (std::size_t n = 1; n <= tol.max_iter; ++n) {
    const double lam = schedule.lambda(n);
    const Vector t = seq.map_at(n)(y);
    trace.steps.push_back(make_step(n, lam, std::move(y), t, oracle));
    if (stop.should_stop(trace.steps.back())) {
      trace.terminated_by = Termination::tolerance;
      return trace;
    }
    y = descend(t, A(t), lam);
  }
  return trace;
}

IterationTrace wmap_hsdm_iterate(const std::function<NonexpansiveMap(std::size_t)>& base_maps,
                                 const std::function<double(std::size_t)>& gammas,
                                 const MonotoneOperator& A, const Vector& y1,
                                 const StepSchedule& schedule, const Tolerance& tol,
                                 const std::optional<Vector>& oracle) {
  check_dims(A.dim(), y1, "wmap_hsdm_iterate: y1");
  if (oracle) {
    check_dims(A.dim(), *oracle, "wmap_hsdm_iterate: oracle");
  }

  IterationTrace trace{"wmap_hsdm", {}, Termination::max_iter};
  const StopRule stop{oracle, tol.abs_tol};

  std::vector<NonexpansiveMap> maps;  // T_1..T_n, grown once per step
  std::vector<double> gs;
  Vector y = y1;
  for (std::size_t n = 1; n <= tol.max_iter; ++n) {
    const double lam = schedule.lambda(n);
    maps.push_back(base_maps(n));
    const double g = gammas(n);
    if (!(g > 0.0) || !(g < 1.0)) {
      throw std::invalid_argument("wmap_hsdm_iterate: gamma_n must lie in (0, 1)");
    }
    gs.push_back(g);
    const NonexpansiveMap w_map = NonexpansiveMap::w_mapping(maps, gs);
    const Vector t = w_map(y);
    trace.steps.push_back(make_step(n, lam, std::move(y), t, oracle));
    if (stop.should_stop(trace.steps.back())) {
      trace.terminated_by = Termination::tolerance;
      return trace;
    }
    y = descend(t, A(t), lam);
  }
  return trace;
}

CouplingResult coupling_experiment(const MapSequence& seq, const MonotoneOperator& A,
                                   const Vector& y1, const StepSchedule& schedule,
                                   const Tolerance& tol) {
  if (A.dim() != seq.dim()) {
    throw DimensionMismatch(seq.dim(), A.dim(), "coupling_experiment: operator");
  }
  check_dims(seq.dim(), y1, "coupling_experiment: y1");

  // Ground truth w and the anchor u = (I - A)(T_1 w) = f_1(w).
  const Tolerance oracle_tol(std::min(1e-10, tol.abs_tol), 0.0, 1000000);
  const Vector w = solve_vi_banach(seq.common_fixed_set(), A, oracle_tol).solution;
  const Vector t1w = seq.map_at(1)(w);
  const Vector u = combine(1.0, t1w, -1.0, A(t1w));

  IterationTrace trace_x{"halpern", {}, Termination::max_iter};
  IterationTrace trace_y{"hsdm", {}, Termination::max_iter};
  std::vector<double> diffs;
  const std::optional<Vector> oracle = w;

  Vector x = y1;
  Vector y = y1;
  bool x_done = false;
  bool y_done = false;
  for (std::size_t n = 1; n <= tol.max_iter; ++n) {
    const double lam = schedule.lambda(n);
    const NonexpansiveMap map_n = seq.map_at(n);
    const Vector tx = map_n(x);
    const Vector ty = map_n(y);
    const double diff = distance(x, y);
    diffs.push_back(diff);

    TraceStep sx = make_step(n, lam, x, tx, oracle);
    TraceStep sy = make_step(n, lam, y, ty, oracle);
    sx.coupling_diff = diff;
    sy.coupling_diff = diff;
    x_done = x_done || sx.oracle_distance.value() <= tol.abs_tol;
    y_done = y_done || sy.oracle_distance.value() <= tol.abs_tol;
    trace_x.steps.push_back(std::move(sx));
    trace_y.steps.push_back(std::move(sy));
    if (x_done && y_done) {
      trace_x.terminated_by = Termination::tolerance;
      trace_y.terminated_by = Termination::tolerance;
      break;
    }
    x = step_towards(tx, u, lam);
    y = descend(ty, A(ty), lam);
  }
  return CouplingResult{std::move(trace_x), std::move(trace_y), std::move(diffs),
                        w, u, theta(A)};
}

SequenceLemmaReport check_sequence_lemma(const std::vector<double>& epsilons,
                                         const std::vector<double>& gammas,
                                         const std::vector<double>& lambdas,
                                         double tail_tol) {
  if (epsilons.size() != lambdas.size() + 1 || gammas.size() != lambdas.size()) {
    throw std::invalid_argument(
        "check_sequence_lemma: need |epsilons| = |lambdas| + 1 = |gammas| + 1");
  }
  if (epsilons.empty()) {
    throw std::invalid_argument("check_sequence_lemma: epsilons must be nonempty");
  }
  for (double e : epsilons) {
    if (e < 0.0) {
      throw std::invalid_argument("check_sequence_lemma: epsilons must be nonnegative");
    }
  }
  for (double l : lambdas) {
    if (!(l >= 0.0) || !(l <= 1.0)) {
      throw std::invalid_argument("check_sequence_lemma: lambdas must lie in [0, 1]");
    }
  }

  constexpr double kSlack = 1e-9;
  bool satisfied = true;
  for (std::size_t n = 0; n < lambdas.size(); ++n) {
    const double bound = (1.0 - lambdas[n]) * epsilons[n] + lambdas[n] * gammas[n];
    if (epsilons[n + 1] > bound + kSlack) {
      satisfied = false;
      break;
    }
  }

  const std::size_t tail_len = std::max<std::size_t>(1, epsilons.size() / 10);
  double tail_max = 0.0;
  for (std::size_t i = epsilons.size() - tail_len; i < epsilons.size(); ++i) {
    tail_max = std::max(tail_max, epsilons[i]);
  }
  return SequenceLemmaReport{satisfied, tail_max, tail_max <= tail_tol};
}

}  // namespace vifix
