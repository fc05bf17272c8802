#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vifix/mappings.hpp"
#include "vifix/operators.hpp"
#include "vifix/space.hpp"

namespace vifix {

/// Step-size sequence {lambda_n} in [0,1] with analytically set condition
/// flags. The constant kind exists for negative tests; solvers accept it but
/// convergence is never asserted for it.
class StepSchedule {
 public:
  enum class Kind { harmonic, power, constant };

  struct Flags {
    bool vanishes;              // lambda_n -> 0
    bool divergent_sum;         // sum lambda_n = infinity
    bool summable_differences;  // sum |lambda_{n+1} - lambda_n| < infinity
  };

  /// lambda_n = 1/(n+1).
  static StepSchedule harmonic();
  /// lambda_n = 1/(n+1)^p with p in (0, 1].
  static StepSchedule power(double p);
  /// lambda_n = c with c in [0, 1].
  static StepSchedule constant(double c);

  double lambda(std::size_t n) const;  // n >= 1
  Kind kind() const { return kind_; }
  const Flags& flags() const { return flags_; }
  double parameter() const { return param_; }

 private:
  StepSchedule(Kind kind, double param, Flags flags);
  Kind kind_;
  double param_;
  Flags flags_;
};

/// Schedule factory keyed by name: "harmonic" (param ignored), "power"
/// (param = p), "constant" (param = c). Throws std::invalid_argument on an
/// unknown kind or invalid parameter.
StepSchedule make_schedule(const std::string& kind, double param = 0.0);

/// Averaging weights {beta_n} in [0,1] with analytic liminf/limsup flags.
class AveragingSchedule {
 public:
  struct Flags {
    bool liminf_positive;
    bool limsup_below_one;
  };

  /// beta_n = beta with beta in [0, 1]. Flags hold iff beta is interior.
  static AveragingSchedule constant(double beta);
  /// Arbitrary rule with caller-certified flags.
  static AveragingSchedule from_function(std::function<double(std::size_t)> rule, Flags flags);

  double beta(std::size_t n) const;  // n >= 1
  const Flags& flags() const { return flags_; }

 private:
  AveragingSchedule(std::function<double(std::size_t)> rule, Flags flags);
  std::function<double(std::size_t)> rule_;
  Flags flags_;
};

enum class Termination { tolerance, max_iter };

struct TraceStep {
  std::size_t n;  // 1-based step index
  double lambda_n;
  Vector iterate;
  double fix_residual;  // ||x_n - T_n x_n||
  std::optional<double> oracle_distance;
  std::optional<double> coupling_diff;
};

/// Per-step record of an iterative run. Steps are indexed from 1 and the
/// trace is deterministic: identical inputs produce identical traces.
struct IterationTrace {
  std::string scheme;
  std::vector<TraceStep> steps;
  Termination terminated_by;

  const TraceStep& final_step() const { return steps.back(); }
};

/// Halpern iteration x_{n+1} = lambda_n u + (1 - lambda_n) T_n x_n, anchored
/// at u. Stops at the first n with oracle_distance <= tol.abs_tol when an
/// oracle is given (fix_residual <= tol.abs_tol otherwise), or after
/// tol.max_iter steps, whichever comes first.
IterationTrace halpern_iterate(const MapSequence& seq, const Vector& u, const Vector& x1,
                               const StepSchedule& schedule, const Tolerance& tol,
                               const std::optional<Vector>& oracle = std::nullopt);

/// Averaged variant x_{n+1} = lambda_n u + (1 - lambda_n)(beta_n x_n +
/// (1 - beta_n) S_n x_n). With beta_n = 0 it reproduces halpern_iterate
/// step for step.
IterationTrace halpern_averaged_iterate(const MapSequence& seq, const Vector& u,
                                        const Vector& x1, const StepSchedule& schedule,
                                        const AveragingSchedule& beta, const Tolerance& tol,
                                        const std::optional<Vector>& oracle = std::nullopt);

/// Hybrid steepest descent y_{n+1} = T_n y_n - lambda_n A(T_n y_n). With
/// A = I - u the iterates coincide with halpern_iterate for the same inputs.
IterationTrace hsdm_iterate(const MapSequence& seq, const MonotoneOperator& A,
                            const Vector& y1, const StepSchedule& schedule,
                            const Tolerance& tol,
                            const std::optional<Vector>& oracle = std::nullopt);

/// W-mapping scheme y_{n+1} = (I - lambda_n A) U_{n,1} y_n, where U_{n,1} is
/// built at step n from base_maps(1..n) (memoized) and the gamma schedule.
IterationTrace wmap_hsdm_iterate(const std::function<NonexpansiveMap(std::size_t)>& base_maps,
                                 const std::function<double(std::size_t)>& gammas,
                                 const MonotoneOperator& A, const Vector& y1,
                                 const StepSchedule& schedule, const Tolerance& tol,
                                 const std::optional<Vector>& oracle = std::nullopt);

struct CouplingResult {
  IterationTrace trace_x;  // Halpern sequence anchored at (I - A) T_1 w
  IterationTrace trace_y;  // HSDM sequence
  std::vector<double> coupling_diffs;  // ||x_n - y_n|| per step
  Vector vi_solution;                  // w
  Vector anchor;                       // (I - A) T_1 w
  double contraction_rate;             // theta(A)
};

/// Runs the coupled pair of recursions behind the Halpern-to-HSDM transfer:
/// w is the VI solution, u = (I - A)(T_1 w), and both sequences start at y1.
/// Both traces carry oracle_distance against w; the run stops once both are
/// within tol.abs_tol of w, or at tol.max_iter.
CouplingResult coupling_experiment(const MapSequence& seq, const MonotoneOperator& A,
                                   const Vector& y1, const StepSchedule& schedule,
                                   const Tolerance& tol);

struct SequenceLemmaReport {
  bool recursion_satisfied;  // eps_{n+1} <= (1 - lambda_n) eps_n + lambda_n gamma_n + 1e-9
  double tail_max;           // max of the last 10% of eps values
  bool tail_within_tol;      // tail_max <= tail_tol
};

/// Checks the recursion eps_{n+1} <= (1 - lambda_n) eps_n + lambda_n gamma_n
/// index by index (with 1e-9 absolute slack) and reports the max of the last
/// 10% of the eps values. Requires epsilons.size() == lambdas.size() + 1 ==
/// gammas.size() + 1.
SequenceLemmaReport check_sequence_lemma(const std::vector<double>& epsilons,
                                         const std::vector<double>& gammas,
                                         const std::vector<double>& lambdas,
                                         double tail_tol);

}  // namespace vifix
