#pragma once

#include <vector>

#include "vifix/operators.hpp"
#include "vifix/sets.hpp"
#include "vifix/space.hpp"

namespace vifix {

/// Ground-truth solution produced by the Banach contraction oracle.
struct OracleResult {
  Vector solution;
  std::size_t iterations_used;
  double final_step_norm;
  double certified_rate;           // theta of the operator
  std::vector<double> step_norms;  // ||z_{k+1} - z_k|| per step
};

/// Unique VI solution over F via Picard iteration of the contraction
/// P_F(I - A), started at the witness point. For theta > 0 the loop stops
/// when ||z_{k+1} - z_k|| <= tol.abs_tol*(1 - theta)/theta, the a-posteriori
/// contraction bound guaranteeing ||z - z*|| <= tol.abs_tol; for theta = 0
/// a single step is exact. An explicit start overrides the witness.
/// Throws ConvergenceError (carrying the best iterate) if tol.max_iter is
/// exceeded, which certified inputs should never trigger.
OracleResult solve_vi_banach(const ConvexSet& F, const MonotoneOperator& A,
                             const Tolerance& tol);
OracleResult solve_vi_banach(const ConvexSet& F, const MonotoneOperator& A,
                             const Tolerance& tol, const Vector& start);

/// Limit of the Halpern iteration: P_F(u).
Vector halpern_limit_oracle(const ConvexSet& F, const Vector& u, const Tolerance& tol);

/// ||z - P_F(z - A(z))||: zero (up to projection tolerance) iff z solves the
/// variational inequality over F.
double vi_residual(const ConvexSet& F, const MonotoneOperator& A, const Vector& z,
                   const Tolerance& tol);

}  // namespace vifix
