#include "vifix/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vifix {

namespace {

// Projection accuracy has to outpace the contraction stopping bound, so the
// inner Dykstra tolerance is tied two orders below the requested one.
Tolerance projection_tolerance(const Tolerance& tol) {
  const double abs_tol = std::max(1e-14, tol.abs_tol * 1e-2);
  return Tolerance(abs_tol, 0.0, std::max<std::size_t>(tol.max_iter, 100000));
}

}  // namespace

OracleResult solve_vi_banach(const ConvexSet& F, const MonotoneOperator& A,
                             const Tolerance& tol) {
  return solve_vi_banach(F, A, tol, F.witness_point());
}

OracleResult solve_vi_banach(const ConvexSet& F, const MonotoneOperator& A,
                             const Tolerance& tol, const Vector& start) {
  if (F.dim() != A.dim()) {
    throw DimensionMismatch(F.dim(), A.dim(), "solve_vi_banach");
  }
  if (start.dim() != F.dim()) {
    throw DimensionMismatch(F.dim(), start.dim(), "solve_vi_banach: start");
  }

  const double rate = theta(A);
  const Tolerance proj_tol = projection_tolerance(tol);
  auto picard = [&](const Vector& z) {
    return project(F, combine(1.0, z, -1.0, A(z)), proj_tol);
  };

  if (rate == 0.0) {
    // I - A is constant, so P_F(I - A) reaches its fixed point in one step.
    Vector solution = picard(start);
    const double step_norm = distance(solution, start);
    return OracleResult{std::move(solution), 1, step_norm, rate, {step_norm}};
  }

  // Stop when the a-posteriori contraction bound certifies
  // ||z - z*|| <= theta/(1-theta) * ||z_{k+1} - z_k|| <= abs_tol.
  const double step_tol = tol.abs_tol * (1.0 - rate) / rate;
  Vector z = start;
  std::vector<double> step_norms;
  for (std::size_t k = 1; k <= tol.max_iter; ++k) {
    Vector next = picard(z);
    const double step_norm = distance(next, z);
    step_norms.push_back(step_norm);
    z = std::move(next);
    if (step_norm <= step_tol) {
      return OracleResult{std::move(z), k, step_norm, rate, std::move(step_norms)};
    }
  }
  throw ConvergenceError(
      "solve_vi_banach: contraction iteration exceeded max_iter = " +
          std::to_string(tol.max_iter) + " (a certified operator should converge "
          "geometrically; check the projection)",
      z, step_norms.empty() ? 0.0 : step_norms.back());
}

Vector halpern_limit_oracle(const ConvexSet& F, const Vector& u, const Tolerance& tol) {
  return project(F, u, projection_tolerance(tol));
}

double vi_residual(const ConvexSet& F, const MonotoneOperator& A, const Vector& z,
                   const Tolerance& tol) {
  if (F.dim() != A.dim()) {
    throw DimensionMismatch(F.dim(), A.dim(), "vi_residual");
  }
  if (z.dim() != F.dim()) {
    throw DimensionMismatch(F.dim(), z.dim(), "vi_residual");
  }
  const Vector projected = project(F, combine(1.0, z, -1.0, A(z)), projection_tolerance(tol));
  return distance(z, projected);
}

}  // namespace vifix
