#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vifix {

/// Base class for library errors that are not plain precondition violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when two arguments live in spaces of different dimension.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got, const std::string& where)
      : Error(where + ": dimension mismatch (expected " + std::to_string(expected) +
              ", got " + std::to_string(got) + ")") {}
};

/// Point of the ambient space R^d. Immutable after construction; all
/// coordinates are finite and d >= 1.
class Vector {
 public:
  explicit Vector(std::vector<double> coords);
  Vector(std::initializer_list<double> coords);

  static Vector zero(std::size_t dim);
  /// Canonical basis vector e_i (0-based index).
  static Vector unit(std::size_t dim, std::size_t i);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

  bool operator==(const Vector& other) const { return coords_ == other.coords_; }

 private:
  std::vector<double> coords_;
};

/// <x, y> = sum_i x_i y_i. Throws DimensionMismatch when dims differ.
double inner(const Vector& x, const Vector& y);

/// ||x|| = sqrt(<x, x>).
double norm(const Vector& x);

/// ||x - y|| without forming the difference vector.
double distance(const Vector& x, const Vector& y);

/// alpha*x + beta*y componentwise. Throws DimensionMismatch when dims differ.
Vector combine(double alpha, const Vector& x, double beta, const Vector& y);

/// alpha*x componentwise.
Vector scale(double alpha, const Vector& x);

/// Iteration control shared by every tolerance-driven operation.
/// abs_tol/rel_tol >= 0 and max_iter >= 1.
struct Tolerance {
  double abs_tol;
  double rel_tol;
  std::size_t max_iter;

  explicit Tolerance(double abs_tol = 1e-3, double rel_tol = 0.0,
                     std::size_t max_iter = 200000);
};

/// Nonconvergence report carrying the best iterate seen so far.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::string message, Vector best, double residual)
      : Error(std::move(message)), best_iterate(std::move(best)), residual(residual) {}

  Vector best_iterate;
  double residual;
};

}  // namespace vifix
