#include "vifix/space.hpp"

#include <cmath>
#include <stdexcept>

namespace vifix {

namespace {

void check_finite(const std::vector<double>& coords) {
  if (coords.empty()) {
    throw std::invalid_argument("Vector: dimension must be >= 1");
  }
  for (double c : coords) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("Vector: coordinates must be finite");
    }
  }
}

}  // namespace

Vector::Vector(std::vector<double> coords) : coords_(std::move(coords)) {
  check_finite(coords_);
}

Vector::Vector(std::initializer_list<double> coords) : coords_(coords) {
  check_finite(coords_);
}

Vector Vector::zero(std::size_t dim) {
  return Vector(std::vector<double>(dim, 0.0));
}

Vector Vector::unit(std::size_t dim, std::size_t i) {
  if (i >= dim) {
    throw std::invalid_argument("Vector::unit: index out of range");
  }
  std::vector<double> coords(dim, 0.0);
  coords[i] = 1.0;
  return Vector(std::move(coords));
}

double inner(const Vector& x, const Vector& y) {
  if (x.dim() != y.dim()) {
    throw DimensionMismatch(x.dim(), y.dim(), "inner");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    acc += x[i] * y[i];
  }
  return acc;
}

double norm(const Vector& x) {
  return std::sqrt(inner(x, x));
}

double distance(const Vector& x, const Vector& y) {
  if (x.dim() != y.dim()) {
    throw DimensionMismatch(x.dim(), y.dim(), "distance");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

Vector combine(double alpha, const Vector& x, double beta, const Vector& y) {
  if (x.dim() != y.dim()) {
    throw DimensionMismatch(x.dim(), y.dim(), "combine");
  }
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    out[i] = alpha * x[i] + beta * y[i];
  }
  return Vector(std::move(out));
}

Vector scale(double alpha, const Vector& x) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    out[i] = alpha * x[i];
  }
  return Vector(std::move(out));
}

Tolerance::Tolerance(double abs_tol, double rel_tol, std::size_t max_iter)
    : abs_tol(abs_tol), rel_tol(rel_tol), max_iter(max_iter) {
  if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0)) {
    throw std::invalid_argument("Tolerance: abs_tol and rel_tol must be >= 0");
  }
  if (max_iter < 1) {
    throw std::invalid_argument("Tolerance: max_iter must be >= 1");
  }
}

}  // namespace vifix
