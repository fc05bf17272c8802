#pragma once

#include <memory>
#include <random>
#include <vector>

#include "vifix/sampling.hpp"
#include "vifix/space.hpp"

namespace vifix {

/// A kappa-strongly monotone, eta-lipschitzian operator with certified
/// constants satisfying eta^2 < 2*kappa (so that I - A is a contraction).
///
/// Constants are certified at construction from the operator's structure:
/// translations have kappa = eta = 1 exactly, and affine operators take
/// kappa from the smallest eigenvalue of the symmetric part of M and eta
/// from the spectral norm of M.
class MonotoneOperator {
 public:
  enum class Kind { translation, affine };

  /// A = I - u, i.e. A(x) = x - u. kappa = eta = 1.
  static MonotoneOperator translation(Vector u);
  /// A(x) = M x - b with M given by rows. Throws std::invalid_argument if
  /// the certified constants violate kappa > 0 or eta^2 < 2*kappa (rescale
  /// the operator in that case).
  static MonotoneOperator affine(const std::vector<std::vector<double>>& rows, Vector b);
  /// Affine operator with caller-declared constants. Only eta^2 < 2*kappa
  /// and 0 < kappa <= eta are checked; the spectral certification is
  /// skipped. Exists so that verify_constants can be demonstrated to catch
  /// misdeclared constants.
  static MonotoneOperator affine_with_declared_constants(
      const std::vector<std::vector<double>>& rows, Vector b, double kappa, double eta);

  Kind kind() const;
  std::size_t dim() const;
  double kappa() const;
  double eta() const;

  /// Translation kind only: the point u with A = I - u.
  const Vector& translation_point() const;
  /// Affine kind only: matrix rows and offset b.
  std::vector<std::vector<double>> matrix_rows() const;
  const Vector& offset() const;

  Vector operator()(const Vector& x) const;

 private:
  struct Data;
  explicit MonotoneOperator(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

/// A(x).
Vector evaluate(const MonotoneOperator& A, const Vector& x);

/// Contraction modulus of I - A: sqrt(1 - 2*kappa + eta^2), in [0, 1).
double theta(const MonotoneOperator& A);

/// mu*A with constants mu*kappa, mu*eta. Requires 0 < mu < 2*kappa/eta^2,
/// which guarantees the rescaled constants remain admissible. The solution
/// set of the variational inequality is unchanged.
MonotoneOperator rescale(const MonotoneOperator& A, double mu);

struct ConstantsReport {
  double min_monotonicity_ratio;  // min <x-y, Ax-Ay> / ||x-y||^2
  double max_lipschitz_ratio;     // max ||Ax-Ay|| / ||x-y||
  double max_contraction_ratio;   // max ||(I-A)x-(I-A)y|| / ||x-y||
  bool passed;                    // ratios consistent with kappa, eta, theta
};

/// Measures the declared constants on sampled pairs from the region. Passes
/// when min_monotonicity_ratio >= kappa - 1e-9, max_lipschitz_ratio <=
/// eta + 1e-9 and max_contraction_ratio <= theta(A) + 1e-9.
ConstantsReport verify_constants(const MonotoneOperator& A, std::size_t pair_count,
                                 const Region& region, std::mt19937_64& rng);

}  // namespace vifix
