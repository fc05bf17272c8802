#include "vifix/operators.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace vifix {

struct MonotoneOperator::Data {
  Kind kind;
  std::size_t dim;
  double kappa;
  double eta;

  // translation
  Vector u = Vector::zero(1);
  // affine
  Eigen::MatrixXd matrix;
  Vector b = Vector::zero(1);
};

MonotoneOperator::MonotoneOperator(std::shared_ptr<const Data> data)
    : data_(std::move(data)) {}

namespace {

void check_admissible(double kappa, double eta) {
  if (!(kappa > 0.0) || !(eta > 0.0)) {
    throw std::invalid_argument("MonotoneOperator: constants must be positive");
  }
  if (!(eta * eta < 2.0 * kappa)) {
    throw std::invalid_argument(
        "MonotoneOperator: eta^2 < 2*kappa required (eta^2 = " +
        std::to_string(eta * eta) + ", 2*kappa = " + std::to_string(2.0 * kappa) +
        "); rescale the operator");
  }
  if (kappa > eta) {
    throw std::invalid_argument("MonotoneOperator: kappa <= eta required");
  }
}

Eigen::MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) {
    throw std::invalid_argument("MonotoneOperator::affine: empty matrix");
  }
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw std::invalid_argument("MonotoneOperator::affine: matrix must be square");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(rows[i][j])) {
        throw std::invalid_argument("MonotoneOperator::affine: entries must be finite");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

}  // namespace

MonotoneOperator MonotoneOperator::translation(Vector u) {
  auto d = std::make_shared<Data>();
  d->kind = Kind::translation;
  d->dim = u.dim();
  d->kappa = 1.0;
  d->eta = 1.0;
  d->u = std::move(u);
  return MonotoneOperator(std::move(d));
}

MonotoneOperator MonotoneOperator::affine(const std::vector<std::vector<double>>& rows,
                                          Vector b) {
  Eigen::MatrixXd m = rows_to_matrix(rows);
  if (static_cast<std::size_t>(m.rows()) != b.dim()) {
    throw DimensionMismatch(m.rows(), b.dim(), "MonotoneOperator::affine");
  }
  // kappa from the smallest eigenvalue of the symmetric part, eta from the
  // spectral norm; both are the tightest certifiable constants.
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const double kappa = eig.eigenvalues().minCoeff();
  const double eta = m.jacobiSvd().singularValues().maxCoeff();
  check_admissible(kappa, eta);

  auto d = std::make_shared<Data>();
  d->kind = Kind::affine;
  d->dim = b.dim();
  d->kappa = kappa;
  d->eta = eta;
  d->matrix = std::move(m);
  d->b = std::move(b);
  return MonotoneOperator(std::move(d));
}

MonotoneOperator MonotoneOperator::affine_with_declared_constants(
    const std::vector<std::vector<double>>& rows, Vector b, double kappa, double eta) {
  Eigen::MatrixXd m = rows_to_matrix(rows);
  if (static_cast<std::size_t>(m.rows()) != b.dim()) {
    throw DimensionMismatch(m.rows(), b.dim(),
                            "MonotoneOperator::affine_with_declared_constants");
  }
  check_admissible(kappa, eta);

  auto d = std::make_shared<Data>();
  d->kind = Kind::affine;
  d->dim = b.dim();
  d->kappa = kappa;
  d->eta = eta;
  d->matrix = std::move(m);
  d->b = std::move(b);
  return MonotoneOperator(std::move(d));
}

MonotoneOperator::Kind MonotoneOperator::kind() const { return data_->kind; }
std::size_t MonotoneOperator::dim() const { return data_->dim; }
double MonotoneOperator::kappa() const { return data_->kappa; }
double MonotoneOperator::eta() const { return data_->eta; }

const Vector& MonotoneOperator::translation_point() const {
  if (data_->kind != Kind::translation) {
    throw std::logic_error("MonotoneOperator::translation_point: not a translation");
  }
  return data_->u;
}

std::vector<std::vector<double>> MonotoneOperator::matrix_rows() const {
  if (data_->kind != Kind::affine) {
    throw std::logic_error("MonotoneOperator::matrix_rows: not affine");
  }
  const auto& m = data_->matrix;
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rows[i][j] = m(i, j);
    }
  }
  return rows;
}

const Vector& MonotoneOperator::offset() const {
  if (data_->kind != Kind::affine) {
    throw std::logic_error("MonotoneOperator::offset: not affine");
  }
  return data_->b;
}

Vector MonotoneOperator::operator()(const Vector& x) const {
  if (x.dim() != data_->dim) {
    throw DimensionMismatch(data_->dim, x.dim(), "MonotoneOperator::evaluate");
  }
  switch (data_->kind) {
    case Kind::translation:
      return combine(1.0, x, -1.0, data_->u);
    case Kind::affine: {
      const Eigen::Map<const Eigen::VectorXd> xv(x.coords().data(),
                                                 static_cast<Eigen::Index>(x.dim()));
      Eigen::VectorXd out = data_->matrix * xv;
      std::vector<double> coords(out.data(), out.data() + out.size());
      Vector mx(std::move(coords));
      return combine(1.0, mx, -1.0, data_->b);
    }
  }
  throw std::logic_error("MonotoneOperator::evaluate: unreachable");
}

Vector evaluate(const MonotoneOperator& A, const Vector& x) { return A(x); }

double theta(const MonotoneOperator& A) {
  const double k = A.kappa();
  const double e = A.eta();
  return std::sqrt(std::max(0.0, 1.0 - 2.0 * k + e * e));
}

MonotoneOperator rescale(const MonotoneOperator& A, double mu) {
  const double bound = 2.0 * A.kappa() / (A.eta() * A.eta());
  if (!(mu > 0.0) || !(mu < bound)) {
    throw std::invalid_argument("rescale: mu must lie in (0, 2*kappa/eta^2) = (0, " +
                                std::to_string(bound) + ")");
  }
  if (A.kind() == MonotoneOperator::Kind::translation) {
    if (mu == 1.0) {
      return A;
    }
    // mu*(I - u) is affine with matrix mu*I and offset mu*u.
    const std::size_t n = A.dim();
    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      rows[i][i] = mu;
    }
    return MonotoneOperator::affine_with_declared_constants(
        rows, scale(mu, A.translation_point()), mu * A.kappa(), mu * A.eta());
  }
  std::vector<std::vector<double>> rows = A.matrix_rows();
  for (auto& row : rows) {
    for (double& v : row) {
      v *= mu;
    }
  }
  return MonotoneOperator::affine_with_declared_constants(
      rows, scale(mu, A.offset()), mu * A.kappa(), mu * A.eta());
}

ConstantsReport verify_constants(const MonotoneOperator& A, std::size_t pair_count,
                                 const Region& region, std::mt19937_64& rng) {
  if (pair_count < 1) {
    throw std::invalid_argument("verify_constants: pair_count must be >= 1");
  }
  double min_mono = std::numeric_limits<double>::infinity();
  double max_lip = 0.0;
  double max_contr = 0.0;
  for (std::size_t k = 0; k < pair_count; ++k) {
    const Vector x = sample_in_ball(region, rng);
    const Vector y = sample_in_ball(region, rng);
    const double gap = distance(x, y);
    if (gap < 1e-12) {
      continue;
    }
    const Vector ax = A(x);
    const Vector ay = A(y);
    const Vector dxy = combine(1.0, x, -1.0, y);
    const Vector da = combine(1.0, ax, -1.0, ay);
    min_mono = std::min(min_mono, inner(dxy, da) / (gap * gap));
    max_lip = std::max(max_lip, norm(da) / gap);
    max_contr = std::max(max_contr, norm(combine(1.0, dxy, -1.0, da)) / gap);
  }
  const bool passed = min_mono >= A.kappa() - 1e-9 && max_lip <= A.eta() + 1e-9 &&
                      max_contr <= theta(A) + 1e-9;
  return ConstantsReport{min_mono, max_lip, max_contr, passed};
}

}  // namespace vifix
