#include "lmh/factorization.hpp"

#include <cmath>
#include <string>

#include "lmh/errors.hpp"

namespace lmh {

namespace {
constexpr double kPivotRatio = 1e-13;
// Residual level below which a Woodbury solve is accepted without refinement.
constexpr double kRefineThreshold = 1e-13;
constexpr int kMaxRefinements = 3;
}  // namespace

SparseFactorization::SparseFactorization(const Eigen::SparseMatrix<double>& matrix) : size_(matrix.rows()) {
  if (matrix.rows() != matrix.cols()) throw InvalidInput("factorize: matrix is not square");
  ldlt_.compute(matrix);
  if (ldlt_.info() != Eigen::Success)
    throw NumericalFailure("factorize: LDLT failed; the matrix is singular, apply a negative shift first");
  const Eigen::VectorXd d = ldlt_.vectorD();
  const double largest = d.cwiseAbs().maxCoeff();
  const double smallest = d.cwiseAbs().minCoeff();
  if (!(largest > 0.0) || smallest <= kPivotRatio * largest || !d.allFinite())
    throw NumericalFailure("factorize: matrix is numerically singular (pivot ratio " +
                           std::to_string(largest > 0 ? smallest / largest : 0.0) +
                           "); apply a negative shift first");
}

Eigen::MatrixXd SparseFactorization::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != size_) throw InvalidInput("solve: right-hand side has wrong length");
  return ldlt_.solve(rhs);
}

LowRankShiftedSystem::LowRankShiftedSystem(Eigen::SparseMatrix<double> z, Eigen::VectorXd mass, Eigen::MatrixXd b,
                                           double mu_perp)
    : z_(std::move(z)), mass_(std::move(mass)), b_(std::move(b)), mu_(mu_perp), factor_(z_) {
  if (mass_.size() != z_.rows()) throw InvalidInput("low-rank system: mass length does not match Z");
  if (b_.cols() > 0 && b_.rows() != z_.rows()) throw InvalidInput("low-rank system: B has wrong row count");
  if (mu_ < 0.0) throw InvalidInput("low-rank system: mu_perp must be non-negative");
  if (b_.cols() == 0 || mu_ == 0.0) return;
  gamma_ = factor_.solve(mu_ * b_);
  Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(b_.cols(), b_.cols()) + b_.transpose() * gamma_;
  inner = 0.5 * (inner + inner.transpose()).eval();
  inner_.compute(inner);
  if (inner_.info() != Eigen::Success)
    throw NumericalFailure("woodbury: inner matrix I + B'Gamma is singular");
}

Eigen::MatrixXd LowRankShiftedSystem::apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y = z_ * x;
  if (b_.cols() > 0 && mu_ != 0.0) y.noalias() += mu_ * (b_ * (b_.transpose() * x));
  return y;
}

Eigen::MatrixXd LowRankShiftedSystem::woodbury(const Eigen::MatrixXd& rhs) const {
  Eigen::MatrixXd xi = factor_.solve(rhs);
  if (gamma_.size() == 0) return xi;
  const Eigen::MatrixXd eta = inner_.solve(b_.transpose() * xi);
  xi.noalias() -= gamma_ * eta;
  return xi;
}

Eigen::MatrixXd LowRankShiftedSystem::solve_plain(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != size()) throw InvalidInput("woodbury_solve: right-hand side has wrong length");
  Eigen::MatrixXd x = woodbury(rhs);
  // Cancellation in xi - Gamma*eta loses digits when Z is nearly singular
  // along directions in range(B); a few refinement sweeps recover them.
  for (int sweep = 0; sweep < kMaxRefinements; ++sweep) {
    const Eigen::MatrixXd residual = rhs - apply(x);
    if (residual.norm() <= kRefineThreshold * rhs.norm()) break;
    x += woodbury(residual);
  }
  return x;
}

Eigen::MatrixXd LowRankShiftedSystem::solve(const Eigen::MatrixXd& rhs) const {
  return solve_plain(mass_.asDiagonal() * rhs);
}

}  // namespace lmh
