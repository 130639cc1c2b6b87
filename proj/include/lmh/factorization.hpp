#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace lmh {

/// Sparse symmetric LDL' factorization reused across many solves.
/// Throws NumericalFailure when the matrix is numerically singular; the
/// caller is expected to shift it (e.g. Z - sigma*A with sigma < 0).
class SparseFactorization {
public:
  explicit SparseFactorization(const Eigen::SparseMatrix<double>& matrix);

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  Eigen::Index size() const { return size_; }

private:
  Eigen::Index size_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

/// The system (Z + mu * B B') x = A b with a sparse Z, diagonal mass A and a
/// thin dense B (n x k', k' << n).
///
/// Solves use the Sherman-Morrison-Woodbury identity: Z is factorized once,
/// Gamma = Z^{-1} (mu B) and the k' x k' matrix I + B' Gamma are precomputed,
/// and each solve costs one sparse solve plus O(n k') work. B B' is never
/// formed.
class LowRankShiftedSystem {
public:
  LowRankShiftedSystem(Eigen::SparseMatrix<double> z, Eigen::VectorXd mass, Eigen::MatrixXd b, double mu_perp);

  // (Z + mu B B') X
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;

  // X with (Z + mu B B') X = A * rhs.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  // X with (Z + mu B B') X = rhs (no mass applied).
  Eigen::MatrixXd solve_plain(const Eigen::MatrixXd& rhs) const;

  Eigen::Index size() const { return z_.rows(); }
  Eigen::Index rank() const { return b_.cols(); }
  double mu_perp() const { return mu_; }
  const Eigen::MatrixXd& gamma() const { return gamma_; }

private:
  Eigen::MatrixXd woodbury(const Eigen::MatrixXd& rhs) const;

  Eigen::SparseMatrix<double> z_;
  Eigen::VectorXd mass_;
  Eigen::MatrixXd b_;
  double mu_;
  SparseFactorization factor_;
  Eigen::MatrixXd gamma_;
  Eigen::LLT<Eigen::MatrixXd> inner_;
};

}  // namespace lmh
