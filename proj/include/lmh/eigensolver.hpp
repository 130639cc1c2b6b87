#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "lmh/errors.hpp"

namespace lmh {

// Maps an n x b block of vectors to another n x b block.
using BlockOperator = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

inline constexpr Eigen::Index kDenseOracleMaxSize = 2000;
inline constexpr Eigen::Index kHardPathMaxSize = 5000;

struct EigenPairs {
  Eigen::VectorXd values;     // ascending
  Eigen::MatrixXd vectors;    // A-orthonormal columns
  Eigen::VectorXd residuals;  // ||Q psi - lambda A psi|| / ||A psi||
  int restarts = 0;
  int operator_applications = 0;
};

struct KrylovOptions {
  double sigma = 0.0;   // shift used by the shift-invert operator
  int subspace = 0;     // 0 selects min(2k+10, n), grown to fit two blocks past k
  int block = 4;        // block size, clamped to k
  double tolerance = 1e-10;
  int max_restarts = 500;
  std::uint64_t seed = 20180501;
};

/// -1e-8 times the mean diagonal of W: a shift just below the zero mode.
double default_shift(const Eigen::SparseMatrix<double>& stiffness);

/// Smallest eigenpairs of the symmetric pencil (Q, A), A diagonal positive.
///
/// Block Krylov-Schur (thick restart) iteration on the shift-invert operator
/// (Q - sigma A)^{-1} A, which is self-adjoint in the A inner product. The
/// basis is fully re-orthogonalized (two Gram-Schmidt passes) at every step.
/// Converged Ritz vectors get a final Rayleigh-Ritz pass with Q itself, and
/// the result is accepted only once every true residual is below
/// 1e-8 * max(1, |lambda|). When the Krylov relation stalls above that bound,
/// a few block Davidson sweeps driven by the true residuals finish the job.
///
/// `apply_q` computes Q X; `shift_invert` computes (Q - sigma A)^{-1} A X.
EigenPairs smallest_eigenpairs(const BlockOperator& apply_q, const BlockOperator& shift_invert,
                               const Eigen::VectorXd& mass, int k, const KrylovOptions& options);

// Flips each column so its first entry with |x_i| > 1e-6 ||x|| is positive.
void canonicalize_signs(Eigen::MatrixXd& vectors);

/// Full spectrum of the pencil (Q, diag(mass)) via a dense symmetric solver
/// on A^{-1/2} Q A^{-1/2}. Limited to kDenseOracleMaxSize.
template <typename Derived>
EigenPairs dense_oracle_eig(const Eigen::MatrixBase<Derived>& q, const Eigen::VectorXd& mass) {
  const Eigen::Index n = q.rows();
  if (q.cols() != n || mass.size() != n) throw InvalidInput("dense_oracle_eig: dimension mismatch");
  if (n > kDenseOracleMaxSize)
    throw InvalidInput("dense_oracle_eig: n = " + std::to_string(n) + " exceeds the dense guard of " +
                       std::to_string(kDenseOracleMaxSize));
  if ((mass.array() <= 0.0).any()) throw InvalidInput("dense_oracle_eig: mass must be positive");
  const Eigen::VectorXd inv_sqrt = mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd scaled = inv_sqrt.asDiagonal() * q.template cast<double>() * inv_sqrt.asDiagonal();
  scaled = 0.5 * (scaled + scaled.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scaled);
  if (solver.info() != Eigen::Success) throw NumericalFailure("dense_oracle_eig: eigensolver failed");
  EigenPairs out;
  out.values = solver.eigenvalues();
  out.vectors = inv_sqrt.asDiagonal() * solver.eigenvectors();
  canonicalize_signs(out.vectors);
  const Eigen::MatrixXd r = q.template cast<double>() * out.vectors -
                            mass.asDiagonal() * out.vectors * out.values.asDiagonal();
  out.residuals = r.colwise().norm().transpose().cwiseQuotient(
      (mass.asDiagonal() * out.vectors).colwise().norm().transpose());
  return out;
}

/// Exact solution of the hard-constrained problem: the k smallest eigenpairs
/// of (Z, A) restricted to the A-orthogonal complement of span(phi).
///
/// Builds the dense projected operator (I-P)' Z (I-P) with P = phi phi' A.
/// The k' null directions the projector introduces are lifted above the
/// genuine spectrum and discarded. Up to kDenseOracleMaxSize the dense
/// problem is solved directly; above it (up to kHardPathMaxSize) by
/// shift-invert Krylov iteration on a dense Cholesky factor.
EigenPairs hard_constraint_eig(const Eigen::SparseMatrix<double>& z, const Eigen::VectorXd& mass,
                               const Eigen::MatrixXd& phi, int k, const KrylovOptions& options = {});

}  // namespace lmh
