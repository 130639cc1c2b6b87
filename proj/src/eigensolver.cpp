#include "lmh/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace lmh {

namespace {

constexpr double kResidualTolerance = 1e-8;
constexpr double kBreakdownRatio = 1e-10;
constexpr double kTightestTolerance = 1e-15;
constexpr double kNullRatio = 1e-6;
constexpr int kPolishSweeps = 6;
// Rounding in the Krylov relation scales with the largest active Ritz value.
constexpr double kRelationNoise = 1e-14;

Eigen::MatrixXd random_block(Eigen::Index n, Eigen::Index b, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);
  return x;
}

double a_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& mass) {
  return std::sqrt(x.dot(mass.cwiseProduct(x)));
}

struct BlockQr {
  Eigen::MatrixXd coeffs;  // projections onto the existing basis
  Eigen::MatrixXd r;       // upper triangular factor of the remainder
};

// A-orthonormalizes `block` against `basis` and within itself, in place.
// Collapsed columns are replaced by fresh random directions with zero coupling.
BlockQr orthonormalize(Eigen::MatrixXd& block, const Eigen::Ref<const Eigen::MatrixXd>& basis,
                       const Eigen::VectorXd& mass, std::mt19937_64& rng) {
  const Eigen::Index b = block.cols();
  BlockQr out{Eigen::MatrixXd::Zero(basis.cols(), b), Eigen::MatrixXd::Zero(b, b)};
  // Each column is projected against the basis and the finished columns together, twice,
  // so a column that loses most of its norm cannot pass leftovers on to the next ones.
  auto project = [&](Eigen::VectorXd& col, Eigen::Index j, bool record) {
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd weighted = mass.cwiseProduct(col);
      if (basis.cols() > 0) {
        const Eigen::VectorXd c = basis.transpose() * weighted;
        col.noalias() -= basis * c;
        if (record) out.coeffs.col(j) += c;
      }
      if (j > 0) {
        const Eigen::VectorXd c = block.leftCols(j).transpose() * weighted;
        col.noalias() -= block.leftCols(j) * c;
        if (record) out.r.col(j).head(j) += c;
      }
    }
  };
  for (Eigen::Index j = 0; j < b; ++j) {
    Eigen::VectorXd col = block.col(j);
    const double original = a_norm(col, mass);
    project(col, j, true);
    double norm = a_norm(col, mass);
    if (!(norm > kBreakdownRatio * original)) {
      // Invariant subspace reached in this direction: continue with a random one.
      out.r.col(j).setZero();
      col = random_block(block.rows(), 1, rng);
      project(col, j, false);
      norm = a_norm(col, mass);
    } else {
      out.r(j, j) = norm;
    }
    block.col(j) = col / norm;
  }
  return out;
}

// Rayleigh-Ritz with Q on A-orthonormal columns; fills values and residuals.
void refine_with_q(const BlockOperator& apply_q, const Eigen::VectorXd& mass, EigenPairs& pairs) {
  Eigen::MatrixXd q_psi = apply_q(pairs.vectors);
  Eigen::MatrixXd g = pairs.vectors.transpose() * q_psi;
  g = 0.5 * (g + g.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(g);
  pairs.vectors = pairs.vectors * small.eigenvectors();
  q_psi = q_psi * small.eigenvectors();
  pairs.values = small.eigenvalues();
  const Eigen::MatrixXd a_psi = mass.asDiagonal() * pairs.vectors;
  const Eigen::MatrixXd r = q_psi - a_psi * pairs.values.asDiagonal();
  pairs.residuals = r.colwise().norm().transpose().cwiseQuotient(a_psi.colwise().norm().transpose());
}

bool residuals_pass(const EigenPairs& pairs, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i)
    if (!(pairs.residuals[i] <= kResidualTolerance * std::max(1.0, std::abs(pairs.values[i])))) return false;
  return true;
}

// Block Davidson sweeps from converged-looking Ritz pairs: the space grows by the
// shift-inverted true residuals and Rayleigh-Ritz with Q picks the k smallest pairs.
// Corrections are computed from the residuals themselves, so their rounding shrinks with
// them; this reaches accuracies that the Krylov relation alone cannot certify.
bool polish(const BlockOperator& apply_q, const BlockOperator& shift_invert, const Eigen::VectorXd& mass,
            EigenPairs& pairs, int& applications, std::mt19937_64& rng) {
  const Eigen::Index n = pairs.vectors.rows();
  const Eigen::Index k = pairs.vectors.cols();
  Eigen::MatrixXd space = pairs.vectors;
  for (int sweep = 0; sweep < kPolishSweeps; ++sweep) {
    if (residuals_pass(pairs, k)) return true;
    if (space.cols() + k > n / 2) return false;
    const Eigen::MatrixXd r =
        apply_q(pairs.vectors) - mass.asDiagonal() * pairs.vectors * pairs.values.asDiagonal();
    Eigen::MatrixXd correction = shift_invert(mass.cwiseInverse().asDiagonal() * r);
    applications += static_cast<int>(k);
    orthonormalize(correction, space, mass, rng);
    Eigen::MatrixXd grown(n, space.cols() + k);
    grown << space, correction;
    space = std::move(grown);
    EigenPairs all;
    all.vectors = space;
    refine_with_q(apply_q, mass, all);
    pairs.values = all.values.head(k);
    pairs.vectors = all.vectors.leftCols(k);
    pairs.residuals = all.residuals.head(k);
  }
  return residuals_pass(pairs, k);
}

// Small problems: Rayleigh-Ritz over the whole space.
EigenPairs full_space(const BlockOperator& apply_q, const Eigen::VectorXd& mass, int k) {
  const Eigen::Index n = mass.size();
  EigenPairs pairs;
  pairs.vectors = mass.cwiseSqrt().cwiseInverse().asDiagonal() * Eigen::MatrixXd::Identity(n, n);
  refine_with_q(apply_q, mass, pairs);
  pairs.operator_applications = static_cast<int>(n);
  pairs.values = pairs.values.head(k).eval();
  pairs.vectors = pairs.vectors.leftCols(k).eval();
  pairs.residuals = pairs.residuals.head(k).eval();
  canonicalize_signs(pairs.vectors);
  return pairs;
}

}  // namespace

double default_shift(const Eigen::SparseMatrix<double>& stiffness) {
  return -1e-8 * stiffness.diagonal().mean();
}

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    const double threshold = 1e-6 * vectors.col(j).norm();
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > threshold) {
        if (vectors(i, j) < 0.0) vectors.col(j) *= -1.0;
        break;
      }
    }
  }
}

EigenPairs smallest_eigenpairs(const BlockOperator& apply_q, const BlockOperator& shift_invert,
                               const Eigen::VectorXd& mass, int k, const KrylovOptions& options) {
  const Eigen::Index n = mass.size();
  if (k < 1) throw InvalidInput("smallest_eigenpairs: k must be positive");
  if (k >= n) throw InvalidInput("smallest_eigenpairs: k = " + std::to_string(k) + " must be below n = " + std::to_string(n));
  if ((mass.array() <= 0.0).any()) throw InvalidInput("smallest_eigenpairs: mass must be positive");

  const Eigen::Index b = std::clamp(options.block, 1, k);
  Eigen::Index m = options.subspace > 0 ? options.subspace : std::min<Eigen::Index>(2 * k + 10, n);
  m = std::max<Eigen::Index>(m, k + 2 * b);
  if (m + b + k > n) return full_space(apply_q, mass, k);

  const double sigma = options.sigma;
  std::mt19937_64 rng(options.seed);
  // Converged near-null Ritz vectors are locked and projected out of every solve's input and output.
  // With a tiny shift the solves amplify rounding along the near-null modes by 1/|sigma|,
  // and the projection keeps that amplified noise out of the active Krylov basis.
  Eigen::MatrixXd locked(n, 0);
  Eigen::MatrixXd basis(n, m);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  auto deflate = [&](Eigen::MatrixXd& x) {
    if (locked.cols() == 0) return;
    for (int pass = 0; pass < 2; ++pass) x.noalias() -= locked * (locked.transpose() * (mass.asDiagonal() * x));
  };
  auto against = [&](Eigen::Index size) {
    Eigen::MatrixXd all(n, locked.cols() + size);
    all << locked, basis.leftCols(size);
    return all;
  };
  {
    Eigen::MatrixXd start = random_block(n, b, rng);
    orthonormalize(start, basis.leftCols(0), mass, rng);
    basis.leftCols(b) = start;
  }
  Eigen::Index size = b;
  double tolerance = options.tolerance;
  int applications = 0;

  for (int restart = 0;; ++restart) {
    const Eigen::Index wanted = k - locked.cols();
    Eigen::MatrixXd residual_block;
    Eigen::MatrixXd residual_r;
    while (true) {
      Eigen::MatrixXd input = basis.middleCols(size - b, b);
      deflate(input);
      Eigen::MatrixXd w = shift_invert(input);
      applications += static_cast<int>(b);
      deflate(w);
      BlockQr qr = orthonormalize(w, against(size), mass, rng);
      h.block(0, size - b, size, b) = qr.coeffs.bottomRows(size);
      if (size + b <= m) {
        basis.middleCols(size, b) = w;
        h.block(size, size - b, b, b) = qr.r;
        size += b;
      } else {
        residual_block = std::move(w);
        residual_r = std::move(qr.r);
        break;
      }
    }

    Eigen::MatrixXd t = h.topLeftCorner(size, size);
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t);
    // Largest theta <-> smallest lambda; reverse the ascending order.
    const Eigen::VectorXd theta = ritz.eigenvalues().reverse();
    const Eigen::MatrixXd y = ritz.eigenvectors().rowwise().reverse();
    const Eigen::VectorXd estimates = (residual_r * y.bottomRows(b)).colwise().norm().transpose();

    // Converged Ritz pairs are checked against the true residual of the pencil after a
    // Rayleigh-Ritz step with Q. Near-null pairs (lambda - sigma tiny next to the wanted
    // range) are locked and deflated as soon as they pass; everything else finishes together.
    Eigen::Index candidates = 0;
    while (candidates < wanted && theta[candidates] > 0.0 &&
           estimates[candidates] <= tolerance * std::abs(theta[candidates]) + kRelationNoise * theta[0])
      ++candidates;
    bool purge = false;
    if (candidates > 0) {
      EigenPairs trial;
      trial.vectors.resize(n, locked.cols() + candidates);
      trial.vectors << locked, basis.leftCols(size) * y.leftCols(candidates);
      refine_with_q(apply_q, mass, trial);
      auto leading_passes = [&] {
        Eigen::Index count = 0;
        while (count < trial.vectors.cols() &&
               trial.residuals[count] <= kResidualTolerance * std::max(1.0, std::abs(trial.values[count])))
          ++count;
        return count;
      };
      auto finish = [&] {
        trial.restarts = restart;
        trial.operator_applications = applications;
        canonicalize_signs(trial.vectors);
        return trial;
      };
      Eigen::Index passing = leading_passes();
      if (passing == k) return finish();
      const bool at_floor = tolerance <= kTightestTolerance;
      if (passing < trial.vectors.cols()) {
        // Converged by the Ritz estimate but not in truth. Either Q is stiffer than the
        // transformed operator suggests, and a tighter tolerance helps, or the Krylov
        // relation has hit its rounding floor and the true residuals must drive the rest.
        if (!at_floor) {
          tolerance = std::max(kTightestTolerance, tolerance * 1e-2);
        } else {
          const bool all = polish(apply_q, shift_invert, mass, trial, applications, rng);
          if (all && candidates == wanted) return finish();
          passing = leading_passes();
        }
      }
      const double range = trial.values.maxCoeff() - sigma;
      Eigen::Index nullish = locked.cols();
      while (nullish < passing && trial.values[nullish] - sigma < kNullRatio * range) ++nullish;
      if (nullish > locked.cols()) {
        locked = trial.vectors.leftCols(nullish);
        purge = true;
      } else if (at_floor && passing < trial.vectors.cols()) {
        // A near-null mode that still fails has polluted the relation; only a rebuild helps.
        purge = trial.values[locked.cols()] - sigma < kNullRatio * range;
      }
    }
    if (restart >= options.max_restarts) {
      std::ostringstream msg;
      msg << "smallest_eigenpairs: no convergence after " << restart << " restarts; Ritz residual estimates:";
      for (Eigen::Index i = 0; i < wanted; ++i) msg << ' ' << estimates[i] / std::max(std::abs(theta[i]), 1e-300);
      throw NumericalFailure(msg.str());
    }
    if (purge) {
      tolerance = options.tolerance;
      const Eigen::Index skip = k - wanted < locked.cols() ? locked.cols() - (k - wanted) : 0;
      Eigen::MatrixXd start = basis.leftCols(size) * y.middleCols(skip, b);
      deflate(start);
      h.setZero();
      orthonormalize(start, locked, mass, rng);
      basis.leftCols(b) = start;
      size = b;
      continue;
    }

    const Eigen::Index keep =
        std::max<Eigen::Index>(wanted, std::min<Eigen::Index>(m - 2 * b, (wanted + m) / 2));
    const Eigen::MatrixXd kept = basis.leftCols(size) * y.leftCols(keep);
    basis.leftCols(keep) = kept;
    h.setZero();
    h.topLeftCorner(keep, keep).diagonal() = theta.head(keep);
    h.block(keep, 0, b, keep) = residual_r * y.bottomRows(b).leftCols(keep);
    basis.middleCols(keep, b) = residual_block;
    size = keep + b;
  }
}

EigenPairs hard_constraint_eig(const Eigen::SparseMatrix<double>& z, const Eigen::VectorXd& mass,
                               const Eigen::MatrixXd& phi, int k, const KrylovOptions& options) {
  const Eigen::Index n = mass.size();
  const Eigen::Index kprime = phi.cols();
  if (z.rows() != n || z.cols() != n || (kprime > 0 && phi.rows() != n))
    throw InvalidInput("hard_constraint_eig: dimension mismatch");
  if (n > kHardPathMaxSize)
    throw InvalidInput("hard path refused: n = " + std::to_string(n) + " exceeds the dense guard of " +
                       std::to_string(kHardPathMaxSize) + " vertices (the dense projector needs O(n^2) memory); " +
                       "use the relaxed path");
  if (k < 1 || k + kprime > n) throw InvalidInput("hard_constraint_eig: need 1 <= k and k + k' <= n");

  // Work in the A^{1/2}-scaled space, where P becomes the orthogonal projector U U'.
  const Eigen::VectorXd sqrt_mass = mass.cwiseSqrt();
  const Eigen::VectorXd inv_sqrt = sqrt_mass.cwiseInverse();
  Eigen::MatrixXd m = inv_sqrt.asDiagonal() * Eigen::MatrixXd(z) * inv_sqrt.asDiagonal();
  Eigen::MatrixXd u(n, kprime);
  if (kprime > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(sqrt_mass.asDiagonal() * phi);
    u = qr.householderQ() * Eigen::MatrixXd::Identity(n, kprime);
    const Eigen::MatrixXd mu = m * u;
    const Eigen::MatrixXd utmu = u.transpose() * mu;
    m.noalias() -= u * mu.transpose();
    m.noalias() -= mu * u.transpose();
    m.noalias() += u * (utmu * u.transpose());
    // Lift the projector's null directions above every genuine eigenvalue.
    const double lift = 2.0 * m.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    m.noalias() += lift * (u * u.transpose());
  }
  m = 0.5 * (m + m.transpose()).eval();

  EigenPairs scaled;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  if (n <= kDenseOracleMaxSize) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw NumericalFailure("hard_constraint_eig: dense eigensolver failed");
    scaled.values = solver.eigenvalues().head(k);
    scaled.vectors = solver.eigenvectors().leftCols(k);
  } else {
    const double sigma = options.sigma != 0.0 ? options.sigma : -1e-8 * m.diagonal().mean();
    Eigen::MatrixXd shifted = m;
    shifted.diagonal().array() -= sigma;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(shifted);  // factorizes in place
    if (llt.info() != Eigen::Success)
      throw NumericalFailure("hard_constraint_eig: shifted projected operator is not positive definite");
    KrylovOptions opts = options;
    opts.sigma = sigma;
    scaled = smallest_eigenpairs([&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return m * x; },
                                 [&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return llt.solve(x); }, ones, k,
                                 opts);
  }
  if (kprime > 0) {
    // Remove rounding-level leakage into span(U), then re-orthonormalize.
    scaled.vectors -= u * (u.transpose() * scaled.vectors);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(scaled.vectors);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
    q -= u * (u.transpose() * q);
    const Eigen::MatrixXd g = q.transpose() * m * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(0.5 * (g + g.transpose()));
    scaled.vectors = q * small.eigenvectors();
    scaled.values = small.eigenvalues();
  }

  EigenPairs out;
  out.values = scaled.values;
  out.vectors = inv_sqrt.asDiagonal() * scaled.vectors;
  out.restarts = scaled.restarts;
  out.operator_applications = scaled.operator_applications;
  canonicalize_signs(out.vectors);
  const Eigen::MatrixXd r = m * scaled.vectors - scaled.vectors * scaled.values.asDiagonal();
  out.residuals = r.colwise().norm().transpose();
  return out;
}

}  // namespace lmh
