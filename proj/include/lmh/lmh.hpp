#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lmh/eigensolver.hpp"
#include "lmh/factorization.hpp"
#include "lmh/mesh.hpp"
#include "lmh/region.hpp"

namespace lmh {

// Stiffness W and lumped mass diag(A) of one mesh.
struct Discretization {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;

  Eigen::Index size() const { return mass.size(); }
};

Discretization discretize(const TriMesh& mesh);

enum class BasisKind { MH, LMH, PMH };
enum class SolverPath { Relaxed, Hard, Oracle };

std::string to_string(BasisKind kind);
std::string to_string(SolverPath path);

struct BasisParams {
  int kprime = 0;
  double mu_R = 0.0;
  double mu_perp = 0.0;  // +inf for the hard-constrained path
  std::optional<Region> region;
};

/// A-orthonormal functions (columns) with their generalized eigenvalues and
/// Dirichlet energies psi' W psi.
struct SpectralBasis {
  Eigen::MatrixXd functions;
  Eigen::VectorXd spectrum;
  Eigen::VectorXd dirichlet;
  BasisKind kind = BasisKind::MH;
  BasisParams params;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(functions.cols()); }
  int vertices() const { return static_cast<int>(functions.rows()); }
};

struct SolveOptions {
  SolverPath path = SolverPath::Relaxed;
  KrylovOptions krylov;  // krylov.sigma == 0 selects default_shift(W)
};

SpectralBasis compute_mh(const Discretization& disc, int k, const SolveOptions& options = {});
SpectralBasis compute_mh(const TriMesh& mesh, int k, const SolveOptions& options = {});

/// Q = W + mu_R A diag(v) + mu_perp (A phi)(A phi)', applied without ever
/// forming the rank-k' term densely.
class LmhOperator {
public:
  LmhOperator(const Discretization& disc, const Region& region, Eigen::MatrixXd phi, double mu_R, double mu_perp);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;

  // Explicit n x n matrix; only for oracles on small meshes.
  Eigen::MatrixXd dense() const;

  // Z = W + mu_R A diag(v), the sparse part.
  const Eigen::SparseMatrix<double>& local_part() const { return z_; }
  const Eigen::MatrixXd& phi() const { return phi_; }
  const Eigen::VectorXd& mass() const { return mass_; }
  double mu_R() const { return mu_R_; }
  double mu_perp() const { return mu_perp_; }

  // (Z - sigma A) + mu_perp B B' with B = A phi, ready for Woodbury solves.
  LowRankShiftedSystem shifted_system(double sigma) const;

private:
  Eigen::SparseMatrix<double> z_;
  Eigen::VectorXd mass_;
  Eigen::MatrixXd phi_;
  Eigen::MatrixXd b_;
  double mu_R_;
  double mu_perp_;
};

// Checks dimensions, non-negative weights and A-orthonormality of phi (1e-6).
LmhOperator build_lmh_operator(const Discretization& disc, const Region& region, const Eigen::MatrixXd& phi,
                               double mu_R, double mu_perp);

inline constexpr double kDefaultMuR = 100.0;
inline constexpr double kDefaultMuPerp = 1e5;

struct LmhParams {
  int k = 10;
  int kprime = 0;
  double mu_R = kDefaultMuR;
  // Unset: max(1e5, 10 * lambda_{k'+1}(W)).
  std::optional<double> mu_perp;
};

/// k smallest eigenpairs of (Q, A). The first k' MH are computed unless
/// `global` supplies at least k' of them.
SpectralBasis compute_lmh(const Discretization& disc, const Region& region, const LmhParams& params,
                          const SolveOptions& options = {}, const SpectralBasis* global = nullptr);
SpectralBasis compute_lmh(const TriMesh& mesh, const Region& region, const LmhParams& params,
                          const SolveOptions& options = {});

/// MH of the submesh induced by a binary region, zero-padded to the full mesh.
SpectralBasis compute_pmh(const TriMesh& mesh, const Region& region, int k, const SolveOptions& options = {});

/// u_i = min(1, sum_s exp(-d(i,s)^2 / (2 variance))) with graph geodesics d.
/// The default variance is (0.01 * intrinsic diameter)^2.
Region soft_region_from_seeds(const TriMesh& mesh, const std::vector<int>& seeds,
                              std::optional<double> variance = std::nullopt);

// Fraction of each column's A-weighted squared norm carried by vertices with u == 1.
Eigen::VectorXd energy_fraction_inside(const Eigen::MatrixXd& functions, const Eigen::VectorXd& mass,
                                       const Region& region);

struct GapReport {
  double lambda_kprime_w = 0.0;  // lambda_{k'}(W)
  double lambda_next_w = 0.0;    // lambda_{k'+1}(W)
  double lambda1_q = 0.0;        // lambda_1(Q)
  double gap = 0.0;              // lambda_1(Q) - lambda_{k'}(W)
  double mu_perp = 0.0;
  bool passed = false;
  std::vector<std::string> warnings;
};

/// Lower bound lambda_{k'}(W) <= lambda_1(Q). Passes when
/// gap >= -1e-6 * lambda_{k'}(W). Requires mu_perp > lambda_{k'+1}(W).
GapReport verify_spectral_gap(const TriMesh& mesh, const Region& region, int kprime, double mu_R,
                              std::optional<double> mu_perp = std::nullopt, const SolveOptions& options = {});

struct BoundReport {
  Eigen::VectorXd lmh_spectrum;      // lambda_i(Q), i = 1..k
  Eigen::VectorXd partial_spectrum;  // lambda_{i+k'}(W^R), i = 1..k
  double max_violation = 0.0;        // max_i (lambda_i(Q) - lambda_{i+k'}(W^R)) / lambda_{i+k'}(W^R)
  bool passed = false;
};

inline constexpr double kUpperBoundMuR = 1e4;

/// Upper bound lambda_i(Q) <= lambda_{i+k'}(W^R) for a binary region R, with
/// v the indicator of the complement of R. Passes within a 1e-3 relative margin.
BoundReport verify_upper_bound(const TriMesh& mesh, const Region& region, int kprime, int k,
                               double mu_R = kUpperBoundMuR, double mu_perp = kDefaultMuPerp,
                               const SolveOptions& options = {});

struct WeylFit {
  double slope = 0.0;
  double r_squared = 0.0;
  double normalized_slope = 0.0;  // slope * sqrt(region area)
};

// Least-squares line through (i, lambda_i - lambda_1) over the upper half of i.
WeylFit weyl_fit(const Eigen::VectorXd& spectrum);
WeylFit weyl_slope(const SpectralBasis& basis, double region_area);

}  // namespace lmh
