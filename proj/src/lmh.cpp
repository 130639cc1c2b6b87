#include "lmh/lmh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lmh/fem.hpp"

namespace lmh {

namespace {

constexpr double kPhiOrthonormalityTolerance = 1e-6;
constexpr double kOrthogonalityWarning = 1e-3;
constexpr double kGapSlack = 1e-6;
constexpr double kBoundMargin = 1e-3;

double resolve_shift(const Discretization& disc, const SolveOptions& options) {
  return options.krylov.sigma != 0.0 ? options.krylov.sigma : default_shift(disc.stiffness);
}

Eigen::VectorXd dirichlet_energies(const Eigen::SparseMatrix<double>& w, const Eigen::MatrixXd& functions) {
  return (functions.transpose() * (w * functions)).diagonal();
}

// k smallest eigenpairs of (Z + mu_perp B B', A) through the relaxed fast path.
EigenPairs solve_relaxed(const LmhOperator& op, int k, double sigma, const KrylovOptions& krylov) {
  const LowRankShiftedSystem system = op.shifted_system(sigma);
  KrylovOptions opts = krylov;
  opts.sigma = sigma;
  return smallest_eigenpairs([&](const Eigen::MatrixXd& x) { return op.apply(x); },
                             [&](const Eigen::MatrixXd& x) { return system.solve(x); }, op.mass(), k, opts);
}

EigenPairs solve_oracle(const LmhOperator& op, int k) {
  EigenPairs all = dense_oracle_eig(op.dense(), op.mass());
  all.values = all.values.head(k).eval();
  all.vectors = all.vectors.leftCols(k).eval();
  all.residuals = all.residuals.head(k).eval();
  return all;
}

void check_region(const Discretization& disc, const Region& region) {
  if (region.size() != disc.size())
    throw InvalidInput("region has " + std::to_string(region.size()) + " values but the mesh has " +
                       std::to_string(disc.size()) + " vertices");
}

}  // namespace

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::MH: return "MH";
    case BasisKind::LMH: return "LMH";
    case BasisKind::PMH: return "PMH";
  }
  return "?";
}

std::string to_string(SolverPath path) {
  switch (path) {
    case SolverPath::Relaxed: return "relaxed";
    case SolverPath::Hard: return "hard";
    case SolverPath::Oracle: return "oracle";
  }
  return "?";
}

Discretization discretize(const TriMesh& mesh) {
  return Discretization{assemble_stiffness(mesh), lumped_mass(mesh)};
}

SpectralBasis compute_mh(const Discretization& disc, int k, const SolveOptions& options) {
  const LmhOperator op(disc, Region::everywhere(static_cast<int>(disc.size())), Eigen::MatrixXd(disc.size(), 0), 0.0,
                       0.0);
  EigenPairs pairs;
  if (options.path == SolverPath::Relaxed) {
    pairs = solve_relaxed(op, k, resolve_shift(disc, options), options.krylov);
  } else {
    // Without constraints the hard path and the oracle coincide.
    if (k < 1 || k > disc.size()) throw InvalidInput("compute_mh: k out of range");
    pairs = solve_oracle(op, k);
  }
  SpectralBasis basis;
  basis.functions = std::move(pairs.vectors);
  basis.spectrum = std::move(pairs.values);
  basis.dirichlet = dirichlet_energies(disc.stiffness, basis.functions);
  basis.kind = BasisKind::MH;
  return basis;
}

SpectralBasis compute_mh(const TriMesh& mesh, int k, const SolveOptions& options) {
  return compute_mh(discretize(mesh), k, options);
}

LmhOperator::LmhOperator(const Discretization& disc, const Region& region, Eigen::MatrixXd phi, double mu_R,
                         double mu_perp)
    : mass_(disc.mass), phi_(std::move(phi)), mu_R_(mu_R), mu_perp_(mu_perp) {
  check_region(disc, region);
  if (!(mu_R >= 0.0) || !(mu_perp >= 0.0)) throw InvalidInput("mu_R and mu_perp must be non-negative");
  if (phi_.cols() > 0 && phi_.rows() != disc.size()) throw InvalidInput("phi row count does not match the mesh");
  const Eigen::VectorXd weight = mu_R * mass_.cwiseProduct(region.penalty());
  z_ = disc.stiffness;
  for (Eigen::Index i = 0; i < weight.size(); ++i)
    if (weight[i] != 0.0) z_.coeffRef(i, i) += weight[i];
  z_.makeCompressed();
  b_ = mass_.asDiagonal() * phi_;
}

Eigen::MatrixXd LmhOperator::apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y = z_ * x;
  if (phi_.cols() > 0 && mu_perp_ != 0.0) y.noalias() += mu_perp_ * (b_ * (b_.transpose() * x));
  return y;
}

Eigen::MatrixXd LmhOperator::dense() const {
  Eigen::MatrixXd q(z_);
  if (phi_.cols() > 0 && mu_perp_ != 0.0) q.noalias() += mu_perp_ * (b_ * b_.transpose());
  return q;
}

LowRankShiftedSystem LmhOperator::shifted_system(double sigma) const {
  Eigen::SparseMatrix<double> shifted = z_;
  for (Eigen::Index i = 0; i < mass_.size(); ++i) shifted.coeffRef(i, i) -= sigma * mass_[i];
  shifted.makeCompressed();
  return LowRankShiftedSystem(std::move(shifted), mass_, b_, mu_perp_);
}

LmhOperator build_lmh_operator(const Discretization& disc, const Region& region, const Eigen::MatrixXd& phi,
                               double mu_R, double mu_perp) {
  if (phi.cols() > 0) {
    if (phi.rows() != disc.size()) throw InvalidInput("phi row count does not match the mesh");
    const Eigen::MatrixXd gram = phi.transpose() * disc.mass.asDiagonal() * phi;
    const double deviation = (gram - Eigen::MatrixXd::Identity(phi.cols(), phi.cols())).cwiseAbs().maxCoeff();
    if (deviation > kPhiOrthonormalityTolerance)
      throw InvalidInput("phi is not A-orthonormal (max deviation " + std::to_string(deviation) + ")");
  }
  return LmhOperator(disc, region, phi, mu_R, mu_perp);
}

SpectralBasis compute_lmh(const Discretization& disc, const Region& region, const LmhParams& params,
                          const SolveOptions& options, const SpectralBasis* global) {
  check_region(disc, region);
  const Eigen::Index n = disc.size();
  if (params.k < 1 || params.kprime < 0) throw InvalidInput("compute_lmh: need k >= 1 and k' >= 0");
  if (params.k + params.kprime >= n)
    throw InvalidInput("compute_lmh: k + k' = " + std::to_string(params.k + params.kprime) +
                       " must be below the vertex count " + std::to_string(n));

  SpectralBasis out;
  out.kind = BasisKind::LMH;

  // Phi plus, when available, lambda_{k'+1}(W) for the mu_perp rule.
  Eigen::MatrixXd phi(n, 0);
  std::optional<double> next_eigenvalue;
  if (params.kprime > 0) {
    SpectralBasis computed;
    if (global == nullptr || global->size() < params.kprime) {
      const int count = std::min<int>(params.kprime + 1, static_cast<int>(n) - 1);
      SolveOptions mh_options = options;
      if (mh_options.path == SolverPath::Hard) mh_options.path = SolverPath::Relaxed;
      computed = compute_mh(disc, count, mh_options);
      global = &computed;
    }
    phi = global->functions.leftCols(params.kprime);
    if (global->size() > params.kprime) next_eigenvalue = global->spectrum[params.kprime];
  }

  double mu_perp = 0.0;
  if (params.kprime > 0) {
    if (params.mu_perp) {
      mu_perp = *params.mu_perp;
      if (next_eigenvalue && mu_perp < *next_eigenvalue) {
        std::ostringstream msg;
        msg << "mu_perp = " << mu_perp << " is below lambda_{k'+1}(W) = " << *next_eigenvalue
            << "; orthogonality to the global basis is not enforced";
        out.warnings.push_back(msg.str());
      }
    } else {
      mu_perp = std::max(kDefaultMuPerp, next_eigenvalue ? 10.0 * *next_eigenvalue : 0.0);
    }
  } else if (params.mu_perp) {
    mu_perp = *params.mu_perp;
  }

  const LmhOperator op = build_lmh_operator(disc, region, phi, params.mu_R, mu_perp);
  EigenPairs pairs;
  switch (options.path) {
    case SolverPath::Relaxed:
      pairs = solve_relaxed(op, params.k, resolve_shift(disc, options), options.krylov);
      break;
    case SolverPath::Oracle:
      pairs = solve_oracle(op, params.k);
      break;
    case SolverPath::Hard: {
      KrylovOptions krylov = options.krylov;
      pairs = hard_constraint_eig(op.local_part(), disc.mass, phi, params.k, krylov);
      mu_perp = std::numeric_limits<double>::infinity();
      break;
    }
  }

  out.functions = std::move(pairs.vectors);
  out.spectrum = std::move(pairs.values);
  out.dirichlet = dirichlet_energies(disc.stiffness, out.functions);
  out.params = BasisParams{params.kprime, params.mu_R, mu_perp, region};
  if (params.kprime > 0) {
    const double leak = (phi.transpose() * disc.mass.asDiagonal() * out.functions).cwiseAbs().maxCoeff();
    if (leak > kOrthogonalityWarning) {
      std::ostringstream msg;
      msg << "max |phi' A psi| = " << leak << " exceeds " << kOrthogonalityWarning
          << "; increase mu_perp for the requested orthogonality";
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

SpectralBasis compute_lmh(const TriMesh& mesh, const Region& region, const LmhParams& params,
                          const SolveOptions& options) {
  return compute_lmh(discretize(mesh), region, params, options);
}

SpectralBasis compute_pmh(const TriMesh& mesh, const Region& region, int k, const SolveOptions& options) {
  if (region.size() != mesh.num_vertices()) throw InvalidInput("region length does not match mesh");
  if (!region.is_binary()) throw InvalidInput("partial harmonics need a binary region");
  const Submesh sub = extract_submesh(mesh, region.inside());
  if (sub.mesh.num_vertices() < 4)
    throw InvalidInput("region submesh has " + std::to_string(sub.mesh.num_vertices()) + " vertices; need at least 4");
  if (k >= sub.mesh.num_vertices()) throw InvalidInput("compute_pmh: k must be below the submesh vertex count");
  const Discretization part = discretize(sub.mesh);
  SpectralBasis local = compute_mh(part, k, options);

  SpectralBasis out;
  out.kind = BasisKind::PMH;
  out.functions = Eigen::MatrixXd::Zero(mesh.num_vertices(), k);
  for (std::size_t i = 0; i < sub.to_parent.size(); ++i) out.functions.row(sub.to_parent[i]) = local.functions.row(i);
  out.spectrum = std::move(local.spectrum);
  out.dirichlet = std::move(local.dirichlet);
  out.params.region = region;
  return out;
}

Region soft_region_from_seeds(const TriMesh& mesh, const std::vector<int>& seeds, std::optional<double> variance) {
  if (seeds.empty()) throw InvalidInput("soft region needs at least one seed");
  for (int s : seeds)
    if (s < 0 || s >= mesh.num_vertices()) throw InvalidInput("seed vertex " + std::to_string(s) + " out of range");
  double var = 0.0;
  if (variance) {
    var = *variance;
  } else {
    const double sd = 0.01 * intrinsic_diameter(mesh);
    var = sd * sd;
  }
  if (!(var > 0.0)) throw InvalidInput("soft region variance must be positive");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int s : seeds) {
    const Eigen::VectorXd d = graph_geodesics(mesh, s);
    // std::exp underflows to exactly 0; Eigen's vectorized exp stops near 1e-308.
    u.array() += (-d.array().square() / (2.0 * var)).unaryExpr([](double x) { return std::exp(x); });
  }
  // Seeds themselves must be exactly inside even when exp underflows elsewhere.
  u = u.cwiseMin(1.0);
  for (int s : seeds) u[s] = 1.0;
  return Region(std::move(u));
}

Eigen::VectorXd energy_fraction_inside(const Eigen::MatrixXd& functions, const Eigen::VectorXd& mass,
                                       const Region& region) {
  if (functions.rows() != mass.size() || region.size() != mass.size())
    throw InvalidInput("energy_fraction_inside: dimension mismatch");
  const Eigen::ArrayXd inside = (region.membership().array() == 1.0).cast<double>();
  const Eigen::MatrixXd weighted = mass.asDiagonal() * functions.cwiseAbs2();
  const Eigen::VectorXd total = weighted.colwise().sum().transpose();
  const Eigen::VectorXd in = (inside.matrix().asDiagonal() * weighted).colwise().sum().transpose();
  return in.cwiseQuotient(total);
}

GapReport verify_spectral_gap(const TriMesh& mesh, const Region& region, int kprime, double mu_R,
                              std::optional<double> mu_perp, const SolveOptions& options) {
  const Discretization disc = discretize(mesh);
  const int n = static_cast<int>(disc.size());
  if (kprime < 1 || kprime > n - 1) throw InvalidInput("spectral gap check needs 1 <= k' <= n-1");

  SolveOptions mh_options = options;
  if (kprime + 1 >= n - 1 || options.path != SolverPath::Relaxed) {
    if (n > kDenseOracleMaxSize) throw InvalidInput("k' this close to n needs the dense oracle; mesh is too large");
    mh_options.path = SolverPath::Oracle;
  }
  const SpectralBasis global = compute_mh(disc, kprime + 1, mh_options);

  GapReport report;
  report.lambda_kprime_w = global.spectrum[kprime - 1];
  report.lambda_next_w = global.spectrum[kprime];
  report.mu_perp = mu_perp.value_or(std::max(kDefaultMuPerp, 10.0 * report.lambda_next_w));
  if (!(report.mu_perp > report.lambda_next_w)) {
    std::ostringstream msg;
    msg << "mu_perp = " << report.mu_perp << " must exceed lambda_{k'+1}(W) = " << report.lambda_next_w;
    throw InvalidInput(msg.str());
  }

  const LmhOperator op = build_lmh_operator(disc, region, global.functions.leftCols(kprime), mu_R, report.mu_perp);
  EigenPairs first;
  if (options.path == SolverPath::Relaxed && n - kprime > 2) {
    first = solve_relaxed(op, 1, resolve_shift(disc, options), options.krylov);
  } else {
    first = solve_oracle(op, 1);
  }
  report.lambda1_q = first.values[0];
  report.gap = report.lambda1_q - report.lambda_kprime_w;
  report.passed = report.gap >= -kGapSlack * report.lambda_kprime_w;
  return report;
}

BoundReport verify_upper_bound(const TriMesh& mesh, const Region& region, int kprime, int k, double mu_R,
                               double mu_perp, const SolveOptions& options) {
  if (!region.is_binary()) throw InvalidInput("upper bound check needs a binary region");
  if (k < 1 || kprime < 0) throw InvalidInput("upper bound check needs k >= 1 and k' >= 0");
  const Discretization disc = discretize(mesh);
  const Submesh sub = extract_submesh(mesh, region.inside());
  const Discretization part = discretize(sub.mesh);
  if (k + kprime >= part.size()) throw InvalidInput("k + k' must be below the region's vertex count");

  // v = (1-u)^2 is already the indicator of the complement for binary u.
  LmhParams params;
  params.k = k;
  params.kprime = kprime;
  params.mu_R = mu_R;
  params.mu_perp = mu_perp;
  const SpectralBasis lmh = compute_lmh(disc, region, params, options);
  const SpectralBasis partial = compute_mh(part, k + kprime, options);

  BoundReport report;
  report.lmh_spectrum = lmh.spectrum;
  report.partial_spectrum = partial.spectrum.tail(k);
  report.passed = true;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    const double bound = report.partial_spectrum[i];
    report.max_violation = std::max(report.max_violation, (report.lmh_spectrum[i] - bound) / bound);
    if (report.lmh_spectrum[i] > bound * (1.0 + kBoundMargin)) report.passed = false;
  }
  return report;
}

WeylFit weyl_fit(const Eigen::VectorXd& spectrum) {
  const Eigen::Index m = spectrum.size();
  if (m < 10) throw InvalidInput("Weyl fit needs at least 10 eigenvalues, got " + std::to_string(m));
  const Eigen::Index first = m / 2;
  const Eigen::Index count = m - first;
  Eigen::VectorXd x(count), y(count);
  for (Eigen::Index j = 0; j < count; ++j) {
    x[j] = static_cast<double>(first + j + 1);
    y[j] = spectrum[first + j] - spectrum[0];
  }
  const double mx = x.mean(), my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx, dy = y.array() - my;
  const double sxx = (dx * dx).sum(), sxy = (dx * dy).sum(), syy = (dy * dy).sum();
  WeylFit fit;
  fit.slope = sxy / sxx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

WeylFit weyl_slope(const SpectralBasis& basis, double region_area) {
  WeylFit fit = weyl_fit(basis.spectrum);
  fit.normalized_slope = fit.slope * std::sqrt(region_area);
  return fit;
}

}  // namespace lmh
