#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lmh/errors.hpp"
#include "lmh/lmh.hpp"
#include "lmh/mesh.hpp"

namespace lmh {

// Embedding coordinates x1, x2, x3 as the columns of an n x 3 matrix.
using CoordinateField = Eigen::MatrixX3d;

/// Fourier coefficients c_i = psi_i' A f, one column per input function.
template <typename Derived>
Eigen::Matrix<double, Eigen::Dynamic, Derived::ColsAtCompileTime> analyze(const SpectralBasis& basis,
                                                                          const Eigen::VectorXd& mass,
                                                                          const Eigen::MatrixBase<Derived>& f) {
  if (f.rows() != basis.vertices() || mass.size() != basis.vertices())
    throw InvalidInput("analyze: dimension mismatch");
  return basis.functions.transpose() * (mass.asDiagonal() * f.template cast<double>());
}

/// Linear combination of the first coefficients.rows() basis functions.
template <typename Derived>
Eigen::Matrix<double, Eigen::Dynamic, Derived::ColsAtCompileTime> synthesize(
    const SpectralBasis& basis, const Eigen::MatrixBase<Derived>& coefficients) {
  if (coefficients.rows() > basis.size()) throw InvalidInput("synthesize: more coefficients than basis functions");
  return basis.functions.leftCols(coefficients.rows()) * coefficients.template cast<double>();
}

inline constexpr double kMixedOrthogonalityTolerance = 1e-3;

struct Reconstruction {
  CoordinateField coordinates;
  std::vector<std::string> warnings;
};

/// Projects the embedding onto each basis and sums the syntheses. With one
/// MH basis this is the truncated MH expansion; appending LMH bases adds
/// their localized detail. Non-MH bases that are not orthogonal to the MH
/// bases (1e-3) produce a warning; the result is still returned.
Reconstruction reconstruct_surface(const TriMesh& mesh, std::span<const SpectralBasis> bases);
Reconstruction reconstruct_surface(const TriMesh& mesh, const Eigen::VectorXd& mass,
                                   std::span<const SpectralBasis> bases);

struct ReconstructionError {
  Eigen::VectorXd per_vertex;
  double mean = 0.0;  // unweighted over vertices
};

ReconstructionError reconstruction_error(const TriMesh& mesh, const CoordinateField& reconstructed);

}  // namespace lmh
