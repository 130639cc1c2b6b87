#include "lmh/spectral.hpp"

#include <sstream>

#include "lmh/fem.hpp"

namespace lmh {

Reconstruction reconstruct_surface(const TriMesh& mesh, std::span<const SpectralBasis> bases) {
  return reconstruct_surface(mesh, lumped_mass(mesh), bases);
}

Reconstruction reconstruct_surface(const TriMesh& mesh, const Eigen::VectorXd& mass,
                                   std::span<const SpectralBasis> bases) {
  const int n = mesh.num_vertices();
  if (bases.empty()) throw InvalidInput("reconstruct_surface: no basis given");
  if (mass.size() != n) throw InvalidInput("reconstruct_surface: mass length does not match mesh");
  for (const auto& basis : bases)
    if (basis.vertices() != n) throw InvalidInput("reconstruct_surface: basis defined on a different mesh");

  Reconstruction out;
  out.coordinates = CoordinateField::Zero(n, 3);
  const Eigen::MatrixX3d ax = mass.asDiagonal() * mesh.vertices();
  for (std::size_t b = 0; b < bases.size(); ++b) {
    const auto& basis = bases[b];
    out.coordinates.noalias() += basis.functions * (basis.functions.transpose() * ax);
    if (basis.kind == BasisKind::MH) continue;
    for (const auto& other : bases) {
      if (other.kind != BasisKind::MH || other.size() == 0 || basis.size() == 0) continue;
      const double overlap =
          (other.functions.transpose() * mass.asDiagonal() * basis.functions).cwiseAbs().maxCoeff();
      if (overlap > kMixedOrthogonalityTolerance) {
        std::ostringstream msg;
        msg << "basis " << b << " (" << to_string(basis.kind) << ") overlaps the MH block: max |<phi, psi>| = "
            << overlap;
        out.warnings.push_back(msg.str());
      }
    }
  }
  return out;
}

ReconstructionError reconstruction_error(const TriMesh& mesh, const CoordinateField& reconstructed) {
  if (reconstructed.rows() != mesh.num_vertices()) throw InvalidInput("reconstruction_error: dimension mismatch");
  ReconstructionError err;
  err.per_vertex = (mesh.vertices() - reconstructed).rowwise().norm();
  err.mean = err.per_vertex.mean();
  return err;
}

}  // namespace lmh
