#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lmh/errors.hpp"
#include "lmh/mesh.hpp"
#include "lmh/region.hpp"

namespace lmh {

namespace detail {

// Faces below this fraction of the mean face area make cotangents meaningless.
inline constexpr double kDegenerateAreaRatio = 1e-12;

inline void check_face_areas(const Eigen::VectorXd& areas) {
  const double mean = areas.mean();
  for (Eigen::Index f = 0; f < areas.size(); ++f)
    if (!(areas[f] > kDegenerateAreaRatio * mean))
      throw InvalidInput("zero-area triangle: face " + std::to_string(f) + " has area " + std::to_string(areas[f]));
}

}  // namespace detail

/// Cotangent stiffness matrix, stored positive semi-definite.
///
/// The cotangent weight of edge ij is (cot a + cot b)/2 on interior edges and
/// cot a / 2 on boundary edges, where a, b are the angles opposite the edge.
/// Off-diagonal entries hold minus the weight, the diagonal holds the row sum
/// of weights, so W * ones = 0 and f' W f is the Dirichlet energy of f.
/// Obtuse angles yield negative weights; they are kept unclamped.
template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> assemble_stiffness(const TriMesh& mesh) {
  detail::check_face_areas(face_areas(mesh));
  const auto& V = mesh.vertices();
  const auto& F = mesh.faces();
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(12 * static_cast<std::size_t>(mesh.num_faces()));
  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int corner = 0; corner < 3; ++corner) {
      const int k = F(f, corner), i = F(f, (corner + 1) % 3), j = F(f, (corner + 2) % 3);
      const Vec3 pk = V.row(k).transpose().template cast<Scalar>();
      const Vec3 e1 = V.row(i).transpose().template cast<Scalar>() - pk;
      const Vec3 e2 = V.row(j).transpose().template cast<Scalar>() - pk;
      const Scalar half_cot = e1.dot(e2) / e1.cross(e2).norm() / Scalar(2);
      triplets.emplace_back(i, j, -half_cot);
      triplets.emplace_back(j, i, -half_cot);
      triplets.emplace_back(i, i, half_cot);
      triplets.emplace_back(j, j, half_cot);
    }
  }
  Eigen::SparseMatrix<Scalar> W(mesh.num_vertices(), mesh.num_vertices());
  W.setFromTriplets(triplets.begin(), triplets.end());
  return W;
}

// Lumped vertex areas a_i: one third of the incident triangle areas.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lumped_mass(const TriMesh& mesh) {
  const Eigen::VectorXd areas = face_areas(mesh);
  detail::check_face_areas(areas);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mass = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(mesh.num_vertices());
  const auto& F = mesh.faces();
  for (int f = 0; f < mesh.num_faces(); ++f)
    for (int c = 0; c < 3; ++c) mass[F(f, c)] += Scalar(areas[f]) / Scalar(3);
  return mass;
}

// The diagonal mass matrix A as a sparse operator.
template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> assemble_mass(const TriMesh& mesh) {
  const auto mass = lumped_mass<Scalar>(mesh);
  Eigen::SparseMatrix<Scalar> A(mass.size(), mass.size());
  A.reserve(Eigen::VectorXi::Ones(mass.size()));
  for (Eigen::Index i = 0; i < mass.size(); ++i) A.insert(i, i) = mass[i];
  A.makeCompressed();
  return A;
}

struct EnergyTerms {
  double smoothness;     // f' W f
  double locality;       // f' A diag(v) f
  double orthogonality;  // sum_i (phi_i' A f)^2
};

EnergyTerms energy_terms(const Eigen::SparseMatrix<double>& W, const Eigen::VectorXd& mass, const Region& region,
                         const Eigen::MatrixXd& phi, const Eigen::VectorXd& f);

// Coordinate-format dump: one "i j value" line per stored entry, 0-based.
void write_coordinate(std::ostream& out, const Eigen::SparseMatrix<double>& matrix);

}  // namespace lmh
