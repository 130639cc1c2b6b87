#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "lmh/eigensolver.hpp"
#include "lmh/fem.hpp"
#include "lmh/shapes.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace lmh;

namespace {

TriMesh right_triangle() {
  Eigen::MatrixX3d V(3, 3);
  V << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  Eigen::MatrixX3i F(1, 3);
  F << 0, 1, 2;
  return TriMesh(V, F);
}

}  // namespace

TEST_CASE("cotangent weights of a right isosceles triangle") {
  const Eigen::MatrixXd W = Eigen::MatrixXd(assemble_stiffness(right_triangle()));
  CHECK(std::abs(W(1, 2)) <= 1e-15);               // opposite the right angle
  CHECK(W(0, 1) == doctest::Approx(-0.5).epsilon(1e-15));  // legs: cot(45)/2
  CHECK(W(0, 2) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(W(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("stiffness matches the gradient-based FEM oracle") {
  for (const auto& [name, mesh] : testing::small_corpus()) {
    CAPTURE(name);
    const Eigen::MatrixXd W = Eigen::MatrixXd(assemble_stiffness(mesh));
    const Eigen::MatrixXd ref = oracle::gradient_stiffness(mesh);
    CHECK((W - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("stiffness invariants: symmetric, zero row sums, PSD") {
  std::mt19937_64 rng(3);
  for (const auto& [name, mesh] : testing::small_corpus()) {
    CAPTURE(name);
    const Eigen::SparseMatrix<double> W = assemble_stiffness(mesh);
    const Eigen::MatrixXd D(W);
    CHECK((D - D.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    for (Eigen::Index i = 0; i < D.rows(); ++i)
      CHECK(std::abs(D.row(i).sum()) <= 1e-10 * D.row(i).cwiseAbs().maxCoeff());
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd x = oracle::random_matrix(mesh.num_vertices(), 1, rng);
      const Eigen::VectorXd y = oracle::random_matrix(mesh.num_vertices(), 1, rng);
      CHECK(x.dot(W * x) >= -1e-10 * x.squaredNorm());
      CHECK(std::abs(y.dot(W * x) - x.dot(W * y)) <= 1e-10 * std::abs(x.dot(W * y)) + 1e-12);
    }
  }
}

TEST_CASE("Dirichlet energy of a linear function equals the area") {
  const TriMesh grid = grid_mesh(20, 20);
  const Eigen::VectorXd f = grid.vertices().col(0);
  CHECK(std::abs(f.dot(assemble_stiffness(grid) * f) - 1.0) <= 1e-10);
}

TEST_CASE("lumped mass") {
  const Eigen::VectorXd tetra = lumped_mass(tetrahedron(1.0));
  CHECK((tetra.array() - std::sqrt(3.0) / 4.0).abs().maxCoeff() <= 1e-15);
  const Eigen::VectorXd tri = lumped_mass(right_triangle());
  CHECK((tri.array() - 1.0 / 6.0).abs().maxCoeff() <= 1e-16);
  for (const auto& [name, mesh] : testing::small_corpus()) {
    CAPTURE(name);
    const Eigen::VectorXd m = lumped_mass(mesh);
    CHECK((m.array() > 0.0).all());
    CHECK(std::abs(m.sum() - surface_area(mesh)) <= 1e-10 * surface_area(mesh));
    CHECK((m - oracle::triangle_mass(mesh)).cwiseAbs().maxCoeff() <= 1e-14);
    const Eigen::SparseMatrix<double> A = assemble_mass(mesh);
    CHECK(A.nonZeros() == mesh.num_vertices());
    CHECK((Eigen::VectorXd(A.diagonal()) - m).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("zero-area triangles are rejected with the face index") {
  Eigen::MatrixX3d V(4, 3);
  V << 0, 0, 0, 1, 0, 0, 0, 1, 0, 2, 0, 0;
  Eigen::MatrixX3i F(2, 3);
  F << 0, 1, 2, 0, 1, 3;  // second face is collinear
  const TriMesh m(V, F);
  CHECK_THROWS_WITH_AS(assemble_stiffness(m), doctest::Contains("face 1"), InvalidInput);
  CHECK_THROWS_AS(lumped_mass(m), InvalidInput);
}

TEST_CASE("obtuse triangles keep negative weights") {
  Eigen::MatrixX3d V(3, 3);
  V << 0, 0, 0, 1, 0, 0, 0.5, 0.1, 0;
  Eigen::MatrixX3i F(1, 3);
  F << 0, 1, 2;
  const Eigen::MatrixXd W = Eigen::MatrixXd(assemble_stiffness(TriMesh(V, F)));
  CHECK(W(0, 1) > 0.0);  // minus a negative weight
}

TEST_CASE("energy terms") {
  const TriMesh grid = grid_mesh(10, 10);
  const Eigen::SparseMatrix<double> W = assemble_stiffness(grid);
  const Eigen::VectorXd m = lumped_mass(grid);
  const Region region = testing::box_region(grid, 0.2, 0.6, 0.2, 0.6);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.num_vertices());
  const Eigen::MatrixXd phi = ones / std::sqrt(m.sum());

  const EnergyTerms constant = energy_terms(W, m, region, phi, 3.0 * ones);
  CHECK(std::abs(constant.smoothness) <= 1e-12);

  Eigen::VectorXd inside = Eigen::VectorXd::Zero(grid.num_vertices());
  const auto flags = region.inside();
  for (int i = 0; i < grid.num_vertices(); ++i)
    if (flags[static_cast<std::size_t>(i)]) inside[i] = 1.0 + i;
  CHECK(energy_terms(W, m, region, phi, inside).locality == 0.0);

  const EnergyTerms unit = energy_terms(W, m, region, phi, phi.col(0));
  CHECK(unit.orthogonality == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937_64 rng(5);
  const Eigen::VectorXd f = oracle::random_matrix(grid.num_vertices(), 1, rng);
  const EnergyTerms any = energy_terms(W, m, region, phi, f);
  CHECK(any.smoothness >= 0.0);
  CHECK(any.locality >= 0.0);
  CHECK(any.orthogonality >= 0.0);
  CHECK(any.locality == doctest::Approx((m.array() * region.penalty().array() * f.array().square()).sum()));

  CHECK_THROWS_AS(energy_terms(W, m, region, phi, Eigen::VectorXd::Zero(5)), InvalidInput);
}

TEST_CASE("W and A are invariant under rigid motion") {
  std::mt19937_64 rng(8);
  const Bump bump{Eigen::Vector3d(0, 1, 0), 0.4, 0.3};
  const TriMesh m = bump_sphere(2, std::span<const Bump>(&bump, 1));
  const Eigen::MatrixXd W(assemble_stiffness(m));
  const Eigen::VectorXd A = lumped_mass(m);
  for (int trial = 0; trial < 5; ++trial) {
    const TriMesh moved = rigidly_moved(m, oracle::random_rotation(rng), 5.0 * oracle::random_matrix(3, 1, rng));
    CHECK((Eigen::MatrixXd(assemble_stiffness(moved)) - W).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((lumped_mass(moved) - A).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("second eigenvalue on the unit square converges to pi^2 under refinement") {
  const double target = std::numbers::pi * std::numbers::pi;
  double previous = std::numeric_limits<double>::infinity();
  for (int cells : {4, 8, 16, 32}) {
    const TriMesh grid = grid_mesh(cells, cells);
    const EigenPairs pairs = dense_oracle_eig(Eigen::MatrixXd(assemble_stiffness(grid)), lumped_mass(grid));
    const double error = std::abs(pairs.values[1] - target);
    CAPTURE(cells);
    CHECK(error < previous);
    previous = error;
  }
  CHECK(previous < 0.02 * target);
}

TEST_CASE("coordinate dump writes 0-based triples at full precision") {
  const Eigen::SparseMatrix<double> W = assemble_stiffness(grid_mesh(1, 1));
  std::ostringstream out;
  write_coordinate(out, W);
  std::istringstream in(out.str());
  Eigen::MatrixXd back = Eigen::MatrixXd::Zero(4, 4);
  int i, j, lines = 0;
  double v;
  while (in >> i >> j >> v) back(i, j) = v, ++lines;
  CHECK(lines == W.nonZeros());
  CHECK((back - Eigen::MatrixXd(W)).cwiseAbs().maxCoeff() == 0.0);
}
