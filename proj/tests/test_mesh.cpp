#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lmh/errors.hpp"
#include "lmh/mesh.hpp"
#include "lmh/shapes.hpp"
#include "support/oracles.hpp"

using namespace lmh;

namespace {

const char* kTetraOff =
    "OFF\n4 4 0\n"
    "0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
    "3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n";

const char* kTriangleOff = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";

TriMesh two_vertex_path(double length) {
  // A thin triangle whose 0-1 edge has the given length; the third vertex is far away.
  Eigen::MatrixX3d V(3, 3);
  V << 0, 0, 0, length, 0, 0, 0.5 * length, 100.0 * length, 0;
  Eigen::MatrixX3i F(1, 3);
  F << 0, 1, 2;
  return TriMesh(V, F);
}

}  // namespace

TEST_CASE("OFF tetrahedron has six interior edges") {
  const TriMesh m = load_mesh(kTetraOff, MeshFormat::OFF);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_faces() == 4);
  CHECK(m.interior_edges().size() == 6);
  CHECK(m.boundary_edges().empty());
}

TEST_CASE("OFF single triangle has three boundary edges") {
  const TriMesh m = load_mesh(kTriangleOff, MeshFormat::OFF);
  CHECK(m.interior_edges().empty());
  CHECK(m.boundary_edges().size() == 3);
}

TEST_CASE("edge shared by three faces is rejected") {
  const char* fan = "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
  CHECK_THROWS_AS(load_mesh(fan, MeshFormat::OFF), InvalidInput);
}

TEST_CASE("malformed and unsupported input") {
  CHECK_THROWS_AS(load_mesh("", MeshFormat::OFF), InvalidInput);
  CHECK_THROWS_AS(load_mesh("PLY\n", MeshFormat::OFF), InvalidInput);
  CHECK_THROWS_AS(load_mesh("OFF\n3 1 0\n0 0 0\n1 zero 0\n0 1 0\n3 0 1 2\n", MeshFormat::OFF), InvalidInput);
  CHECK_THROWS_AS(load_mesh("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n4 0 1 3 2\n", MeshFormat::OFF), InvalidInput);
  CHECK_THROWS_AS(load_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n", MeshFormat::OFF), InvalidInput);
  CHECK_THROWS_AS(load_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 1\n", MeshFormat::OFF), InvalidInput);
  CHECK_THROWS_AS(load_mesh("OFF\n0 0 0\n", MeshFormat::OFF), InvalidInput);
  CHECK_THROWS_AS(load_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 4 3\n", MeshFormat::OBJ), InvalidInput);
}

TEST_CASE("OBJ parsing skips normals and texture records") {
  const char* obj =
      "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\n"
      "f 1/1/1 2/1/1 3/1/1\n";
  const TriMesh m = load_mesh(obj, MeshFormat::OBJ);
  CHECK(m.num_vertices() == 3);
  CHECK(m.num_faces() == 1);
  CHECK(m.faces()(0, 2) == 2);
}

TEST_CASE("OFF round trip preserves the mesh") {
  const TriMesh a = icosphere(1);
  const TriMesh b = load_mesh(to_off(a), MeshFormat::OFF);
  CHECK(b.faces() == a.faces());
  CHECK((b.vertices() - a.vertices()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("edge classification is a partition of the face edges") {
  for (const TriMesh& m : {grid_mesh(5, 7), icosphere(2), tetrahedron(), grid_mesh(1, 1)}) {
    const auto all = oracle::face_edges(m);
    std::vector<Edge> merged = m.interior_edges();
    merged.insert(merged.end(), m.boundary_edges().begin(), m.boundary_edges().end());
    std::sort(merged.begin(), merged.end());
    CHECK(std::adjacent_find(merged.begin(), merged.end()) == merged.end());
    REQUIRE(merged.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(merged[i] == Edge{all[i][0], all[i][1]});
  }
}

TEST_CASE("graph geodesics: trivial cases") {
  const TriMesh grid = grid_mesh(4, 4);
  CHECK(graph_geodesics(grid, 7)[7] == 0.0);
  const TriMesh path = two_vertex_path(2.5);
  CHECK(graph_geodesics(path, 0)[1] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK_THROWS_AS(graph_geodesics(grid, 25), InvalidInput);
  CHECK_THROWS_AS(graph_geodesics(grid, -1), InvalidInput);
}

TEST_CASE("graph geodesics match Bellman-Ford on a 10x10 grid") {
  const TriMesh grid = grid_mesh(10, 10);
  const Eigen::VectorXd d = graph_geodesics(grid, 0);
  const Eigen::VectorXd ref = oracle::bellman_ford(grid, 0);
  CHECK((d - ref).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d[grid.num_vertices() - 1] == doctest::Approx(ref[grid.num_vertices() - 1]));
}

TEST_CASE("graph geodesics are symmetric and satisfy the triangle inequality") {
  const TriMesh m = icosphere(2);
  REQUIRE(m.num_vertices() <= 200);
  Eigen::MatrixXd d(m.num_vertices(), m.num_vertices());
  for (int s = 0; s < m.num_vertices(); ++s) d.col(s) = graph_geodesics(m, s);
  CHECK((d - d.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * d.maxCoeff());
  const Eigen::MatrixXd ref = oracle::floyd_warshall(m);
  CHECK((d - ref).cwiseAbs().maxCoeff() <= 1e-14);
  for (const auto& e : oracle::face_edges(m))
    CHECK((d.col(e[0]) - d.col(e[1])).cwiseAbs().maxCoeff() <= oracle::edge_length(m, e[0], e[1]) + 1e-14);
}

TEST_CASE("multi-source geodesics take the nearest source") {
  const TriMesh m = grid_mesh(8, 8);
  const Eigen::VectorXd a = graph_geodesics(m, 0), b = graph_geodesics(m, 80);
  CHECK((graph_geodesics(m, std::vector<int>{0, 80}) - a.cwiseMin(b)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unreachable vertices are at infinite distance") {
  Eigen::MatrixX3d V(6, 3);
  V << 0, 0, 0, 1, 0, 0, 0, 1, 0, 5, 0, 0, 6, 0, 0, 5, 1, 0;
  Eigen::MatrixX3i F(2, 3);
  F << 0, 1, 2, 3, 4, 5;
  const TriMesh m(V, F);
  const Eigen::VectorXd d = graph_geodesics(m, 0);
  CHECK(std::isinf(d[4]));
  CHECK_FALSE(is_connected(m));
  CHECK_THROWS_AS(intrinsic_diameter(m), InvalidInput);
}

TEST_CASE("intrinsic diameter") {
  SUBCASE("thin strip of length 5") {
    const double d = intrinsic_diameter(grid_mesh(100, 1, 5.0, 0.01));
    CHECK(std::abs(d - 5.0) <= 0.02 * 5.0);
  }
  SUBCASE("unit tetrahedron equals the all-pairs maximum") {
    const TriMesh t = tetrahedron(1.0);
    CHECK(intrinsic_diameter(t) == doctest::Approx(oracle::floyd_warshall(t).maxCoeff()).epsilon(1e-14));
  }
  SUBCASE("unit triangle") {
    Eigen::MatrixX3d V(3, 3);
    V << 0, 0, 0, 1, 0, 0, 0.5, std::sqrt(3.0) / 2, 0;
    Eigen::MatrixX3i F(1, 3);
    F << 0, 1, 2;
    CHECK(intrinsic_diameter(TriMesh(V, F)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("never exceeds the exact diameter") {
    const TriMesh m = icosphere(2);
    CHECK(intrinsic_diameter(m) <= oracle::floyd_warshall(m).maxCoeff() + 1e-14);
  }
}

TEST_CASE("surface area") {
  CHECK(surface_area(load_mesh(kTriangleOff, MeshFormat::OFF)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(surface_area(tetrahedron(1.0)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  const TriMesh grid = grid_mesh(4, 4);
  Eigen::VectorXd none = Eigen::VectorXd::Zero(grid.num_vertices());
  none[0] = none[1] = 1.0;  // an edge, but no complete triangle
  CHECK(surface_area(grid, none) == 0.0);
  CHECK(surface_area(grid, Eigen::VectorXd::Ones(grid.num_vertices())) == doctest::Approx(1.0));
}

TEST_CASE("surface area is invariant under rigid motion") {
  std::mt19937_64 rng(11);
  const TriMesh m = icosphere(2, 1.7);
  const double a = surface_area(m);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Vector3d t = 10.0 * oracle::random_matrix(3, 1, rng);
    CHECK(std::abs(surface_area(rigidly_moved(m, oracle::random_rotation(rng), t)) - a) <= 1e-12 * a);
  }
}

TEST_CASE("submesh extraction keeps complete faces only") {
  const TriMesh grid = grid_mesh(4, 4);
  std::vector<bool> keep(static_cast<std::size_t>(grid.num_vertices()), false);
  for (int j = 0; j <= 2; ++j)
    for (int i = 0; i <= 2; ++i) keep[static_cast<std::size_t>(j * 5 + i)] = true;
  keep[24] = true;  // isolated vertex, no surviving face
  const Submesh sub = extract_submesh(grid, keep);
  CHECK(sub.mesh.num_vertices() == 9);
  CHECK(sub.mesh.num_faces() == 8);
  CHECK(surface_area(sub.mesh) == doctest::Approx(0.25));
  for (std::size_t i = 0; i < sub.to_parent.size(); ++i)
    CHECK(sub.mesh.vertices().row(static_cast<Eigen::Index>(i)) == grid.vertices().row(sub.to_parent[i]));
  CHECK_THROWS_AS(extract_submesh(grid, std::vector<bool>(25, false)), InvalidInput);
}
