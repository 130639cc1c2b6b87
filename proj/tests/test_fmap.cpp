#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lmh/eigensolver.hpp"
#include "lmh/fmap.hpp"
#include "lmh/lmh.hpp"
#include "lmh/shapes.hpp"
#include "support/oracles.hpp"

using namespace lmh;

namespace {

PointMap identity_map(int n) {
  PointMap m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  return m;
}

}  // namespace

TEST_CASE("identity self-map gives C = I") {
  const TriMesh mesh = grid_mesh(14, 9, 1.4, 0.9);
  const Discretization d = discretize(mesh);
  const SpectralBasis mh = compute_mh(d, 12);
  const FunctionalMap map = build_fmap(mh.functions, mh.functions, identity_map(mesh.num_vertices()), d.mass);
  CHECK((map.c - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("relabeled copy gives C = I up to signs") {
  const TriMesh x = grid_mesh(14, 9, 1.4, 0.9);
  std::vector<int> order(static_cast<std::size_t>(x.num_vertices()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>((i * 53) % order.size());
  const TriMesh y = relabeled(x, order);
  PointMap truth(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) truth[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

  const SpectralBasis bx = compute_mh(x, 8), by = compute_mh(y, 8);
  for (int i = 1; i < 8; ++i) REQUIRE(bx.spectrum[i] - bx.spectrum[i - 1] > 1e-3 * bx.spectrum[7]);
  const FunctionalMap map = build_fmap(bx.functions, by.functions, truth, discretize(y).mass);
  CHECK((map.c.cwiseAbs() - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("ground truth between two discretizations of the square is nearly orthogonal") {
  const TriMesh x = grid_mesh(30, 30), y = grid_mesh(15, 15);
  PointMap truth(static_cast<std::size_t>(y.num_vertices()));
  for (int j = 0; j <= 15; ++j)
    for (int i = 0; i <= 15; ++i) truth[static_cast<std::size_t>(j * 16 + i)] = (2 * j) * 31 + 2 * i;
  for (int v = 0; v < y.num_vertices(); ++v)
    REQUIRE((y.vertices().row(v) - x.vertices().row(truth[static_cast<std::size_t>(v)])).norm() <= 1e-12);
  const SpectralBasis bx = compute_mh(x, 10), by = compute_mh(y, 10);
  const FunctionalMap map = build_fmap(bx.functions, by.functions, truth, discretize(y).mass);
  CHECK((map.c.transpose() * map.c - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 0.1);
}

TEST_CASE("point-to-point recovery") {
  SUBCASE("complete basis recovers the identity") {
    const TriMesh mesh = grid_mesh(6, 5);
    const Discretization d = discretize(mesh);
    const EigenPairs all = dense_oracle_eig(Eigen::MatrixXd(d.stiffness), d.mass);
    const int n = mesh.num_vertices();
    const PointMap p = recover_p2p({Eigen::MatrixXd::Identity(n, n)}, all.vectors, all.vectors);
    CHECK(p == identity_map(n));
  }
  SUBCASE("20 functions on 500 vertices") {
    const TriMesh mesh = grid_mesh(24, 19, 1.2, 0.95);
    REQUIRE(mesh.num_vertices() == 500);
    const SpectralBasis mh = compute_mh(mesh, 20);
    const PointMap p = recover_p2p({Eigen::MatrixXd::Identity(20, 20)}, mh.functions, mh.functions);
    const GeodesicErrors e = geodesic_error_stats(p, identity_map(500), mesh);
    CHECK((e.per_vertex.array() == 0.0).cast<double>().mean() >= 0.95);
  }
  SUBCASE("ties go to the lowest index") {
    Eigen::MatrixXd bx(3, 1), by(1, 1);
    bx << 1.0, 0.0, 1.0;
    by << 1.0;
    CHECK(recover_p2p({Eigen::MatrixXd::Identity(1, 1)}, bx, by) == PointMap{0});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(recover_p2p({Eigen::MatrixXd(0, 0)}, Eigen::MatrixXd(4, 0), Eigen::MatrixXd(4, 0)), InvalidInput);
    CHECK_THROWS_AS(recover_p2p({Eigen::MatrixXd::Identity(2, 3)}, Eigen::MatrixXd::Ones(4, 2), Eigen::MatrixXd::Ones(4, 2)),
                    InvalidInput);
    CHECK_THROWS_AS(build_fmap(Eigen::MatrixXd::Ones(4, 2), Eigen::MatrixXd::Ones(3, 2), PointMap{0, 1, 4},
                               Eigen::VectorXd::Ones(3)),
                    InvalidInput);
  }
}

TEST_CASE("geodesic error statistics") {
  const TriMesh mesh = icosphere(2);
  REQUIRE(mesh.num_vertices() <= 200);
  const int n = mesh.num_vertices();
  const double root_area = std::sqrt(surface_area(mesh));

  SUBCASE("perfect map") {
    const GeodesicErrors e = geodesic_error_stats(identity_map(n), identity_map(n), mesh);
    CHECK(e.per_vertex.isZero());
    CHECK(e.mean == 0.0);
    REQUIRE(e.thresholds.size() == 100);
    CHECK(e.thresholds[0] == 0.0);
    CHECK(e.thresholds[99] == doctest::Approx(0.5));
    CHECK(e.cumulative[0] == 1.0);
  }
  SUBCASE("single mismatch") {
    PointMap wrong = identity_map(n);
    wrong[5] = 40;
    const GeodesicErrors e = geodesic_error_stats(wrong, identity_map(n), mesh);
    CHECK(e.per_vertex[5] == doctest::Approx(oracle::bellman_ford(mesh, 40)[5] / root_area).epsilon(1e-14));
    CHECK(e.mean == doctest::Approx(e.per_vertex[5] / n));
  }
  SUBCASE("random map against the all-pairs oracle") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> pick(0, n - 1);
    PointMap rec(static_cast<std::size_t>(n)), truth(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rec[static_cast<std::size_t>(i)] = pick(rng), truth[static_cast<std::size_t>(i)] = pick(rng);
    const GeodesicErrors e = geodesic_error_stats(rec, truth, mesh);
    const Eigen::MatrixXd all = oracle::floyd_warshall(mesh);
    for (int i = 0; i < n; ++i)
      CHECK(e.per_vertex[i] ==
            doctest::Approx(all(rec[static_cast<std::size_t>(i)], truth[static_cast<std::size_t>(i)]) / root_area)
                .epsilon(1e-14));
    for (Eigen::Index t = 1; t < e.cumulative.size(); ++t) CHECK(e.cumulative[t] >= e.cumulative[t - 1]);

    const GeodesicErrors scaled_e = geodesic_error_stats(rec, truth, scaled(mesh, 3.7));
    CHECK((scaled_e.per_vertex - e.per_vertex).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(geodesic_error_stats(identity_map(3), identity_map(4), mesh), InvalidInput);
    PointMap bad = identity_map(n);
    bad[0] = n;
    CHECK_THROWS_AS(geodesic_error_stats(bad, identity_map(n), mesh), InvalidInput);
  }
}

TEST_CASE("off-block energy") {
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(5, 5);
  block.topLeftCorner(2, 2) = Eigen::MatrixXd::Constant(2, 2, 1.0);
  block.bottomRightCorner(3, 3) = Eigen::MatrixXd::Constant(3, 3, 2.0);
  CHECK(offblock_energy({block}, 2, 3) == 0.0);
  Eigen::MatrixXd off = Eigen::MatrixXd::Zero(5, 5);
  off.topRightCorner(2, 3).setOnes();
  off.bottomLeftCorner(3, 2).setOnes();
  CHECK(offblock_energy({off}, 2, 3) == 1.0);
  CHECK(offblock_energy({block + off}, 2, 3) == doctest::Approx(12.0 / (4.0 + 36.0 + 12.0)));
  CHECK_THROWS_AS(offblock_energy({block}, 3, 3), InvalidInput);
}
