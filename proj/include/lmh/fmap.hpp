#pragma once

#include <vector>

#include <Eigen/Core>

#include "lmh/mesh.hpp"

namespace lmh {

// Point-to-point map stored as pullback: entry y is the X-vertex matched to Y-vertex y.
using PointMap = std::vector<int>;

/// C (m_Y x m_X) with c_ji = <T phi_i^X, phi_j^Y> where (T f)(y) = f(p2p[y]).
/// Bases may be mixed: pass [Phi | Psi] column-concatenated per shape.
struct FunctionalMap {
  Eigen::MatrixXd c;
};

FunctionalMap build_fmap(const Eigen::MatrixXd& basis_x, const Eigen::MatrixXd& basis_y, const PointMap& p2p,
                         const Eigen::VectorXd& mass_y);

/// Nearest neighbour in spectral embedding: each Y-vertex goes to the X-vertex
/// whose row of basis_x is closest to (row of basis_y) * C. Exact linear scan,
/// ties resolved to the lowest index.
PointMap recover_p2p(const FunctionalMap& map, const Eigen::MatrixXd& basis_x, const Eigen::MatrixXd& basis_y);

struct GeodesicErrors {
  Eigen::VectorXd per_vertex;   // d(recovered[y], truth[y]) / sqrt(area)
  double mean = 0.0;
  Eigen::VectorXd thresholds;   // 100 samples in [0, 0.5]
  Eigen::VectorXd cumulative;   // fraction of vertices with error <= threshold
};

/// Normalized geodesic error of a recovered map against ground truth.
/// Distances are graph geodesics on `target`, the mesh the map values index.
GeodesicErrors geodesic_error_stats(const PointMap& recovered, const PointMap& truth, const TriMesh& target);

/// Fraction of ||C||_F^2 outside the MH-MH and LMH-LMH diagonal blocks.
double offblock_energy(const FunctionalMap& map, int kprime, int k);

}  // namespace lmh
