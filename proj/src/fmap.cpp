#include "lmh/fmap.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "lmh/errors.hpp"

namespace lmh {

FunctionalMap build_fmap(const Eigen::MatrixXd& basis_x, const Eigen::MatrixXd& basis_y, const PointMap& p2p,
                         const Eigen::VectorXd& mass_y) {
  const Eigen::Index ny = basis_y.rows();
  if (static_cast<Eigen::Index>(p2p.size()) != ny || mass_y.size() != ny)
    throw InvalidInput("build_fmap: map and mass must cover every Y-vertex");
  Eigen::MatrixXd pulled(ny, basis_x.cols());
  for (Eigen::Index y = 0; y < ny; ++y) {
    const int x = p2p[y];
    if (x < 0 || x >= basis_x.rows())
      throw InvalidInput("build_fmap: map entry " + std::to_string(x) + " at Y-vertex " + std::to_string(y) +
                         " out of range");
    pulled.row(y) = basis_x.row(x);
  }
  return FunctionalMap{basis_y.transpose() * (mass_y.asDiagonal() * pulled)};
}

PointMap recover_p2p(const FunctionalMap& map, const Eigen::MatrixXd& basis_x, const Eigen::MatrixXd& basis_y) {
  if (basis_x.cols() == 0 || basis_y.cols() == 0) throw InvalidInput("recover_p2p: empty basis");
  if (map.c.rows() != basis_y.cols() || map.c.cols() != basis_x.cols())
    throw InvalidInput("recover_p2p: C dimensions do not match the bases");
  const Eigen::MatrixXd queries = basis_y * map.c;
  PointMap p2p(basis_y.rows());
  for (Eigen::Index y = 0; y < queries.rows(); ++y) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index x = 0; x < basis_x.rows(); ++x) {
      const double d = (basis_x.row(x) - queries.row(y)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(x);
      }
    }
    p2p[y] = arg;
  }
  return p2p;
}

GeodesicErrors geodesic_error_stats(const PointMap& recovered, const PointMap& truth, const TriMesh& target) {
  if (recovered.size() != truth.size()) throw InvalidInput("geodesic_error_stats: maps differ in length");
  const int n = target.num_vertices();
  const double norm = std::sqrt(surface_area(target));
  GeodesicErrors out;
  out.per_vertex = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(truth.size()));
  std::map<int, Eigen::VectorXd> fields;  // geodesics from each distinct true match
  for (std::size_t y = 0; y < truth.size(); ++y) {
    if (truth[y] < 0 || truth[y] >= n || recovered[y] < 0 || recovered[y] >= n)
      throw InvalidInput("geodesic_error_stats: map entry out of range at " + std::to_string(y));
    if (recovered[y] == truth[y]) continue;
    auto it = fields.find(truth[y]);
    if (it == fields.end()) it = fields.emplace(truth[y], graph_geodesics(target, truth[y])).first;
    out.per_vertex[y] = it->second[recovered[y]] / norm;
  }
  out.mean = out.per_vertex.size() > 0 ? out.per_vertex.mean() : 0.0;
  constexpr int kSamples = 100;
  out.thresholds = Eigen::VectorXd::LinSpaced(kSamples, 0.0, 0.5);
  out.cumulative.resize(kSamples);
  for (int j = 0; j < kSamples; ++j)
    out.cumulative[j] = out.per_vertex.size() > 0
                            ? (out.per_vertex.array() <= out.thresholds[j]).cast<double>().mean()
                            : 1.0;
  return out;
}

double offblock_energy(const FunctionalMap& map, int kprime, int k) {
  if (kprime < 0 || k < 0 || kprime + k > map.c.rows() || kprime + k > map.c.cols())
    throw InvalidInput("offblock_energy: block sizes exceed C dimensions");
  const double total = map.c.squaredNorm();
  if (total == 0.0) return 0.0;
  const double diagonal =
      map.c.topLeftCorner(kprime, kprime).squaredNorm() + map.c.block(kprime, kprime, k, k).squaredNorm();
  return std::max(0.0, (total - diagonal) / total);
}

}  // namespace lmh
