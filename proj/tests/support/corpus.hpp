#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "lmh/mesh.hpp"
#include "lmh/region.hpp"
#include "lmh/shapes.hpp"

namespace lmh::testing {

struct NamedMesh {
  std::string name;
  TriMesh mesh;
};

// Small meshes used for oracle comparisons; all stay at or below 500 vertices.
inline std::vector<NamedMesh> small_corpus() {
  std::vector<NamedMesh> corpus;
  corpus.push_back({"grid 12x12", grid_mesh(12, 12)});
  corpus.push_back({"strip 30x4", grid_mesh(30, 4, 3.0, 0.4)});
  corpus.push_back({"icosphere 2", icosphere(2)});
  const Bump bump{Eigen::Vector3d(0.0, 0.0, 1.0), 0.3, 0.25};
  corpus.push_back({"bump sphere 2", bump_sphere(2, std::span<const Bump>(&bump, 1))});
  std::vector<int> order(static_cast<std::size_t>(grid_mesh(15, 15).num_vertices()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>((i * 37) % order.size());
  corpus.push_back({"relabeled grid 15x15", relabeled(grid_mesh(15, 15), order)});
  return corpus;
}

// Vertices within Euclidean distance `radius` of `center`.
inline Region ball_region(const TriMesh& mesh, const Eigen::Vector3d& center, double radius) {
  std::vector<bool> inside(static_cast<std::size_t>(mesh.num_vertices()));
  for (int i = 0; i < mesh.num_vertices(); ++i)
    inside[static_cast<std::size_t>(i)] = (mesh.vertices().row(i).transpose() - center).norm() <= radius;
  return Region::binary(inside);
}

// Axis-aligned box in the xy-plane.
inline Region box_region(const TriMesh& mesh, double x0, double x1, double y0, double y1) {
  std::vector<bool> inside(static_cast<std::size_t>(mesh.num_vertices()));
  constexpr double eps = 1e-9;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const auto p = mesh.vertices().row(i);
    inside[static_cast<std::size_t>(i)] = p.x() >= x0 - eps && p.x() <= x1 + eps && p.y() >= y0 - eps && p.y() <= y1 + eps;
  }
  return Region::binary(inside);
}

// Smooth random membership: a few Gaussian blobs with random centres and widths.
inline Region random_soft_region(const TriMesh& mesh, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, mesh.num_vertices() - 1);
  std::uniform_real_distribution<double> width(0.1, 0.5);
  std::uniform_int_distribution<int> blobs(1, 3);
  const Eigen::Index n = mesh.num_vertices();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  const int count = blobs(rng);
  const double scale = (mesh.vertices().colwise().maxCoeff() - mesh.vertices().colwise().minCoeff()).norm();
  for (int b = 0; b < count; ++b) {
    const Eigen::RowVector3d c = mesh.vertices().row(pick(rng));
    const double s = width(rng) * scale;
    for (Eigen::Index i = 0; i < n; ++i) u[i] += std::exp(-(mesh.vertices().row(i) - c).squaredNorm() / (2 * s * s));
  }
  return Region(u.cwiseMin(1.0));
}

}  // namespace lmh::testing
