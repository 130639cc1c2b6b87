#include "lmh/shapes.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "lmh/errors.hpp"

namespace lmh {

TriMesh grid_mesh(int nx, int ny, double width, double height) {
  if (nx < 1 || ny < 1) throw InvalidInput("grid needs at least one cell per direction");
  const int cols = nx + 1;
  Eigen::MatrixX3d V((nx + 1) * (ny + 1), 3);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      V.row(j * cols + i) << width * i / nx, height * j / ny, 0.0;
  Eigen::MatrixX3i F(2 * nx * ny, 3);
  int f = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = j * cols + i, v10 = v00 + 1, v01 = v00 + cols, v11 = v01 + 1;
      F.row(f++) << v00, v10, v11;
      F.row(f++) << v00, v11, v01;
    }
  }
  return TriMesh(std::move(V), std::move(F));
}

TriMesh tetrahedron(double edge) {
  const double s = edge / (2.0 * std::sqrt(2.0));
  Eigen::MatrixX3d V(4, 3);
  V << s, s, s,
       s, -s, -s,
       -s, s, -s,
       -s, -s, s;
  Eigen::MatrixX3i F(4, 3);
  F << 0, 1, 2,
       0, 3, 1,
       0, 2, 3,
       1, 3, 2;
  return TriMesh(std::move(V), std::move(F));
}

TriMesh icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<Eigen::Vector3i> faces = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
      {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(4 * faces.size());
    for (const auto& f : faces) {
      const int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
      next.emplace_back(f[0], a, c);
      next.emplace_back(f[1], b, a);
      next.emplace_back(f[2], c, b);
      next.emplace_back(a, b, c);
    }
    faces = std::move(next);
  }

  Eigen::MatrixX3d V(verts.size(), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) V.row(i) = radius * verts[i].transpose();
  Eigen::MatrixX3i F(faces.size(), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) F.row(i) = faces[i].transpose();
  return TriMesh(std::move(V), std::move(F));
}

TriMesh bump_sphere(int subdivisions, std::span<const Bump> bumps) {
  TriMesh sphere = icosphere(subdivisions);
  Eigen::MatrixX3d V = sphere.vertices();
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    const Eigen::Vector3d p = V.row(i).transpose();
    double r = 1.0;
    for (const auto& b : bumps) {
      const double d2 = (p - b.center.normalized()).squaredNorm();
      r += b.height * std::exp(-d2 / (2.0 * b.width * b.width));
    }
    V.row(i) *= r;
  }
  return TriMesh(std::move(V), sphere.faces());
}

TriMesh rigidly_moved(const TriMesh& mesh, const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation) {
  Eigen::MatrixX3d V = (mesh.vertices() * rotation.transpose()).rowwise() + translation.transpose();
  return TriMesh(std::move(V), mesh.faces());
}

TriMesh scaled(const TriMesh& mesh, double factor) {
  return TriMesh(mesh.vertices() * factor, mesh.faces());
}

TriMesh relabeled(const TriMesh& mesh, const std::vector<int>& new_index) {
  const int n = mesh.num_vertices();
  if (new_index.size() != static_cast<std::size_t>(n)) throw InvalidInput("relabeling has wrong length");
  Eigen::MatrixX3d V(n, 3);
  for (int i = 0; i < n; ++i) V.row(new_index[i]) = mesh.vertices().row(i);
  Eigen::MatrixX3i F = mesh.faces();
  for (Eigen::Index f = 0; f < F.rows(); ++f)
    for (int c = 0; c < 3; ++c) F(f, c) = new_index[F(f, c)];
  return TriMesh(std::move(V), std::move(F));
}

}  // namespace lmh
