#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lmh {

using Edge = std::array<int, 2>;  // unordered pair stored as (min, max)

enum class MeshFormat { OFF, OBJ };

/// Validated triangle mesh with classified edges.
///
/// Construction rejects out-of-range or repeated face indices and any edge
/// shared by more than two faces. Interior edges belong to exactly two faces,
/// boundary edges to exactly one.
class TriMesh {
public:
  TriMesh(Eigen::MatrixX3d vertices, Eigen::MatrixX3i faces);

  const Eigen::MatrixX3d& vertices() const { return vertices_; }
  const Eigen::MatrixX3i& faces() const { return faces_; }
  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_faces() const { return static_cast<int>(faces_.rows()); }

  const std::vector<Edge>& interior_edges() const { return interior_; }
  const std::vector<Edge>& boundary_edges() const { return boundary_; }

  // Vertex adjacency (sorted neighbor lists), derived from the edge sets.
  const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }

private:
  Eigen::MatrixX3d vertices_;
  Eigen::MatrixX3i faces_;
  std::vector<Edge> interior_;
  std::vector<Edge> boundary_;
  std::vector<std::vector<int>> neighbors_;
};

TriMesh load_mesh(std::string_view content, MeshFormat format);
TriMesh read_mesh(const std::filesystem::path& path);

std::string to_off(const TriMesh& mesh);
std::string to_off(const TriMesh& mesh, const Eigen::MatrixX3d& positions);
void write_off(const std::filesystem::path& path, const TriMesh& mesh);

/// Shortest-path distances over the edge graph, with Euclidean edge lengths.
/// Vertices unreachable from `source` get +infinity.
Eigen::VectorXd graph_geodesics(const TriMesh& mesh, int source);

// Multi-source variant: distance to the nearest of `sources`.
Eigen::VectorXd graph_geodesics(const TriMesh& mesh, const std::vector<int>& sources);

/// Double-sweep lower bound on the graph-geodesic diameter.
double intrinsic_diameter(const TriMesh& mesh);

bool is_connected(const TriMesh& mesh);

Eigen::VectorXd face_areas(const TriMesh& mesh);
double surface_area(const TriMesh& mesh);

// Area of the triangles whose three vertices all have membership 1.
double surface_area(const TriMesh& mesh, const Eigen::VectorXd& binary_membership);

struct Submesh {
  TriMesh mesh;
  std::vector<int> to_parent;  // submesh vertex -> parent vertex
};

/// Keeps the faces whose three vertices are flagged and the vertices those
/// faces reference. Throws InvalidInput if nothing survives.
Submesh extract_submesh(const TriMesh& mesh, const std::vector<bool>& keep_vertex);

}  // namespace lmh
