#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "lmh/mesh.hpp"

namespace lmh {

// Regular (nx x ny)-cell grid on [0,width] x [0,height] in the z=0 plane.
// Every cell is split along its (i,j)-(i+1,j+1) diagonal.
TriMesh grid_mesh(int nx, int ny, double width = 1.0, double height = 1.0);

// Regular tetrahedron with the given edge length.
TriMesh tetrahedron(double edge = 1.0);

// Loop-style subdivided icosahedron projected to the sphere of `radius`.
TriMesh icosphere(int subdivisions, double radius = 1.0);

struct Bump {
  Eigen::Vector3d center;  // direction on the unit sphere
  double height;
  double width;  // Gaussian standard deviation, measured on the unit sphere
};

// Unit icosphere displaced radially by a sum of Gaussian bumps.
TriMesh bump_sphere(int subdivisions, std::span<const Bump> bumps);

TriMesh rigidly_moved(const TriMesh& mesh, const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);
TriMesh scaled(const TriMesh& mesh, double factor);

// Relabels vertices so that old vertex i becomes new vertex new_index[i].
TriMesh relabeled(const TriMesh& mesh, const std::vector<int>& new_index);

}  // namespace lmh
