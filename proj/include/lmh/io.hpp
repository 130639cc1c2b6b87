#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "lmh/fmap.hpp"
#include "lmh/region.hpp"

// Plain-text formats. Reals are written with 17 significant digits so they
// round-trip exactly.
namespace lmh::io {

// One membership value per line.
void write_region(std::ostream& out, const Region& region);
Region read_region(std::istream& in, int expected_size = -1);

// "rows cols" header, then one whitespace-separated row per line.
// Used for bases and for functional map matrices.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_matrix(std::istream& in);

// One value per line (spectra, per-vertex scalar fields).
void write_vector(std::ostream& out, const Eigen::VectorXd& values);
Eigen::VectorXd read_vector(std::istream& in);

// One 0-based target index per line.
void write_point_map(std::ostream& out, const PointMap& map);
PointMap read_point_map(std::istream& in);

// CSV with header "threshold,fraction".
void write_error_curve(std::ostream& out, const Eigen::VectorXd& thresholds, const Eigen::VectorXd& fractions);

// File helpers: throw InvalidInput when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace lmh::io
