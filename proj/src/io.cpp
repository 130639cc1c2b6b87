#include "lmh/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "lmh/errors.hpp"

namespace lmh::io {

namespace {

double read_real(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw InvalidInput(std::string("format violation: missing ") + what);
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput(std::string("format violation: bad ") + what + " '" + tok + "'");
  }
}

std::vector<double> read_all_reals(std::istream& in, const char* what) {
  std::vector<double> values;
  std::string tok;
  while (in >> tok) {
    std::istringstream one(tok);
    values.push_back(read_real(one, what));
  }
  return values;
}

}  // namespace

void write_region(std::ostream& out, const Region& region) { write_vector(out, region.membership()); }

Region read_region(std::istream& in, int expected_size) {
  const std::vector<double> u = read_all_reals(in, "membership value");
  if (expected_size >= 0 && static_cast<int>(u.size()) != expected_size)
    throw InvalidInput("region file has " + std::to_string(u.size()) + " values, mesh has " +
                       std::to_string(expected_size) + " vertices");
  return Region(Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size())));
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& matrix) {
  out << matrix.rows() << ' ' << matrix.cols() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) out << (j ? " " : "") << matrix(i, j);
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) throw InvalidInput("format violation: matrix header 'rows cols' missing");
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m(i, j) = read_real(in, "matrix entry");
  std::string extra;
  if (in >> extra) throw InvalidInput("format violation: trailing data after matrix");
  return m;
}

void write_vector(std::ostream& out, const Eigen::VectorXd& values) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < values.size(); ++i) out << values[i] << '\n';
}

Eigen::VectorXd read_vector(std::istream& in) {
  const std::vector<double> v = read_all_reals(in, "value");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void write_point_map(std::ostream& out, const PointMap& map) {
  for (int x : map) out << x << '\n';
}

PointMap read_point_map(std::istream& in) {
  PointMap map;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
      map.push_back(v);
    } catch (const std::exception&) {
      throw InvalidInput("format violation: bad map index '" + tok + "'");
    }
  }
  return map;
}

void write_error_curve(std::ostream& out, const Eigen::VectorXd& thresholds, const Eigen::VectorXd& fractions) {
  out << "threshold,fraction\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < thresholds.size(); ++i) out << thresholds[i] << ',' << fractions[i] << '\n';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("missing file: cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace lmh::io
