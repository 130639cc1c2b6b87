#include "lmh/fem.hpp"

#include <iomanip>
#include <ostream>

namespace lmh {

EnergyTerms energy_terms(const Eigen::SparseMatrix<double>& W, const Eigen::VectorXd& mass, const Region& region,
                         const Eigen::MatrixXd& phi, const Eigen::VectorXd& f) {
  const Eigen::Index n = f.size();
  if (W.rows() != n || W.cols() != n || mass.size() != n || region.size() != n || (phi.cols() > 0 && phi.rows() != n))
    throw InvalidInput("energy_terms: dimension mismatch");
  const Eigen::VectorXd af = mass.cwiseProduct(f);
  EnergyTerms terms;
  terms.smoothness = f.dot(W * f);
  terms.locality = af.dot(region.penalty().cwiseProduct(f));
  terms.orthogonality = phi.cols() > 0 ? (phi.transpose() * af).squaredNorm() : 0.0;
  return terms;
}

void write_coordinate(std::ostream& out, const Eigen::SparseMatrix<double>& matrix) {
  out << std::setprecision(17);
  for (int col = 0; col < matrix.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, col); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace lmh
