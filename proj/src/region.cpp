#include "lmh/region.hpp"

#include <string>

#include "lmh/errors.hpp"

namespace lmh {

Region::Region(Eigen::VectorXd membership) : u_(std::move(membership)) {
  for (Eigen::Index i = 0; i < u_.size(); ++i)
    if (!(u_[i] >= 0.0 && u_[i] <= 1.0))
      throw InvalidInput("membership value " + std::to_string(u_[i]) + " at vertex " + std::to_string(i) +
                         " outside [0,1]");
}

Region Region::binary(const std::vector<bool>& inside) {
  Eigen::VectorXd u(inside.size());
  for (std::size_t i = 0; i < inside.size(); ++i) u[i] = inside[i] ? 1.0 : 0.0;
  return Region(std::move(u));
}

bool Region::is_binary() const {
  return ((u_.array() == 0.0) || (u_.array() == 1.0)).all();
}

std::vector<bool> Region::inside() const {
  std::vector<bool> in(u_.size());
  for (Eigen::Index i = 0; i < u_.size(); ++i) in[i] = u_[i] == 1.0;
  return in;
}

}  // namespace lmh
