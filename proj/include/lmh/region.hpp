#pragma once

#include <vector>

#include <Eigen/Core>

namespace lmh {

/// Per-vertex membership u in [0,1]. The locality penalty weight
/// v = (1-u)^2 is always derived from u, never stored separately.
class Region {
public:
  explicit Region(Eigen::VectorXd membership);

  static Region binary(const std::vector<bool>& inside);
  static Region everywhere(int n) { return Region(Eigen::VectorXd::Ones(n)); }
  static Region nowhere(int n) { return Region(Eigen::VectorXd::Zero(n)); }

  int size() const { return static_cast<int>(u_.size()); }
  const Eigen::VectorXd& membership() const { return u_; }
  Eigen::VectorXd penalty() const { return (1.0 - u_.array()).square().matrix(); }

  bool is_binary() const;
  std::vector<bool> inside() const;  // u == 1
  Region complement() const { return Region((1.0 - u_.array()).matrix()); }

private:
  Eigen::VectorXd u_;
};

}  // namespace lmh
