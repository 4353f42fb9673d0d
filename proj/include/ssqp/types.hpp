#pragma once

#include <functional>
#include <limits>

#include <Eigen/Core>

namespace ssqp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Matrix-free symmetric operator v -> Hv. Identity when default constructed.
class SymmetricOperator {
 public:
  SymmetricOperator() = default;
  explicit SymmetricOperator(std::function<Vec(const Vec&)> apply) : apply_(std::move(apply)) {}
  /// Wraps a dense symmetric matrix (copied).
  static SymmetricOperator dense(Mat H) {
    return SymmetricOperator([H = std::move(H)](const Vec& v) -> Vec { return H * v; });
  }

  Vec operator()(const Vec& v) const { return apply_ ? apply_(v) : v; }
  bool is_identity() const { return !apply_; }

 private:
  std::function<Vec(const Vec&)> apply_;
};

}  // namespace ssqp
