#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace cbmc {

inline constexpr int kJoints = 7;

template <typename Scalar>
using JointVector = Eigen::Matrix<Scalar, kJoints, 1>;
using JointVectord = JointVector<double>;

template <typename Scalar>
using JointMatrix = Eigen::Matrix<Scalar, kJoints, kJoints>;
using JointMatrixd = JointMatrix<double>;

/// Columns are the light and heavy motor-pattern torques at one configuration.
template <typename Scalar>
using CompensationMatrix = Eigen::Matrix<Scalar, kJoints, 2>;
using CompensationMatrixd = CompensationMatrix<double>;

/// Raised for contract violations and unrecoverable numerical failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.allFinite();
}

}  // namespace cbmc
