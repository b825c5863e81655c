#pragma once

#include <Eigen/Dense>

namespace supmin {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Row-major so that a row (one node, N components) is contiguous.
using NodeMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Execution policy for the element-wise kernels. Both policies produce
// bit-identical results; the serial path is the reference.
enum class Exec { kSerial, kParallel };

}  // namespace supmin
