#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace dcurv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = std::size_t;
using Seed = std::uint64_t;

/// Row-major storage, used where rows are handed out as contiguous spans.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace dcurv
