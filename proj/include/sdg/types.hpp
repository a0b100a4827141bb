#pragma once

#include <Eigen/Dense>

namespace sdg {

// States live in R^m with m in [2, kMaxDim]; fixed capacity keeps the
// per-step simulation arithmetic off the heap.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

}  // namespace sdg
