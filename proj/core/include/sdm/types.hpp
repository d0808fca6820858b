#pragma once

#include <Eigen/Core>

namespace sdm {

/// Largest parameter count of any supported distribution (BetaLocationScale).
inline constexpr int kMaxParams = 4;

/// Small parameter-sized vector; capacity is fixed so it never allocates.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxParams, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxParams,
                          kMaxParams>;

/// Per-period parameter traces: one row per period, one column per parameter.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace sdm
