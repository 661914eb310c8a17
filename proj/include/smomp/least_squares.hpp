// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace smomp {

struct LeastSquaresResult {
    Eigen::MatrixXcd coefficients;
    std::size_t rank = 0;
    bool rank_deficient = false;
};

// Minimum-norm solution of min ||B - A X||_F via a complete orthogonal
// decomposition; pivots below `relative_cutoff` times the largest are
// treated as zero.
LeastSquaresResult solve_least_squares(const Eigen::Ref<const Eigen::MatrixXcd>& a,
                                       const Eigen::Ref<const Eigen::MatrixXcd>& b,
                                       double relative_cutoff = 1e-12);

} // namespace smomp
