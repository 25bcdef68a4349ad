// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#pragma once

#include <Eigen/Dense>

namespace luther
{

/// Moore-Penrose pseudo-inverse via singular value decomposition. Singular
/// values below rel_tol * sigma_max are treated as zero, so rank-deficient
/// inputs yield the minimum-norm least-squares inverse.
Eigen::MatrixXd pseudo_inverse( const Eigen::MatrixXd &a,
                                double rel_tol = 1e-12 );

} // namespace luther
