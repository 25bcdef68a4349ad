// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#pragma once

#include <Eigen/Dense>

#include "luther/spectral.hpp"

namespace luther
{

/// Coefficients of a filter in a truncated cosine basis.
using CoefficientVector = Eigen::VectorXd;

/// First m columns of the orthonormal DCT-II basis on an n-point grid.
/// Column 0 is the constant (DC) vector, so flat filters are exactly
/// representable at any truncation order.
struct BasisMatrix
{
    WavelengthGrid  grid;
    int             m;
    Eigen::MatrixXd matrix; // n x m, orthonormal columns

    int n() const { return grid.n_samples; }
};

/// Builds the first m orthonormal DCT-II basis vectors for the given grid.
BasisMatrix make_dct_basis( const WavelengthGrid &grid, int m );

/// Convenience overload: n samples on a default 10 nm grid starting at
/// 400 nm (the canonical grid when n == 31).
BasisMatrix make_dct_basis( int n, int m );

/// Synthesizes the filter spectrum f = Bc.
SpectralSample synthesize( const BasisMatrix &basis,
                           const CoefficientVector &coeffs );

} // namespace luther
