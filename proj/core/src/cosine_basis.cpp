// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#include "luther/cosine_basis.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace luther
{

BasisMatrix make_dct_basis( const WavelengthGrid &grid, int m )
{
    const int n = grid.n_samples;
    if ( m < 1 || m > n )
    {
        std::ostringstream msg;
        msg << "basis order m = " << m << " out of range [1, " << n << "]";
        throw ConfigError( msg.str() );
    }

    // Orthonormal DCT-II: column k holds cos(pi (2i+1) k / (2n)) scaled to
    // unit norm. Column 0 is the constant vector.
    Eigen::MatrixXd b( n, m );
    const double dc_scale = std::sqrt( 1.0 / n );
    const double ac_scale = std::sqrt( 2.0 / n );
    for ( int k = 0; k < m; ++k )
    {
        const double scale = ( k == 0 ) ? dc_scale : ac_scale;
        for ( int i = 0; i < n; ++i )
            b( i, k ) = scale * std::cos( std::numbers::pi * ( 2 * i + 1 ) *
                                          k / ( 2.0 * n ) );
    }
    return BasisMatrix{ grid, m, std::move( b ) };
}

BasisMatrix make_dct_basis( int n, int m )
{
    if ( n < 2 )
        throw ConfigError( "basis needs at least 2 grid samples" );
    return make_dct_basis(
        WavelengthGrid( 400.0, 400.0 + 10.0 * ( n - 1 ), 10.0 ), m );
}

SpectralSample synthesize( const BasisMatrix &basis,
                           const CoefficientVector &coeffs )
{
    if ( coeffs.size() != basis.m )
    {
        std::ostringstream msg;
        msg << "coefficient vector has " << coeffs.size()
            << " entries, basis expects " << basis.m;
        throw DimensionError( msg.str() );
    }
    return SpectralSample( basis.grid, basis.matrix * coeffs );
}

} // namespace luther
