// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#include "luther/spectral.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace luther
{

WavelengthGrid::WavelengthGrid( double start, double end, double step )
    : start_nm( start ), end_nm( end ), step_nm( step )
{
    if ( !std::isfinite( start ) || !std::isfinite( end ) ||
         !std::isfinite( step ) )
        throw DataError( "wavelength grid endpoints must be finite" );
    if ( step <= 0.0 )
        throw DataError( "wavelength grid step must be positive" );
    if ( start >= end )
        throw DataError( "wavelength grid start must precede end" );

    const double count = ( end - start ) / step;
    const double rounded = std::round( count );
    if ( std::abs( count - rounded ) > 1e-9 * std::max( 1.0, count ) )
    {
        std::ostringstream msg;
        msg << "wavelength range " << start << "-" << end
            << " nm does not divide evenly by step " << step << " nm";
        throw DataError( msg.str() );
    }
    n_samples = static_cast<int>( rounded ) + 1;
}

WavelengthGrid WavelengthGrid::canonical()
{
    return WavelengthGrid( 400.0, 700.0, 10.0 );
}

bool WavelengthGrid::operator==( const WavelengthGrid &other ) const
{
    return start_nm == other.start_nm && end_nm == other.end_nm &&
           step_nm == other.step_nm && n_samples == other.n_samples;
}

SpectralSample::SpectralSample( WavelengthGrid g, Eigen::VectorXd v )
    : grid( g ), values( std::move( v ) )
{
    if ( values.size() != grid.n_samples )
    {
        std::ostringstream msg;
        msg << "spectrum has " << values.size() << " values but the grid has "
            << grid.n_samples << " samples";
        throw DimensionError( msg.str() );
    }
    if ( !values.allFinite() )
        throw DataError( "spectrum contains NaN or infinite values" );
}

SpectralSample SpectralSample::constant( const WavelengthGrid &g,
                                         double value )
{
    return SpectralSample( g,
                           Eigen::VectorXd::Constant( g.n_samples, value ) );
}

SensorSet::SensorSet( WavelengthGrid g,
                      Eigen::Matrix<double, Eigen::Dynamic, 3> m )
    : grid( g ), matrix( std::move( m ) )
{
    if ( matrix.rows() != grid.n_samples )
    {
        std::ostringstream msg;
        msg << "sensor matrix has " << matrix.rows()
            << " rows but the grid has " << grid.n_samples << " samples";
        throw DimensionError( msg.str() );
    }
    if ( !matrix.allFinite() )
        throw DataError( "sensor matrix contains NaN or infinite values" );
    for ( int c = 0; c < 3; ++c )
        if ( matrix.col( c ).norm() <= 0.0 )
            throw DataError( "sensor channel " + std::to_string( c ) +
                             " is identically zero" );
}

SpectralSample colour_signal( const SpectralSample &illuminant,
                              const SpectralSample &reflectance )
{
    if ( illuminant.grid != reflectance.grid )
        throw DimensionError(
            "colour_signal: illuminant and reflectance grids differ" );
    return SpectralSample(
        illuminant.grid,
        illuminant.values.cwiseProduct( reflectance.values ) );
}

SpectralSample resample( const SpectralSample &sample,
                         const WavelengthGrid &target )
{
    const WavelengthGrid &src = sample.grid;
    if ( src == target )
        return sample;

    // Coverage check; interpolation only, never extrapolation.
    const double tol = 1e-9 * src.step_nm;
    if ( target.start_nm < src.start_nm - tol ||
         target.end_nm > src.end_nm + tol )
    {
        std::ostringstream msg;
        msg << "resample: target range " << target.start_nm << "-"
            << target.end_nm << " nm exceeds source range " << src.start_nm
            << "-" << src.end_nm << " nm";
        throw DataError( msg.str() );
    }

    Eigen::VectorXd out( target.n_samples );
    const double snap = 1e-9;
    for ( int j = 0; j < target.n_samples; ++j )
    {
        const double pos =
            ( target.wavelength( j ) - src.start_nm ) / src.step_nm;
        int i0 = static_cast<int>( std::floor( pos ) );
        double frac = pos - i0;
        if ( frac > 1.0 - snap )
        {
            ++i0;
            frac = 0.0;
        }
        i0 = std::clamp( i0, 0, src.n_samples - 1 );
        if ( frac < snap || i0 == src.n_samples - 1 )
        {
            out( j ) = sample.values( i0 );
        }
        else
        {
            out( j ) = ( 1.0 - frac ) * sample.values( i0 ) +
                       frac * sample.values( i0 + 1 );
        }
    }
    return SpectralSample( target, std::move( out ) );
}

} // namespace luther
