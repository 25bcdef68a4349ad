// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#include "luther/colorimetry.hpp"

#include <cmath>

namespace luther
{

namespace
{

// CIE junction: delta = 6/29, branch switch at delta^3.
constexpr double kDelta       = 6.0 / 29.0;
constexpr double kDeltaCubed  = kDelta * kDelta * kDelta;
constexpr double kLinearSlope = 1.0 / ( 3.0 * kDelta * kDelta );
constexpr double kLinearBias  = 4.0 / 29.0;

// The linear branch continues below zero, keeping Lab finite for corrected
// camera values that overshoot the physical gamut.
double lab_transfer( double t )
{
    if ( t > kDeltaCubed )
        return std::cbrt( t );
    return kLinearSlope * t + kLinearBias;
}

} // namespace

WhitePoint::WhitePoint( double x, double y, double z )
    : xn( x ), yn( y ), zn( z )
{
    if ( !( xn > 0.0 ) || !( yn > 0.0 ) || !( zn > 0.0 ) )
        throw DataError( "white point components must be strictly positive" );
    if ( !std::isfinite( xn ) || !std::isfinite( yn ) ||
         !std::isfinite( zn ) )
        throw DataError( "white point components must be finite" );
}

Tristimulus tristimulus( const SpectralSample &signal,
                         const SensorSet &sensors )
{
    if ( signal.grid != sensors.grid )
        throw DimensionError(
            "tristimulus: signal and sensor grids differ" );
    const Eigen::RowVector3d response =
        signal.values.transpose() * sensors.matrix;
    return { response( 0 ), response( 1 ), response( 2 ) };
}

LabColor xyz_to_lab( const Tristimulus &xyz, const WhitePoint &white )
{
    const double fx = lab_transfer( xyz.x / white.xn );
    const double fy = lab_transfer( xyz.y / white.yn );
    const double fz = lab_transfer( xyz.z / white.zn );

    return { 116.0 * fy - 16.0, 500.0 * ( fx - fy ), 200.0 * ( fy - fz ) };
}

double delta_e( const LabColor &lab1, const LabColor &lab2 )
{
    const double dL = lab1.L - lab2.L;
    const double da = lab1.a - lab2.a;
    const double db = lab1.b - lab2.b;
    return std::sqrt( dL * dL + da * da + db * db );
}

} // namespace luther
