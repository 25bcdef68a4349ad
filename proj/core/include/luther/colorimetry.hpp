// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#pragma once

#include <Eigen/Dense>

#include "luther/spectral.hpp"

namespace luther
{

/// Linear 3-channel response to a colour signal. Holds CIE XYZ when computed
/// against the colour matching functions, or camera values otherwise.
/// Components may be negative for linearly corrected camera estimates.
struct Tristimulus
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Eigen::Vector3d vec() const { return { x, y, z }; }
    static Tristimulus from_vec( const Eigen::Vector3d &v )
    {
        return { v( 0 ), v( 1 ), v( 2 ) };
    }
};

/// CIELAB coordinates.
struct LabColor
{
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// Reference white for the CIELAB transform; all components strictly
/// positive.
struct WhitePoint
{
    double xn;
    double yn;
    double zn;

    WhitePoint( double x, double y, double z );

    static WhitePoint from_tristimulus( const Tristimulus &t )
    {
        return WhitePoint( t.x, t.y, t.z );
    }
};

/// Response of a sensor set to a colour signal spectrum (the vector-matrix
/// form of the sampled integral).
Tristimulus tristimulus( const SpectralSample &signal,
                         const SensorSet &sensors );

/// Standard CIELAB transform. The transfer function uses the cube-root
/// branch above the CIE junction ratio (6/29)^3 and the linear branch below
/// it; the linear branch also extends below zero so that overshooting
/// corrected camera values still map to finite Lab coordinates.
LabColor xyz_to_lab( const Tristimulus &xyz, const WhitePoint &white );

/// CIE 1976 colour difference: Euclidean distance in Lab space.
double delta_e( const LabColor &lab1, const LabColor &lab2 );

} // namespace luther
