// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#pragma once

#include <Eigen/Dense>

#include "luther/errors.hpp"

namespace luther
{

/// Uniform wavelength sampling grid. All spectral quantities in the library
/// live on such a grid; the canonical one is 400-700 nm at 10 nm, i.e. 31
/// samples.
struct WavelengthGrid
{
    double start_nm = 400.0;
    double end_nm   = 700.0;
    double step_nm  = 10.0;
    int    n_samples = 31;

    WavelengthGrid() = default;

    /// Builds a grid from its endpoints and pitch. The range must divide
    /// evenly by the pitch.
    WavelengthGrid( double start, double end, double step );

    /// The 400-700 nm, 10 nm grid (31 samples).
    static WavelengthGrid canonical();

    /// Wavelength of sample index i.
    double wavelength( int i ) const { return start_nm + i * step_nm; }

    bool operator==( const WavelengthGrid &other ) const;
    bool operator!=( const WavelengthGrid &other ) const
    {
        return !( *this == other );
    }
};

/// A spectrum sampled on a WavelengthGrid: an illuminant power distribution,
/// a surface reflectance, a filter transmittance, or a colour signal.
/// Immutable after construction.
struct SpectralSample
{
    WavelengthGrid  grid;
    Eigen::VectorXd values;

    SpectralSample( WavelengthGrid g, Eigen::VectorXd v );

    /// Constant spectrum of the given value.
    static SpectralSample constant( const WavelengthGrid &g, double value );
};

/// A set of three sensor sensitivity curves sampled column-wise: either a
/// camera (R, G, B) or the CIE colour matching functions. The sampling
/// distance of the grid is expected to be folded into the matrix entries by
/// the loader, so responses are plain vector-matrix products.
struct SensorSet
{
    WavelengthGrid                          grid;
    Eigen::Matrix<double, Eigen::Dynamic, 3> matrix;

    SensorSet( WavelengthGrid g, Eigen::Matrix<double, Eigen::Dynamic, 3> m );
};

/// Per-wavelength product of illuminant power and surface reflectance
/// (the colour signal).
SpectralSample colour_signal( const SpectralSample &illuminant,
                              const SpectralSample &reflectance );

/// Linear interpolation of a sampled spectrum onto another grid. The source
/// grid must cover the target range; no extrapolation is performed. Values
/// at wavelengths shared by both grids are copied exactly.
SpectralSample resample( const SpectralSample &sample,
                         const WavelengthGrid &target );

} // namespace luther
