// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#pragma once

#include <filesystem>
#include <random>
#include <vector>

#include "luther/data_io.hpp"
#include "luther/spectral.hpp"

namespace testing
{

inline std::filesystem::path data_dir()
{
    return std::filesystem::path( LUTHER_DATA_DIR );
}

inline luther::SensorSet load_cmfs()
{
    return luther::load_spectral_csv( data_dir() / "cie1931_cmf_10nm.csv",
                                      luther::TableKind::cmf )
        .sensor_set();
}

inline luther::SensorSet load_ci_camera()
{
    return luther::load_spectral_csv( data_dir() / "ci_camera.csv",
                                      luther::TableKind::sensitivity )
        .sensor_set();
}

inline luther::SpectralSample load_d65()
{
    return luther::load_spectral_csv( data_dir() / "d65_10nm.csv",
                                      luther::TableKind::illuminant )
        .samples()
        .front();
}

inline std::vector<luther::SpectralSample> load_ci_lights()
{
    return luther::load_spectral_csv( data_dir() / "ci_illuminants.csv",
                                      luther::TableKind::illuminant )
        .samples();
}

inline std::vector<luther::SpectralSample> load_ci_surfaces()
{
    return luther::load_spectral_csv( data_dir() / "ci_reflectances.csv",
                                      luther::TableKind::reflectance )
        .samples();
}

/// Random plausible camera: one Gaussian lobe per channel with jittered
/// centre, width and amplitude, plus a small secondary blue leak in red.
inline luther::SensorSet random_camera( std::mt19937_64 &rng )
{
    const luther::WavelengthGrid grid = luther::WavelengthGrid::canonical();
    std::uniform_real_distribution<double> u( 0.0, 1.0 );

    const double mu_r = 590.0 + 40.0 * u( rng );
    const double mu_g = 520.0 + 40.0 * u( rng );
    const double mu_b = 440.0 + 40.0 * u( rng );
    const double sr = 25.0 + 20.0 * u( rng );
    const double sg = 30.0 + 20.0 * u( rng );
    const double sb = 22.0 + 15.0 * u( rng );
    const double leak = 0.05 + 0.1 * u( rng );

    Eigen::Matrix<double, Eigen::Dynamic, 3> m( grid.n_samples, 3 );
    for ( int i = 0; i < grid.n_samples; ++i )
    {
        const double wl = grid.wavelength( i );
        auto lobe = [wl]( double mu, double sigma ) {
            const double t = ( wl - mu ) / sigma;
            return std::exp( -t * t );
        };
        m( i, 0 ) = 0.9 * lobe( mu_r, sr ) + leak * lobe( 455.0, 26.0 );
        m( i, 1 ) = 0.95 * lobe( mu_g, sg );
        m( i, 2 ) = 0.92 * lobe( mu_b, sb );
    }
    return luther::SensorSet( grid, m * grid.step_nm );
}

} // namespace testing
