// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#include "luther/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "luther/pseudoinverse.hpp"

namespace luther
{

namespace
{

double nrmse_matrices( const Eigen::MatrixXd &q, const Eigen::MatrixXd &x )
{
    const double x_norm = x.norm();
    if ( x_norm == 0.0 )
        return 0.0;
    const Eigen::MatrixXd m = pseudo_inverse( q ) * x;
    return ( q * m - x ).norm() / x_norm;
}

// Per-column equality-constrained least squares: the camera white maps
// exactly onto the illuminant white point.
Eigen::Matrix3d fit_preserving_white( const Eigen::MatrixXd &rgb,
                                      const Eigen::MatrixXd &xyz,
                                      const Eigen::Vector3d &white_rgb,
                                      const Eigen::Vector3d &white_xyz )
{
    const Eigen::Matrix3d gram = 2.0 * ( rgb.transpose() * rgb );
    Eigen::Matrix4d kkt = Eigen::Matrix4d::Zero();
    kkt.topLeftCorner<3, 3>() = gram;
    kkt.topRightCorner<3, 1>() = white_rgb;
    kkt.bottomLeftCorner<1, 3>() = white_rgb.transpose();

    Eigen::Matrix3d m;
    const Eigen::FullPivLU<Eigen::Matrix4d> lu( kkt );
    for ( int j = 0; j < 3; ++j )
    {
        Eigen::Vector4d rhs;
        rhs.head<3>() = 2.0 * ( rgb.transpose() * xyz.col( j ) );
        rhs( 3 ) = white_xyz( j );
        m.col( j ) = lu.solve( rhs ).head<3>();
    }
    return m;
}

} // namespace

double percentile( std::vector<double> values, double p )
{
    if ( values.empty() )
        throw DataError( "percentile of an empty list" );
    if ( !( p >= 0.0 ) || !( p <= 100.0 ) )
        throw ConfigError( "percentile p must lie in [0, 100]" );

    std::sort( values.begin(), values.end() );
    const double rank =
        ( p / 100.0 ) * static_cast<double>( values.size() - 1 );
    const auto lo = static_cast<std::size_t>( std::floor( rank ) );
    if ( lo + 1 >= values.size() )
        return values.back();
    const double frac = rank - static_cast<double>( lo );
    return ( 1.0 - frac ) * values[lo] + frac * values[lo + 1];
}

double nrmse( const SensorSet &sensors_or_filtered, const SensorSet &cmfs )
{
    if ( sensors_or_filtered.grid != cmfs.grid )
        throw DimensionError( "nrmse: grids differ" );
    return nrmse_matrices( sensors_or_filtered.matrix, cmfs.matrix );
}

EvalReport colour_experiment( const SensorSet &sensors,
                              const std::optional<SpectralSample> &filter,
                              const SensorSet &cmfs,
                              const std::vector<SpectralSample> &illuminants,
                              const std::vector<SpectralSample> &reflectances,
                              const ExperimentOptions &options,
                              std::vector<std::string> illuminant_ids )
{
    if ( sensors.grid != cmfs.grid )
        throw DimensionError( "colour_experiment: sensor grids differ" );
    if ( filter && filter->grid != sensors.grid )
        throw DimensionError( "colour_experiment: filter grid differs" );
    if ( illuminants.empty() )
        throw DataError( "colour_experiment: no illuminants" );
    if ( reflectances.size() < 4 )
        throw DataError(
            "colour_experiment: need at least 4 reflectances for the 3x3 "
            "fit" );

    const int n = sensors.grid.n_samples;
    const auto n_refl = static_cast<Eigen::Index>( reflectances.size() );

    Eigen::MatrixXd q_eff = sensors.matrix;
    if ( filter )
        q_eff = filter->values.asDiagonal() * q_eff;

    Eigen::MatrixXd refl( n, n_refl );
    for ( Eigen::Index r = 0; r < n_refl; ++r )
    {
        if ( reflectances[static_cast<std::size_t>( r )].grid !=
             sensors.grid )
            throw DimensionError(
                "colour_experiment: reflectance grid differs" );
        refl.col( r ) = reflectances[static_cast<std::size_t>( r )].values;
    }

    if ( illuminant_ids.empty() )
    {
        illuminant_ids.reserve( illuminants.size() );
        for ( std::size_t i = 0; i < illuminants.size(); ++i )
            illuminant_ids.push_back( "illuminant_" +
                                      std::to_string( i + 1 ) );
    }

    EvalReport report;
    report.pooled_p95 = options.pooled_p95;
    report.n_reflectances = static_cast<int>( n_refl );
    report.nrmse = nrmse_matrices( q_eff, cmfs.matrix );

    std::vector<double> pooled;
    double sum_mean = 0.0, sum_median = 0.0, sum_p95 = 0.0, sum_max = 0.0;
    double max_of_max = 0.0;

    for ( std::size_t li = 0; li < illuminants.size(); ++li )
    {
        const SpectralSample &light = illuminants[li];
        if ( light.grid != sensors.grid )
            throw DimensionError(
                "colour_experiment: illuminant grid differs" );

        const Eigen::MatrixXd w_cam = light.values.asDiagonal() * q_eff;
        const Eigen::MatrixXd w_xyz = light.values.asDiagonal() * cmfs.matrix;

        const Eigen::MatrixXd rgb = refl.transpose() * w_cam;      // N x 3
        const Eigen::MatrixXd xyz_true = refl.transpose() * w_xyz; // N x 3

        const Eigen::Vector3d white_xyz = w_xyz.colwise().sum();
        if ( !( white_xyz.minCoeff() > 0.0 ) )
        {
            report.skipped_illuminants.push_back( illuminant_ids[li] );
            continue;
        }

        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr( rgb );
        if ( qr.rank() < 3 )
        {
            report.skipped_illuminants.push_back( illuminant_ids[li] );
            continue;
        }

        Eigen::Matrix3d correction;
        if ( options.preserve_white )
        {
            const Eigen::Vector3d white_rgb = w_cam.colwise().sum();
            correction =
                fit_preserving_white( rgb, xyz_true, white_rgb, white_xyz );
        }
        else
        {
            correction = qr.solve( xyz_true );
        }

        const Eigen::MatrixXd xyz_est = rgb * correction;
        const WhitePoint white( white_xyz( 0 ), white_xyz( 1 ),
                                white_xyz( 2 ) );

        std::vector<double> de( static_cast<std::size_t>( n_refl ) );
        for ( Eigen::Index r = 0; r < n_refl; ++r )
        {
            const LabColor truth = xyz_to_lab(
                Tristimulus::from_vec( xyz_true.row( r ).transpose() ),
                white );
            const LabColor estimate = xyz_to_lab(
                Tristimulus::from_vec( xyz_est.row( r ).transpose() ),
                white );
            de[static_cast<std::size_t>( r )] = delta_e( truth, estimate );
        }

        IlluminantStats stats;
        stats.id = illuminant_ids[li];
        stats.mean = std::accumulate( de.begin(), de.end(), 0.0 ) /
                     static_cast<double>( de.size() );
        stats.median = percentile( de, 50.0 );
        stats.p95 = percentile( de, 95.0 );
        stats.max = *std::max_element( de.begin(), de.end() );

        sum_mean += stats.mean;
        sum_median += stats.median;
        sum_p95 += stats.p95;
        sum_max += stats.max;
        max_of_max = std::max( max_of_max, stats.max );
        if ( options.pooled_p95 )
            pooled.insert( pooled.end(), de.begin(), de.end() );

        report.per_illuminant.push_back( std::move( stats ) );
    }

    const auto n_eval = static_cast<int>( report.per_illuminant.size() );
    report.n_illuminants = n_eval;
    if ( n_eval == 0 )
        throw DataError(
            "colour_experiment: every illuminant was skipped (degenerate "
            "camera responses)" );

    report.delta_e_mean = sum_mean / n_eval;
    report.delta_e_median = sum_median / n_eval;
    report.delta_e_p95 = options.pooled_p95 ? percentile( pooled, 95.0 )
                                            : sum_p95 / n_eval;
    report.delta_e_max = max_of_max;
    report.delta_e_max_avg = sum_max / n_eval;
    return report;
}

} // namespace luther
