// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#include "luther/solver.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "luther/pseudoinverse.hpp"
#include "luther/qp.hpp"

namespace luther
{

namespace
{

double objective( const Eigen::VectorXd &filter,
                  const Eigen::Matrix<double, Eigen::Dynamic, 3> &q,
                  const Eigen::Matrix3d &m,
                  const Eigen::Matrix<double, Eigen::Dynamic, 3> &x )
{
    return ( filter.asDiagonal() * q * m - x ).squaredNorm();
}

// Mid-bounds flat filter, exactly representable through the DC column.
CoefficientVector dc_start( const BasisMatrix &basis, double f_min,
                            double f_max )
{
    const double lo = std::isfinite( f_min ) ? f_min : 0.0;
    const double hi = std::isfinite( f_max ) ? std::min( f_max, 1.0 ) : 1.0;
    const double level = 0.5 * ( lo + hi );
    CoefficientVector c = CoefficientVector::Zero( basis.m );
    c( 0 ) = level * std::sqrt( static_cast<double>( basis.n() ) );
    return c;
}

} // namespace

void SolverConfig::validate( int grid_samples ) const
{
    if ( basis_m < 1 || basis_m > grid_samples )
    {
        std::ostringstream msg;
        msg << "basis_m = " << basis_m << " out of range [1, " << grid_samples
            << "]";
        throw ConfigError( msg.str() );
    }
    if ( !( f_min >= 0.0 ) || f_min >= 1.0 )
        throw ConfigError( "f_min must lie in [0, 1)" );
    if ( !( f_max > 0.0 ) )
        throw ConfigError( "f_max must be positive" );
    if ( std::isfinite( f_max ) && f_max > 1.0 )
        throw ConfigError( "f_max must lie in (0, 1] or be infinite" );
    if ( f_min >= f_max )
        throw ConfigError( "f_min must be strictly below f_max" );
    if ( !( epsilon > 0.0 ) )
        throw ConfigError( "epsilon must be positive" );
    if ( max_iters < 1 )
        throw ConfigError( "max_iters must be at least 1" );
}

Eigen::MatrixXd build_v_matrix( const SensorSet &sensors,
                                const Eigen::Matrix3d &correction )
{
    const int n = sensors.grid.n_samples;
    const Eigen::Matrix<double, Eigen::Dynamic, 3> qm =
        sensors.matrix * correction;

    // Column i is vec(D_i Q M): the i-th row of QM scattered into the
    // column-stacked layout, giving V f = vec(diag(f) Q M).
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero( 3 * n, n );
    for ( int i = 0; i < n; ++i )
        for ( int j = 0; j < 3; ++j )
            v( j * n + i, i ) = qm( i, j );
    return v;
}

Eigen::Matrix3d solve_m_step( const SensorSet &sensors,
                              const SpectralSample &filter,
                              const SensorSet &cmfs )
{
    if ( sensors.grid != filter.grid || sensors.grid != cmfs.grid )
        throw DimensionError( "solve_m_step: grids differ" );
    const Eigen::MatrixXd filtered =
        filter.values.asDiagonal() * sensors.matrix;
    return pseudo_inverse( filtered ) * cmfs.matrix;
}

CoefficientVector solve_c_step( const SensorSet &sensors,
                                const Eigen::Matrix3d &correction,
                                const SensorSet &cmfs,
                                const BasisMatrix &basis, double f_min,
                                double f_max,
                                std::optional<CoefficientVector> start )
{
    if ( sensors.grid != cmfs.grid || sensors.grid != basis.grid )
        throw DimensionError( "solve_c_step: grids differ" );
    if ( f_min >= f_max )
        throw InfeasibleError( "solve_c_step: empty transmittance interval" );

    const int n = sensors.grid.n_samples;
    const Eigen::MatrixXd v = build_v_matrix( sensors, correction );
    const Eigen::Map<const Eigen::VectorXd> w( cmfs.matrix.data(), 3 * n );
    const Eigen::MatrixXd vb = v * basis.matrix;

    QpProblem qp;
    qp.hessian = vb.transpose() * vb;
    qp.linear = -2.0 * ( vb.transpose() * w );
    qp.constraint_matrix = basis.matrix;
    qp.lower = Eigen::VectorXd::Constant( n, f_min );
    qp.upper = Eigen::VectorXd::Constant( n, f_max );

    if ( !start )
        start = dc_start( basis, f_min, f_max );
    return solve_qp( qp, std::move( start ) ).c;
}

FilterSolution run_als( const SensorSet &sensors, const SensorSet &cmfs,
                        const SolverConfig &config,
                        const std::optional<AlsStart> &warm )
{
    if ( sensors.grid != cmfs.grid )
        throw DimensionError( "run_als: sensor and CMF grids differ" );
    config.validate( sensors.grid.n_samples );

    const auto &q = sensors.matrix;
    const auto &x = cmfs.matrix;
    const BasisMatrix basis =
        make_dct_basis( sensors.grid, config.basis_m );

    Eigen::Matrix3d m_cur;
    if ( warm && warm->correction )
        m_cur = *warm->correction;
    else
        m_cur = pseudo_inverse( q ) * x;

    CoefficientVector c_cur;
    std::vector<double> trace;
    Eigen::MatrixXd q_eff_prev;
    if ( warm && warm->coeffs )
    {
        if ( warm->coeffs->size() != basis.m )
            throw DimensionError( "run_als: warm-start coefficient size "
                                  "does not match basis order" );
        c_cur = *warm->coeffs;
        const Eigen::VectorXd f0 = basis.matrix * c_cur;
        trace.push_back( objective( f0, q, m_cur, x ) );
        q_eff_prev = f0.asDiagonal() * q * m_cur;
    }
    else
    {
        c_cur = dc_start( basis, config.f_min, config.f_max );
        if ( config.f_max >= 1.0 )
        {
            // Unfiltered baseline: with M0 the least-squares fit this is the
            // plain linear-correction residual.
            trace.push_back(
                objective( Eigen::VectorXd::Ones( q.rows() ), q, m_cur, x ) );
        }
        else
        {
            // A flat unit filter would be infeasible; record the objective
            // at the feasible mid-bounds start instead so the trace stays
            // monotone.
            trace.push_back(
                objective( basis.matrix * c_cur, q, m_cur, x ) );
        }
        q_eff_prev = q; // Algorithm start: effective sensitivities = camera
    }

    const double x_norm2 = x.squaredNorm();
    bool converged = false;
    int iterations = 0;
    Eigen::VectorXd f_cur = basis.matrix * c_cur;

    for ( int i = 1; i <= config.max_iters; ++i )
    {
        iterations = i;

        c_cur = solve_c_step( sensors, m_cur, cmfs, basis, config.f_min,
                              config.f_max, c_cur );
        f_cur = basis.matrix * c_cur;
        trace.push_back( objective( f_cur, q, m_cur, x ) );

        m_cur = solve_m_step(
            sensors, SpectralSample( sensors.grid, f_cur ), cmfs );
        trace.push_back( objective( f_cur, q, m_cur, x ) );

        const Eigen::MatrixXd q_eff = f_cur.asDiagonal() * q * m_cur;
        double change = ( q_eff - q_eff_prev ).squaredNorm();
        if ( !config.raw_epsilon && x_norm2 > 0.0 )
            change /= x_norm2;
        q_eff_prev = q_eff;

        if ( change < config.epsilon )
        {
            converged = true;
            break;
        }
    }

    return FilterSolution{ SpectralSample( sensors.grid, f_cur ),
                           c_cur,
                           m_cur,
                           std::move( trace ),
                           iterations,
                           converged,
                           config };
}

FilterSolution luth_unconstrained( const SensorSet &sensors,
                                   const SensorSet &cmfs,
                                   const SolverConfig &base )
{
    SolverConfig config = base;
    config.mode = SolverMode::luth_unconstrained;
    config.basis_m = sensors.grid.n_samples;
    config.f_min = 1e-6;
    config.f_max = kNoUpperBound;

    FilterSolution solution = run_als( sensors, cmfs, config );

    // Rescale so the filter peaks at 1; the correction matrix absorbs the
    // factor and the objective is unchanged.
    const double peak = solution.filter.values.maxCoeff();
    if ( peak > 0.0 )
    {
        solution.filter =
            SpectralSample( solution.filter.grid,
                            solution.filter.values / peak );
        solution.coeffs /= peak;
        solution.correction *= peak;
    }
    return solution;
}

FilterSolution luth_unconstrained( const SensorSet &sensors,
                                   const SensorSet &cmfs )
{
    return luth_unconstrained( sensors, cmfs, SolverConfig{} );
}

} // namespace luther
