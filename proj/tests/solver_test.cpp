// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#include <doctest.h>

#include <cmath>
#include <random>

#include "luther/evaluation.hpp"
#include "luther/solver.hpp"
#include "test_support.hpp"

using namespace luther;

namespace
{

double frob_objective( const Eigen::VectorXd &f, const Eigen::MatrixXd &q,
                       const Eigen::Matrix3d &m, const Eigen::MatrixXd &x )
{
    return ( f.asDiagonal() * q * m - x ).squaredNorm();
}

void check_trace_monotone( const std::vector<double> &trace )
{
    for ( std::size_t i = 1; i < trace.size(); ++i )
        CHECK( trace[i] <= trace[i - 1] + 1e-9 );
}

} // namespace

TEST_CASE( "build_v_matrix" )
{
    SUBCASE( "selector structure for identity inputs" )
    {
        const WavelengthGrid tiny( 400, 420, 10 );
        const SensorSet sensors( tiny,
                                 Eigen::Matrix3d::Identity().eval() );
        const Eigen::MatrixXd v =
            build_v_matrix( sensors, Eigen::Matrix3d::Identity() );
        REQUIRE( v.rows() == 9 );
        REQUIRE( v.cols() == 3 );
        for ( int i = 0; i < 3; ++i )
            for ( int r = 0; r < 9; ++r )
                CHECK( v( r, i ) == ( r == 4 * i ? 1.0 : 0.0 ) );
    }

    SUBCASE( "dimensions are 93 x 31 on the canonical grid" )
    {
        const SensorSet camera = testing::load_ci_camera();
        const Eigen::MatrixXd v =
            build_v_matrix( camera, Eigen::Matrix3d::Identity() );
        CHECK( v.rows() == 93 );
        CHECK( v.cols() == 31 );
    }

    SUBCASE( "V f equals vec(diag(f) Q M) on random data" )
    {
        std::mt19937_64 rng( 42 );
        std::uniform_real_distribution<double> u( -1.0, 1.0 );
        const SensorSet camera = testing::load_ci_camera();
        const int n = camera.grid.n_samples;

        for ( int rep = 0; rep < 100; ++rep )
        {
            Eigen::Matrix3d m;
            for ( int r = 0; r < 3; ++r )
                for ( int c = 0; c < 3; ++c )
                    m( r, c ) = u( rng );
            Eigen::VectorXd f( n );
            for ( int i = 0; i < n; ++i )
                f( i ) = u( rng );

            const Eigen::MatrixXd v = build_v_matrix( camera, m );
            const Eigen::MatrixXd product =
                f.asDiagonal() * camera.matrix * m;
            const Eigen::Map<const Eigen::VectorXd> vec_product(
                product.data(), 3 * n );
            CHECK( ( v * f - vec_product ).cwiseAbs().maxCoeff() < 1e-12 );
        }
    }
}

TEST_CASE( "solve_m_step" )
{
    const SensorSet cmfs = testing::load_cmfs();
    const WavelengthGrid grid = cmfs.grid;
    const SpectralSample ones = SpectralSample::constant( grid, 1.0 );

    SUBCASE( "self fit gives the identity" )
    {
        const Eigen::Matrix3d m = solve_m_step( cmfs, ones, cmfs );
        CHECK( ( m - Eigen::Matrix3d::Identity() ).cwiseAbs().maxCoeff() <
               1e-10 );
    }

    SUBCASE( "recovers the inverse of a channel mix" )
    {
        std::mt19937_64 rng( 8 );
        std::uniform_real_distribution<double> u( -1.0, 1.0 );
        Eigen::Matrix3d a;
        do
        {
            for ( int r = 0; r < 3; ++r )
                for ( int c = 0; c < 3; ++c )
                    a( r, c ) = u( rng );
        } while ( std::abs( a.determinant() ) < 0.1 );

        const SensorSet mixed( grid, ( cmfs.matrix * a ).eval() );
        const Eigen::Matrix3d m = solve_m_step( mixed, ones, cmfs );
        CHECK( ( m - a.inverse() ).cwiseAbs().maxCoeff() < 1e-8 );
    }

    SUBCASE( "normal equations hold for random filters" )
    {
        std::mt19937_64 rng( 12 );
        std::uniform_real_distribution<double> u( 0.05, 1.0 );
        const SensorSet camera = testing::load_ci_camera();
        for ( int rep = 0; rep < 10; ++rep )
        {
            Eigen::VectorXd f( grid.n_samples );
            for ( int i = 0; i < grid.n_samples; ++i )
                f( i ) = u( rng );
            const SpectralSample filter( grid, f );
            const Eigen::Matrix3d m = solve_m_step( camera, filter, cmfs );
            const Eigen::MatrixXd filtered =
                f.asDiagonal() * camera.matrix;
            const Eigen::Matrix3d residual_proj =
                filtered.transpose() * ( filtered * m - cmfs.matrix );
            CHECK( residual_proj.cwiseAbs().maxCoeff() < 1e-8 );
        }
    }
}

TEST_CASE( "solve_c_step" )
{
    const SensorSet cmfs = testing::load_cmfs();
    const SensorSet camera = testing::load_ci_camera();
    const WavelengthGrid grid = cmfs.grid;
    const int n = grid.n_samples;
    const double inf = std::numeric_limits<double>::infinity();

    SUBCASE( "full basis, no bounds: per-wavelength closed form" )
    {
        const BasisMatrix basis = make_dct_basis( grid, n );
        const Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
        const CoefficientVector c =
            solve_c_step( camera, m, cmfs, basis, -inf, inf );
        const Eigen::VectorXd f = basis.matrix * c;

        const Eigen::MatrixXd qm = camera.matrix * m;
        for ( int i = 0; i < n; ++i )
        {
            const double expected = qm.row( i ).dot( cmfs.matrix.row( i ) ) /
                                    qm.row( i ).squaredNorm();
            CHECK( f( i ) == doctest::Approx( expected ).epsilon( 1e-8 ) );
        }
    }

    SUBCASE( "perfect camera keeps the flat filter" )
    {
        const BasisMatrix basis = make_dct_basis( grid, 8 );
        const CoefficientVector c =
            solve_c_step( cmfs, Eigen::Matrix3d::Identity(), cmfs, basis,
                          0.2, 1.0 );
        const Eigen::VectorXd f = basis.matrix * c;
        CHECK( ( f.array() - 1.0 ).abs().maxCoeff() < 1e-8 );
        CHECK( frob_objective( f, cmfs.matrix, Eigen::Matrix3d::Identity(),
                               cmfs.matrix ) < 1e-12 );
    }

    SUBCASE( "DC-only problem matches the clamped scalar optimum" )
    {
        const BasisMatrix basis = make_dct_basis( grid, 1 );
        const Eigen::Matrix3d m =
            ( camera.matrix.transpose() * camera.matrix )
                .ldlt()
                .solve( camera.matrix.transpose() * cmfs.matrix );
        const Eigen::MatrixXd qm = camera.matrix * m;

        // Analytic optimum of || (c/sqrt(n)) QM - X ||_F^2 over c.
        const double num = ( qm.array() * cmfs.matrix.array() ).sum();
        const double den = qm.squaredNorm();
        const double sqrt_n = std::sqrt( static_cast<double>( n ) );
        const double unclamped = sqrt_n * num / den;

        for ( const auto [f_min, f_max] :
              { std::pair{ 0.0, 1.0 }, std::pair{ 0.9, 1.0 },
                std::pair{ 0.0, 0.2 } } )
        {
            const CoefficientVector c = solve_c_step(
                camera, m, cmfs, basis, f_min, f_max, std::nullopt );
            const double expected = std::clamp(
                unclamped, f_min * sqrt_n, f_max * sqrt_n );
            CHECK( c( 0 ) == doctest::Approx( expected ).epsilon( 1e-8 ) );
        }
    }
}

TEST_CASE( "run_als" )
{
    const SensorSet cmfs = testing::load_cmfs();
    const SensorSet camera = testing::load_ci_camera();

    SUBCASE( "already colorimetric camera is a zero-residual fixed point" )
    {
        SolverConfig config;
        config.basis_m = 5;
        const FilterSolution sol = run_als( cmfs, cmfs, config );
        CHECK( sol.converged );
        CHECK( sol.objective_trace.back() < 1e-10 );
        CHECK( sol.filter.values.minCoeff() >= config.f_min - 1e-8 );
        CHECK( sol.filter.values.maxCoeff() <= config.f_max + 1e-8 );

        // The correction undoes the filter's flat scale.
        const double level = sol.filter.values.mean();
        CHECK( ( sol.correction * level - Eigen::Matrix3d::Identity() )
                   .cwiseAbs()
                   .maxCoeff() < 1e-6 );
    }

    SUBCASE( "objective trace is monotone and the filter stays feasible" )
    {
        SolverConfig config;
        const FilterSolution sol = run_als( camera, cmfs, config );
        CHECK( sol.converged );
        check_trace_monotone( sol.objective_trace );
        CHECK( sol.filter.values.minCoeff() >= config.f_min - 1e-8 );
        CHECK( sol.filter.values.maxCoeff() <= config.f_max + 1e-8 );
        CHECK( sol.objective_trace.front() >
               sol.objective_trace.back() ); // it actually improved
    }

    SUBCASE( "monotone on random cameras" )
    {
        std::mt19937_64 rng( 77 );
        for ( int rep = 0; rep < 3; ++rep )
        {
            const SensorSet cam = testing::random_camera( rng );
            SolverConfig config;
            config.basis_m = 6;
            const FilterSolution sol = run_als( cam, cmfs, config );
            check_trace_monotone( sol.objective_trace );
            CHECK( sol.filter.values.minCoeff() >= config.f_min - 1e-8 );
            CHECK( sol.filter.values.maxCoeff() <= config.f_max + 1e-8 );
        }
    }

    SUBCASE( "warm-start nesting never degrades the objective" )
    {
        SolverConfig c6;
        c6.basis_m = 6;
        const FilterSolution s6 = run_als( camera, cmfs, c6 );

        SolverConfig c8 = c6;
        c8.basis_m = 8;
        CoefficientVector warm8 = CoefficientVector::Zero( 8 );
        warm8.head( 6 ) = s6.coeffs;
        const FilterSolution s8 =
            run_als( camera, cmfs, c8,
                     AlsStart{ warm8, s6.correction } );

        CHECK( s8.objective_trace.front() ==
               doctest::Approx( s6.objective_trace.back() )
                   .epsilon( 1e-12 ) );
        CHECK( s8.objective_trace.back() <=
               s6.objective_trace.back() + 1e-9 );
    }

    SUBCASE( "iteration budget exhaustion is flagged, not thrown" )
    {
        SolverConfig config;
        config.max_iters = 1;
        config.epsilon = 1e-300;
        const FilterSolution sol = run_als( camera, cmfs, config );
        CHECK_FALSE( sol.converged );
        CHECK( sol.iterations == 1 );
    }

    SUBCASE( "config validation" )
    {
        SolverConfig bad;
        bad.basis_m = 32;
        CHECK_THROWS_AS( run_als( camera, cmfs, bad ), ConfigError );
        bad = SolverConfig{};
        bad.f_min = 0.9;
        bad.f_max = 0.5;
        CHECK_THROWS_AS( run_als( camera, cmfs, bad ), ConfigError );
        bad = SolverConfig{};
        bad.epsilon = 0.0;
        CHECK_THROWS_AS( run_als( camera, cmfs, bad ), ConfigError );
    }
}

TEST_CASE( "luth_unconstrained" )
{
    const SensorSet cmfs = testing::load_cmfs();
    const SensorSet camera = testing::load_ci_camera();

    SUBCASE( "perfect camera keeps a flat filter with zero residual" )
    {
        const FilterSolution sol = luth_unconstrained( cmfs, cmfs );
        CHECK( sol.converged );
        CHECK( nrmse( SensorSet( cmfs.grid,
                                 ( sol.filter.values.asDiagonal() *
                                   cmfs.matrix )
                                     .eval() ),
                      cmfs ) < 1e-10 );
        CHECK( ( sol.filter.values.array() - 1.0 ).abs().maxCoeff() <
               1e-8 );
    }

    SUBCASE( "filter peaks at one and beats the constrained solutions" )
    {
        const FilterSolution sol = luth_unconstrained( camera, cmfs );
        CHECK( sol.filter.values.maxCoeff() ==
               doctest::Approx( 1.0 ).epsilon( 1e-12 ) );
        CHECK( sol.filter.values.minCoeff() >= 1e-6 - 1e-12 );

        SolverConfig constrained;
        const FilterSolution s8 = run_als( camera, cmfs, constrained );
        CHECK( sol.objective_trace.back() <=
               s8.objective_trace.back() + 1e-9 );
    }

    SUBCASE( "objective is invariant under (f, M) -> (k f, M / k)" )
    {
        const FilterSolution sol = luth_unconstrained( camera, cmfs );
        const Eigen::VectorXd f = sol.filter.values;
        const Eigen::Matrix3d m = sol.correction;
        const double base = frob_objective( f, camera.matrix, m,
                                            cmfs.matrix );
        for ( const double k : { 0.5, 2.0 } )
        {
            const double scaled = frob_objective(
                ( k * f ).eval(), camera.matrix,
                ( m / k ).eval(), cmfs.matrix );
            CHECK( scaled == doctest::Approx( base ).epsilon( 1e-12 ) );
        }
    }
}
