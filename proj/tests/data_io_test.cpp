// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "luther/data_io.hpp"
#include "luther/solver.hpp"
#include "test_support.hpp"

using namespace luther;
namespace fs = std::filesystem;

namespace
{

fs::path temp_dir()
{
    const fs::path dir =
        fs::temp_directory_path() / "lutherfilter_data_io_test";
    fs::create_directories( dir );
    return dir;
}

void write_file( const fs::path &path, const std::string &content )
{
    std::ofstream out( path );
    out << content;
}

std::string read_file( const fs::path &path )
{
    std::ifstream in( path, std::ios::binary );
    return std::string( std::istreambuf_iterator<char>( in ), {} );
}

bool message_contains( const std::exception &e, const std::string &needle )
{
    return std::string( e.what() ).find( needle ) != std::string::npos;
}

} // namespace

TEST_CASE( "load_spectral_csv" )
{
    const fs::path dir = temp_dir();

    SUBCASE( "canonical-grid file passes through unchanged" )
    {
        const SpectralTable table = load_spectral_csv(
            testing::data_dir() / "cie1931_cmf_10nm.csv", TableKind::cmf );
        CHECK( table.grid == WavelengthGrid::canonical() );
        REQUIRE( table.names.size() == 3 );
        CHECK( table.names[0] == "xbar" );
        CHECK( table.columns[0]( 0 ) == 0.01431 );
        CHECK( table.columns[2]( 0 ) == 0.06785001 );
        CHECK( table.columns[1]( 30 ) == 0.004102 );
    }

    SUBCASE( "sensor tables fold the grid pitch into the matrix" )
    {
        const SpectralTable table = load_spectral_csv(
            testing::data_dir() / "cie1931_cmf_10nm.csv", TableKind::cmf );
        const SensorSet set = table.sensor_set();
        CHECK( set.matrix( 0, 0 ) ==
               doctest::Approx( 0.01431 * 10.0 ).epsilon( 1e-15 ) );
    }

    SUBCASE( "wrong column count for the kind" )
    {
        const fs::path p = dir / "four_cols.csv";
        write_file( p, "wavelength_nm,a,b,c,d\n400,1,1,1,1\n700,1,1,1,1\n" );
        try
        {
            load_spectral_csv( p, TableKind::sensitivity );
            FAIL( "expected DataError" );
        }
        catch ( const DataError &e )
        {
            CHECK( message_contains( e, "sensitivity" ) );
            CHECK( message_contains( e, "four_cols.csv" ) );
        }
        CHECK_THROWS_AS( load_spectral_csv( p, TableKind::filter ),
                         DataError );
        CHECK_NOTHROW( load_spectral_csv( p, TableKind::reflectance ) );
    }

    SUBCASE( "malformed rows name the row number" )
    {
        const fs::path p = dir / "malformed.csv";
        write_file( p,
                    "# comment\nwavelength_nm,v\n400,0.5\n410,oops\n"
                    "700,0.5\n" );
        try
        {
            load_spectral_csv( p, TableKind::filter );
            FAIL( "expected DataError" );
        }
        catch ( const DataError &e )
        {
            CHECK( message_contains( e, "row 4" ) );
        }

        const fs::path q = dir / "short_row.csv";
        write_file( q, "wavelength_nm,v\n400,0.5\n410\n700,0.5\n" );
        try
        {
            load_spectral_csv( q, TableKind::filter );
            FAIL( "expected DataError" );
        }
        catch ( const DataError &e )
        {
            CHECK( message_contains( e, "row 3" ) );
        }
    }

    SUBCASE( "non-monotone wavelengths are rejected" )
    {
        const fs::path p = dir / "nonmono.csv";
        write_file( p, "wavelength_nm,v\n400,1\n420,1\n410,1\n700,1\n" );
        CHECK_THROWS_AS( load_spectral_csv( p, TableKind::filter ),
                         DataError );
    }

    SUBCASE( "short coverage is rejected" )
    {
        const fs::path p = dir / "short.csv";
        write_file( p, "wavelength_nm,v\n450,1\n700,1\n" );
        try
        {
            load_spectral_csv( p, TableKind::filter );
            FAIL( "expected DataError" );
        }
        catch ( const DataError &e )
        {
            CHECK( message_contains( e, "coverage" ) );
        }
    }

    SUBCASE( "negative values are rejected for physical spectra" )
    {
        const fs::path p = dir / "negative.csv";
        write_file( p, "wavelength_nm,v\n400,0.5\n550,-0.1\n700,0.5\n" );
        CHECK_THROWS_AS( load_spectral_csv( p, TableKind::reflectance ),
                         DataError );
        // Fitted sensor curves may dip below zero.
        const fs::path q = dir / "negative3.csv";
        write_file( q,
                    "wavelength_nm,r,g,b\n400,0.5,0.1,-0.01\n"
                    "700,0.5,0.2,0.3\n" );
        CHECK_NOTHROW( load_spectral_csv( q, TableKind::sensitivity ) );
    }

    SUBCASE( "missing file" )
    {
        CHECK_THROWS_AS(
            load_spectral_csv( dir / "does_not_exist.csv",
                               TableKind::filter ),
            DataError );
    }

    SUBCASE( "1 nm file resampled onto the grid matches an oracle" )
    {
        const fs::path p = dir / "fine.csv";
        std::string content = "wavelength_nm,v\n";
        auto fn = []( double wl ) {
            return 0.2 + 0.6 * std::exp( -( wl - 540.0 ) * ( wl - 540.0 ) /
                                         ( 2.0 * 60.0 * 60.0 ) );
        };
        for ( int wl = 400; wl <= 700; ++wl )
            content += std::to_string( wl ) + "," +
                       format_double( fn( wl ) ) + "\n";
        write_file( p, content );

        const SpectralTable table =
            load_spectral_csv( p, TableKind::filter );
        for ( int j = 0; j < table.grid.n_samples; ++j )
        {
            // Grid points coincide with 1 nm knots: exact pass-through.
            CHECK( table.columns[0]( j ) ==
                   doctest::Approx( fn( table.grid.wavelength( j ) ) )
                       .epsilon( 1e-9 ) );
        }
    }
}

TEST_CASE( "save and load round trips" )
{
    const fs::path dir = temp_dir() / "roundtrip";
    fs::create_directories( dir );

    SUBCASE( "filter spectra round-trip bit exactly" )
    {
        std::mt19937_64 rng( 55 );
        std::uniform_real_distribution<double> u( 0.0, 1.0 );
        Eigen::VectorXd v( 31 );
        for ( int i = 0; i < 31; ++i )
            v( i ) = u( rng );
        const SpectralSample filter( WavelengthGrid::canonical(), v );

        save_spectral_csv( dir / "f.csv", filter, "transmittance" );
        const SpectralTable loaded =
            load_spectral_csv( dir / "f.csv", TableKind::filter );
        for ( int i = 0; i < 31; ++i )
            CHECK( loaded.columns[0]( i ) == v( i ) ); // bitwise
    }

    SUBCASE( "solution sidecar round-trips the correction matrix" )
    {
        const SensorSet cmfs = testing::load_cmfs();
        const SensorSet camera = testing::load_ci_camera();
        SolverConfig config;
        config.max_iters = 5;
        config.epsilon = 1e-300; // force converged = false
        const FilterSolution sol = run_als( camera, cmfs, config );
        CHECK_FALSE( sol.converged );

        const EvalReport report{};
        save_solution( sol, report, dir );

        const Eigen::Matrix3d loaded =
            load_sidecar_correction( dir / "solution.json" );
        CHECK( ( loaded - sol.correction ).cwiseAbs().maxCoeff() == 0.0 );

        const std::string sidecar = read_file( dir / "solution.json" );
        CHECK( sidecar.find( "\"converged\": false" ) !=
               std::string::npos );
    }

    SUBCASE( "identity correction parses back exactly" )
    {
        FilterSolution sol{
            SpectralSample::constant( WavelengthGrid::canonical(), 1.0 ),
            CoefficientVector::Zero( 1 ),
            Eigen::Matrix3d::Identity(),
            { 1.0, 0.5 },
            1,
            true,
            SolverConfig{} };
        save_solution( sol, EvalReport{}, dir );
        const Eigen::Matrix3d loaded =
            load_sidecar_correction( dir / "solution.json" );
        CHECK( loaded == Eigen::Matrix3d::Identity() );
    }

    SUBCASE( "saving twice yields identical bytes" )
    {
        const SensorSet cmfs = testing::load_cmfs();
        const SensorSet camera = testing::load_ci_camera();
        const FilterSolution sol = run_als( camera, cmfs, SolverConfig{} );

        const fs::path a = dir / "a";
        const fs::path b = dir / "b";
        save_solution( sol, EvalReport{}, a, "{\"seed\":1}" );
        save_solution( sol, EvalReport{}, b, "{\"seed\":1}" );
        CHECK( read_file( a / "filter.csv" ) ==
               read_file( b / "filter.csv" ) );
        CHECK( read_file( a / "solution.json" ) ==
               read_file( b / "solution.json" ) );
    }
}
