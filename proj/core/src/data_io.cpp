// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#include "luther/data_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace luther
{

namespace
{

using json = nlohmann::json;

const char *kind_name( TableKind kind )
{
    switch ( kind )
    {
        case TableKind::sensitivity: return "sensitivity";
        case TableKind::cmf: return "cmf";
        case TableKind::illuminant: return "illuminant";
        case TableKind::reflectance: return "reflectance";
        case TableKind::filter: return "filter";
    }
    return "unknown";
}

bool negative_forbidden( TableKind kind )
{
    // Physical spectra cannot go below zero; fitted sensor curves may.
    return kind == TableKind::illuminant || kind == TableKind::reflectance ||
           kind == TableKind::filter;
}

std::vector<std::string> split_fields( const std::string &line )
{
    std::vector<std::string> fields;
    std::size_t begin = 0;
    while ( true )
    {
        const std::size_t comma = line.find( ',', begin );
        std::string field = line.substr( begin, comma - begin );
        while ( !field.empty() &&
                ( field.back() == ' ' || field.back() == '\r' ||
                  field.back() == '\t' ) )
            field.pop_back();
        std::size_t lead = 0;
        while ( lead < field.size() &&
                ( field[lead] == ' ' || field[lead] == '\t' ) )
            ++lead;
        fields.push_back( field.substr( lead ) );
        if ( comma == std::string::npos )
            break;
        begin = comma + 1;
    }
    return fields;
}

double parse_number( const std::string &field, const std::string &path,
                     int line_no )
{
    double value = 0.0;
    const char *first = field.data();
    const char *last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars( first, last, value );
    if ( ec != std::errc() || ptr != last )
    {
        std::ostringstream msg;
        msg << path << ": malformed number '" << field << "' on row "
            << line_no;
        throw DataError( msg.str() );
    }
    return value;
}

// Linear interpolation from a strictly increasing wavelength list onto one
// grid point; exact copy when the wavelength coincides with a source knot.
double interp_at( const std::vector<double> &wl,
                  const std::vector<double> &vals, double w )
{
    const auto hi =
        std::lower_bound( wl.begin(), wl.end(), w - 1e-9 ) - wl.begin();
    const auto i = static_cast<std::size_t>( hi );
    if ( i < wl.size() && std::abs( wl[i] - w ) <= 1e-9 )
        return vals[i];
    const std::size_t right = i;
    const std::size_t left = right - 1;
    const double frac = ( w - wl[left] ) / ( wl[right] - wl[left] );
    return ( 1.0 - frac ) * vals[left] + frac * vals[right];
}

} // namespace

std::vector<SpectralSample> SpectralTable::samples() const
{
    std::vector<SpectralSample> out;
    out.reserve( columns.size() );
    for ( const auto &col : columns )
        out.emplace_back( grid, col );
    return out;
}

SensorSet SpectralTable::sensor_set() const
{
    if ( kind != TableKind::sensitivity && kind != TableKind::cmf )
        throw DataError( "sensor_set() requires a sensitivity or cmf table" );
    if ( columns.size() != 3 )
        throw DimensionError( "sensor table does not have 3 columns" );
    Eigen::Matrix<double, Eigen::Dynamic, 3> m( grid.n_samples, 3 );
    for ( int c = 0; c < 3; ++c )
        m.col( c ) = columns[static_cast<std::size_t>( c )];
    // Fold the sampling distance in so responses are plain products.
    m *= grid.step_nm;
    return SensorSet( grid, m );
}

SpectralTable load_spectral_csv( const std::filesystem::path &path,
                                 TableKind kind )
{
    std::ifstream in( path );
    if ( !in )
        throw DataError( "cannot open spectral file: " + path.string() );

    const std::string path_str = path.string();
    std::string line;
    int line_no = 0;

    // Header row.
    std::vector<std::string> names;
    while ( std::getline( in, line ) )
    {
        ++line_no;
        if ( line.empty() || line[0] == '#' )
            continue;
        auto fields = split_fields( line );
        if ( fields.empty() || fields[0] != "wavelength_nm" )
            throw DataError( path_str +
                             ": expected header 'wavelength_nm,<name>[,...]' "
                             "on row " +
                             std::to_string( line_no ) );
        names.assign( fields.begin() + 1, fields.end() );
        break;
    }
    if ( names.empty() )
        throw DataError( path_str + ": missing value columns in header" );

    const std::size_t n_cols = names.size();
    if ( ( kind == TableKind::sensitivity || kind == TableKind::cmf ) &&
         n_cols != 3 )
    {
        std::ostringstream msg;
        msg << path_str << ": " << kind_name( kind )
            << " table requires exactly 3 value columns, found " << n_cols;
        throw DataError( msg.str() );
    }
    if ( kind == TableKind::filter && n_cols != 1 )
    {
        std::ostringstream msg;
        msg << path_str << ": filter table requires exactly 1 value column, "
            << "found " << n_cols;
        throw DataError( msg.str() );
    }

    std::vector<double> wavelengths;
    std::vector<std::vector<double>> raw( n_cols );
    while ( std::getline( in, line ) )
    {
        ++line_no;
        if ( line.empty() || line[0] == '#' )
            continue;
        const auto fields = split_fields( line );
        if ( fields.size() != n_cols + 1 )
        {
            std::ostringstream msg;
            msg << path_str << ": row " << line_no << " has "
                << fields.size() << " fields, expected " << n_cols + 1;
            throw DataError( msg.str() );
        }
        const double w = parse_number( fields[0], path_str, line_no );
        if ( !wavelengths.empty() && w <= wavelengths.back() )
        {
            std::ostringstream msg;
            msg << path_str << ": wavelengths not strictly increasing at row "
                << line_no;
            throw DataError( msg.str() );
        }
        wavelengths.push_back( w );
        for ( std::size_t c = 0; c < n_cols; ++c )
        {
            const double v = parse_number( fields[c + 1], path_str, line_no );
            if ( !std::isfinite( v ) )
                throw DataError( path_str + ": non-finite value on row " +
                                 std::to_string( line_no ) );
            if ( v < 0.0 && negative_forbidden( kind ) )
            {
                std::ostringstream msg;
                msg << path_str << ": negative " << kind_name( kind )
                    << " value on row " << line_no;
                throw DataError( msg.str() );
            }
            raw[c].push_back( v );
        }
    }
    if ( wavelengths.size() < 2 )
        throw DataError( path_str + ": needs at least two data rows" );

    const WavelengthGrid grid = WavelengthGrid::canonical();
    if ( wavelengths.front() > grid.start_nm + 1e-9 ||
         wavelengths.back() < grid.end_nm - 1e-9 )
    {
        std::ostringstream msg;
        msg << path_str << ": wavelength coverage " << wavelengths.front()
            << "-" << wavelengths.back() << " nm falls short of "
            << grid.start_nm << "-" << grid.end_nm << " nm";
        throw DataError( msg.str() );
    }

    SpectralTable table;
    table.kind = kind;
    table.grid = grid;
    table.names = std::move( names );
    table.source_path = path_str;
    table.columns.reserve( n_cols );
    for ( std::size_t c = 0; c < n_cols; ++c )
    {
        Eigen::VectorXd col( grid.n_samples );
        for ( int j = 0; j < grid.n_samples; ++j )
            col( j ) = interp_at( wavelengths, raw[c], grid.wavelength( j ) );
        table.columns.push_back( std::move( col ) );
    }
    return table;
}

std::string format_double( double value )
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] =
        std::to_chars( buf.data(), buf.data() + buf.size(), value );
    return std::string( buf.data(), ptr );
}

void save_spectral_csv( const std::filesystem::path &path,
                        const SpectralSample &sample,
                        const std::string &column_name )
{
    std::ofstream out( path );
    if ( !out )
        throw DataError( "cannot write spectral file: " + path.string() );
    out << "wavelength_nm," << column_name << "\n";
    for ( int i = 0; i < sample.grid.n_samples; ++i )
        out << format_double( sample.grid.wavelength( i ) ) << ","
            << format_double( sample.values( i ) ) << "\n";
    if ( !out )
        throw DataError( "write failed: " + path.string() );
}

void save_solution( const FilterSolution &solution, const EvalReport &report,
                    const std::filesystem::path &dir,
                    const std::string &extra_json )
{
    std::filesystem::create_directories( dir );
    save_spectral_csv( dir / "filter.csv", solution.filter,
                       "transmittance" );

    json j;
    std::vector<double> m_row_major;
    m_row_major.reserve( 9 );
    for ( int r = 0; r < 3; ++r )
        for ( int c = 0; c < 3; ++c )
            m_row_major.push_back( solution.correction( r, c ) );
    j["correction_matrix_row_major"] = m_row_major;

    std::vector<double> coeffs( solution.coeffs.data(),
                                solution.coeffs.data() +
                                    solution.coeffs.size() );
    j["coefficients"] = coeffs;
    j["objective_trace"] = solution.objective_trace;
    j["iterations"] = solution.iterations;
    j["converged"] = solution.converged;

    const SolverConfig &cfg = solution.config;
    j["config"] = { { "basis_m", cfg.basis_m },
                    { "f_min", cfg.f_min },
                    { "f_max", std::isfinite( cfg.f_max )
                                   ? json( cfg.f_max )
                                   : json( "inf" ) },
                    { "epsilon", cfg.epsilon },
                    { "raw_epsilon", cfg.raw_epsilon },
                    { "max_iters", cfg.max_iters },
                    { "mode", cfg.mode == SolverMode::constrained
                                  ? "constrained"
                                  : "luth_unconstrained" } };

    j["evaluation"] = { { "nrmse", report.nrmse },
                        { "delta_e_mean", report.delta_e_mean },
                        { "delta_e_median", report.delta_e_median },
                        { "delta_e_p95", report.delta_e_p95 },
                        { "delta_e_max", report.delta_e_max },
                        { "delta_e_max_avg", report.delta_e_max_avg },
                        { "pooled_p95", report.pooled_p95 },
                        { "n_illuminants", report.n_illuminants },
                        { "n_reflectances", report.n_reflectances },
                        { "skipped_illuminants",
                          report.skipped_illuminants } };

    if ( !extra_json.empty() )
        j["run_config"] = json::parse( extra_json );

    std::ofstream out( dir / "solution.json" );
    if ( !out )
        throw DataError( "cannot write sidecar: " +
                         ( dir / "solution.json" ).string() );
    out << j.dump( 2 ) << "\n";
    if ( !out )
        throw DataError( "write failed: " +
                         ( dir / "solution.json" ).string() );
}

Eigen::Matrix3d load_sidecar_correction( const std::filesystem::path &path )
{
    std::ifstream in( path );
    if ( !in )
        throw DataError( "cannot open sidecar: " + path.string() );
    json j;
    try
    {
        in >> j;
    }
    catch ( const json::parse_error &e )
    {
        throw DataError( "sidecar parse error in " + path.string() + ": " +
                         e.what() );
    }
    const auto values = j.at( "correction_matrix_row_major" )
                            .get<std::vector<double>>();
    if ( values.size() != 9 )
        throw DataError( "sidecar correction matrix must have 9 entries" );
    Eigen::Matrix3d m;
    for ( int r = 0; r < 3; ++r )
        for ( int c = 0; c < 3; ++c )
            m( r, c ) = values[static_cast<std::size_t>( 3 * r + c )];
    return m;
}

} // namespace luther
