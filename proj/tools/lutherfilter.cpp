// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.
//
// Command-line front end: loads spectral datasets, runs the filter
// optimization and the colour measurement experiment, and writes
// reproducible artifacts.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "luther/data_io.hpp"
#include "luther/evaluation.hpp"
#include "luther/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace
{

// Exit codes: 0 ok, 2 config error, 3 data error, 4 non-convergence.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNoConvergence = 4;

struct RunConfig
{
    std::string camera_path;
    std::string cmf_path;
    std::string illuminants_path;
    std::string reflectances_path;
    std::string filter_path;
    std::string solution_path;
    std::string output_dir = "out";

    int    basis_m = 8;
    double f_min = 0.2;
    double f_max = 1.0;
    double epsilon = 1e-8;
    bool   raw_epsilon = false;
    int    max_iters = 500;
    int    multi_start = 1;
    unsigned long long seed = 0;
    bool   pooled_p95 = false;
    bool   preserve_white = false;
    bool   normalize = false;
    bool   with_luth = false;
};

json resolved_config_json( const std::string &subcommand,
                           const RunConfig &cfg )
{
    json j;
    j["subcommand"] = subcommand;
    j["camera"] = cfg.camera_path;
    j["cmf"] = cfg.cmf_path;
    j["illuminants"] = cfg.illuminants_path;
    j["reflectances"] = cfg.reflectances_path;
    if ( !cfg.filter_path.empty() )
        j["filter"] = cfg.filter_path;
    j["out"] = cfg.output_dir;
    j["basis_m"] = cfg.basis_m;
    j["fmin"] = cfg.f_min;
    j["fmax"] = cfg.f_max;
    j["epsilon"] = cfg.epsilon;
    j["raw_epsilon"] = cfg.raw_epsilon;
    j["max_iters"] = cfg.max_iters;
    j["multi_start"] = cfg.multi_start;
    j["seed"] = cfg.seed;
    j["pooled_p95"] = cfg.pooled_p95;
    j["preserve_white"] = cfg.preserve_white;
    j["normalize"] = cfg.normalize;
    j["with_luth"] = cfg.with_luth;
    return j;
}

luther::SensorSet load_camera( const RunConfig &cfg )
{
    auto table = luther::load_spectral_csv( cfg.camera_path,
                                            luther::TableKind::sensitivity );
    luther::SensorSet sensors = table.sensor_set();
    if ( cfg.normalize )
    {
        const double peak = sensors.matrix.maxCoeff();
        if ( peak > 0.0 )
            return luther::SensorSet( sensors.grid, sensors.matrix / peak );
    }
    return sensors;
}

struct Datasets
{
    luther::SensorSet camera;
    luther::SensorSet cmfs;
    std::vector<luther::SpectralSample> illuminants;
    std::vector<luther::SpectralSample> reflectances;
    std::vector<std::string> illuminant_ids;
};

Datasets load_datasets( const RunConfig &cfg )
{
    auto cmf_table =
        luther::load_spectral_csv( cfg.cmf_path, luther::TableKind::cmf );
    auto lights = luther::load_spectral_csv(
        cfg.illuminants_path, luther::TableKind::illuminant );
    auto surfaces = luther::load_spectral_csv(
        cfg.reflectances_path, luther::TableKind::reflectance );
    return Datasets{ load_camera( cfg ), cmf_table.sensor_set(),
                     lights.samples(), surfaces.samples(), lights.names };
}

luther::EvalReport evaluate( const Datasets &data,
                             const std::optional<luther::SpectralSample> &f,
                             const RunConfig &cfg )
{
    luther::ExperimentOptions opts;
    opts.pooled_p95 = cfg.pooled_p95;
    opts.preserve_white = cfg.preserve_white;
    return luther::colour_experiment( data.camera, f, data.cmfs,
                                      data.illuminants, data.reflectances,
                                      opts, data.illuminant_ids );
}

void write_eval_table( const fs::path &path,
                       const std::vector<std::pair<std::string,
                                                   luther::EvalReport>> &rows )
{
    std::ofstream out( path );
    if ( !out )
        throw luther::DataError( "cannot write table: " + path.string() );
    out << "label,nrmse,delta_e_mean,delta_e_median,delta_e_p95,"
           "delta_e_max\n";
    for ( const auto &[label, report] : rows )
        out << label << "," << luther::format_double( report.nrmse ) << ","
            << luther::format_double( report.delta_e_mean ) << ","
            << luther::format_double( report.delta_e_median ) << ","
            << luther::format_double( report.delta_e_p95 ) << ","
            << luther::format_double( report.delta_e_max ) << "\n";
}

json report_json( const luther::EvalReport &report )
{
    json j;
    j["nrmse"] = report.nrmse;
    j["delta_e_mean"] = report.delta_e_mean;
    j["delta_e_median"] = report.delta_e_median;
    j["delta_e_p95"] = report.delta_e_p95;
    j["delta_e_max"] = report.delta_e_max;
    j["delta_e_max_avg"] = report.delta_e_max_avg;
    j["pooled_p95"] = report.pooled_p95;
    j["n_illuminants"] = report.n_illuminants;
    j["n_reflectances"] = report.n_reflectances;
    j["skipped_illuminants"] = report.skipped_illuminants;
    json per = json::array();
    for ( const auto &s : report.per_illuminant )
        per.push_back( { { "id", s.id },
                         { "mean", s.mean },
                         { "median", s.median },
                         { "p95", s.p95 },
                         { "max", s.max } } );
    j["per_illuminant"] = per;
    return j;
}

void print_summary( const luther::EvalReport &before,
                    const luther::EvalReport &after )
{
    std::printf( "NRMSE %.3f -> %.3f | mean dE %.2f -> %.2f\n", before.nrmse,
                 after.nrmse, before.delta_e_mean, after.delta_e_mean );
}

// Multi-start scheme: attempt k seeds its generator with (seed + k);
// attempt 0 is the plain deterministic pipeline. Perturbations stay
// strictly inside the transmittance bounds.
luther::CoefficientVector perturbed_start( const luther::BasisMatrix &basis,
                                           double f_min, double f_max,
                                           unsigned long long seed,
                                           int attempt )
{
    const double lo = std::isfinite( f_min ) ? f_min : 0.0;
    const double hi = std::isfinite( f_max ) ? std::min( f_max, 1.0 ) : 1.0;
    const double level = 0.5 * ( lo + hi );
    const double half_width = 0.5 * ( hi - lo );

    luther::CoefficientVector c =
        luther::CoefficientVector::Zero( basis.m );
    c( 0 ) = level * std::sqrt( static_cast<double>( basis.n() ) );

    std::mt19937_64 rng( seed + static_cast<unsigned long long>( attempt ) );
    std::uniform_real_distribution<double> unit( -1.0, 1.0 );
    Eigen::VectorXd delta( basis.m );
    for ( int i = 0; i < basis.m; ++i )
        delta( i ) = unit( rng );
    const double reach = ( basis.matrix * delta ).cwiseAbs().maxCoeff();
    if ( reach > 0.0 )
    {
        std::uniform_real_distribution<double> mag( 0.1, 0.8 );
        c += delta * ( mag( rng ) * half_width / reach );
    }
    return c;
}

luther::FilterSolution solve_multi_start( const Datasets &data,
                                          const luther::SolverConfig &scfg,
                                          const RunConfig &cfg )
{
    std::optional<luther::FilterSolution> best;
    const luther::BasisMatrix basis =
        luther::make_dct_basis( data.camera.grid, scfg.basis_m );
    for ( int k = 0; k < cfg.multi_start; ++k )
    {
        std::optional<luther::AlsStart> warm;
        if ( k > 0 )
            warm = luther::AlsStart{ perturbed_start( basis, scfg.f_min,
                                                      scfg.f_max, cfg.seed,
                                                      k ),
                                     std::nullopt };
        luther::FilterSolution candidate =
            luther::run_als( data.camera, data.cmfs, scfg, warm );
        if ( !best || candidate.objective_trace.back() <
                          best->objective_trace.back() )
            best = std::move( candidate );
    }
    return *best;
}

int cmd_optimize( const RunConfig &cfg )
{
    luther::SolverConfig scfg;
    scfg.basis_m = cfg.basis_m;
    scfg.f_min = cfg.f_min;
    scfg.f_max = cfg.f_max;
    scfg.epsilon = cfg.epsilon;
    scfg.raw_epsilon = cfg.raw_epsilon;
    scfg.max_iters = cfg.max_iters;
    scfg.validate( luther::WavelengthGrid::canonical().n_samples );
    if ( cfg.multi_start < 1 )
        throw luther::ConfigError( "multi-start count must be at least 1" );

    const Datasets data = load_datasets( cfg );
    const luther::FilterSolution solution =
        solve_multi_start( data, scfg, cfg );

    const luther::EvalReport baseline = evaluate( data, std::nullopt, cfg );
    const luther::EvalReport with_filter =
        evaluate( data, solution.filter, cfg );

    std::vector<std::pair<std::string, luther::EvalReport>> rows;
    rows.emplace_back( "Linear", baseline );
    rows.emplace_back( "LUTH_" + std::to_string( cfg.basis_m ) + "cos",
                       with_filter );
    if ( cfg.with_luth )
    {
        const luther::FilterSolution luth =
            luther::luth_unconstrained( data.camera, data.cmfs, scfg );
        rows.emplace_back( "LUTH", evaluate( data, luth.filter, cfg ) );
    }

    const fs::path out_dir( cfg.output_dir );
    luther::save_solution( solution, with_filter, out_dir,
                           resolved_config_json( "optimize", cfg ).dump() );
    write_eval_table( out_dir / "table.csv", rows );
    print_summary( baseline, with_filter );

    return solution.converged ? kExitOk : kExitNoConvergence;
}

int cmd_luth( const RunConfig &cfg )
{
    luther::SolverConfig scfg;
    scfg.epsilon = cfg.epsilon;
    scfg.raw_epsilon = cfg.raw_epsilon;
    scfg.max_iters = cfg.max_iters;

    const Datasets data = load_datasets( cfg );
    const luther::FilterSolution solution =
        luther::luth_unconstrained( data.camera, data.cmfs, scfg );

    const luther::EvalReport baseline = evaluate( data, std::nullopt, cfg );
    const luther::EvalReport with_filter =
        evaluate( data, solution.filter, cfg );

    const fs::path out_dir( cfg.output_dir );
    luther::save_solution( solution, with_filter, out_dir,
                           resolved_config_json( "luth", cfg ).dump() );
    write_eval_table( out_dir / "table.csv",
                      { { "Linear", baseline }, { "LUTH", with_filter } } );
    print_summary( baseline, with_filter );

    return solution.converged ? kExitOk : kExitNoConvergence;
}

int cmd_evaluate( const RunConfig &cfg )
{
    const Datasets data = load_datasets( cfg );
    std::optional<luther::SpectralSample> filter;
    if ( !cfg.filter_path.empty() )
    {
        auto table = luther::load_spectral_csv( cfg.filter_path,
                                                luther::TableKind::filter );
        filter = table.samples().front();
    }

    const luther::EvalReport report = evaluate( data, filter, cfg );

    const fs::path out_dir( cfg.output_dir );
    fs::create_directories( out_dir );
    json j = report_json( report );
    j["run_config"] = resolved_config_json( "evaluate", cfg );
    std::ofstream out( out_dir / "report.json" );
    if ( !out )
        throw luther::DataError(
            "cannot write report: " + ( out_dir / "report.json" ).string() );
    out << j.dump( 2 ) << "\n";

    std::printf( "NRMSE %.3f | mean dE %.2f | median %.2f | p95 %.2f | "
                 "max %.2f\n",
                 report.nrmse, report.delta_e_mean, report.delta_e_median,
                 report.delta_e_p95, report.delta_e_max );
    return kExitOk;
}

int cmd_report( const RunConfig &cfg )
{
    fs::path path( cfg.solution_path );
    if ( fs::is_directory( path ) )
        path /= "solution.json";
    std::ifstream in( path );
    if ( !in )
        throw luther::DataError( "cannot open sidecar: " + path.string() );
    json j;
    try
    {
        in >> j;
    }
    catch ( const json::parse_error &e )
    {
        throw luther::DataError( "sidecar parse error: " +
                                 std::string( e.what() ) );
    }

    const auto &cfg_j = j.at( "config" );
    std::printf( "mode        : %s\n",
                 cfg_j.at( "mode" ).get<std::string>().c_str() );
    std::printf( "basis_m     : %d\n", cfg_j.at( "basis_m" ).get<int>() );
    std::printf( "converged   : %s (%d iterations)\n",
                 j.at( "converged" ).get<bool>() ? "yes" : "no",
                 j.at( "iterations" ).get<int>() );
    const auto &eval = j.at( "evaluation" );
    std::printf( "NRMSE       : %.4f\n", eval.at( "nrmse" ).get<double>() );
    std::printf( "dE mean     : %.3f\n",
                 eval.at( "delta_e_mean" ).get<double>() );
    std::printf( "dE median   : %.3f\n",
                 eval.at( "delta_e_median" ).get<double>() );
    std::printf( "dE p95      : %.3f\n",
                 eval.at( "delta_e_p95" ).get<double>() );
    std::printf( "dE max      : %.3f\n",
                 eval.at( "delta_e_max" ).get<double>() );
    std::printf( "correction  :" );
    const auto m = j.at( "correction_matrix_row_major" )
                       .get<std::vector<double>>();
    for ( std::size_t i = 0; i < m.size(); ++i )
        std::printf( "%s%.6g", i % 3 == 0 ? "\n  " : " ", m[i] );
    std::printf( "\n" );
    return kExitOk;
}

void add_data_options( CLI::App *cmd, RunConfig &cfg, bool need_filter )
{
    cmd->add_option( "--camera", cfg.camera_path,
                     "Camera spectral sensitivity CSV" )
        ->required();
    cmd->add_option( "--cmf", cfg.cmf_path,
                     "Colour matching function CSV" )
        ->required();
    cmd->add_option( "--illuminants", cfg.illuminants_path,
                     "Illuminant set CSV" )
        ->required();
    cmd->add_option( "--reflectances", cfg.reflectances_path,
                     "Reflectance set CSV" )
        ->required();
    if ( need_filter )
        cmd->add_option( "--filter", cfg.filter_path,
                         "Filter transmittance CSV (bare camera when "
                         "omitted)" );
    cmd->add_option( "--out", cfg.output_dir, "Output directory" );
    cmd->add_flag( "--pooled-p95", cfg.pooled_p95,
                   "Pool Delta E values across illuminants for the 95th "
                   "percentile" );
    cmd->add_flag( "--preserve-white", cfg.preserve_white,
                   "Constrain per-illuminant corrections to map white "
                   "exactly" );
    cmd->add_flag( "--normalize", cfg.normalize,
                   "Rescale camera sensitivities to unit peak after "
                   "loading" );
}

void add_solver_options( CLI::App *cmd, RunConfig &cfg, bool constrained )
{
    if ( constrained )
    {
        cmd->add_option( "--basis-m", cfg.basis_m,
                         "Number of cosine basis functions" );
        cmd->add_option( "--fmin", cfg.f_min,
                         "Minimum filter transmittance" );
        cmd->add_option( "--fmax", cfg.f_max,
                         "Maximum filter transmittance" );
        cmd->add_option( "--multi-start", cfg.multi_start,
                         "Number of perturbed starts (best result wins)" );
        cmd->add_option( "--seed", cfg.seed,
                         "Seed for the multi-start perturbations" );
    }
    cmd->add_option( "--epsilon", cfg.epsilon,
                     "Convergence threshold on the effective-sensitivity "
                     "change" );
    cmd->add_flag( "--raw-epsilon", cfg.raw_epsilon,
                   "Compare epsilon against the raw (unnormalized) change" );
    cmd->add_option( "--max-iters", cfg.max_iters,
                     "Iteration budget of the alternating solver" );
}

} // namespace

int main( int argc, char **argv )
{
    CLI::App app{ "Design and evaluate colour filters that make a camera "
                  "more colorimetric" };
    app.require_subcommand( 1 );

    RunConfig cfg;

    CLI::App *optimize = app.add_subcommand(
        "optimize", "Solve the bounded smooth-filter optimization" );
    add_data_options( optimize, cfg, false );
    add_solver_options( optimize, cfg, true );
    optimize->add_flag( "--with-luth", cfg.with_luth,
                        "Also evaluate the unconstrained reference filter" );

    CLI::App *evaluate_cmd = app.add_subcommand(
        "evaluate", "Evaluate a camera (optionally with a filter)" );
    add_data_options( evaluate_cmd, cfg, true );

    CLI::App *luth = app.add_subcommand(
        "luth", "Solve the unconstrained positivity-only reference filter" );
    add_data_options( luth, cfg, false );
    add_solver_options( luth, cfg, false );

    CLI::App *report = app.add_subcommand(
        "report", "Pretty-print a saved solution sidecar" );
    report->add_option( "--solution", cfg.solution_path,
                        "solution.json file or the directory holding it" )
        ->required();

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::CallForHelp &e )
    {
        return app.exit( e );
    }
    catch ( const CLI::CallForAllHelp &e )
    {
        return app.exit( e );
    }
    catch ( const CLI::CallForVersion &e )
    {
        return app.exit( e );
    }
    catch ( const CLI::ParseError &e )
    {
        app.exit( e );
        return kExitConfig;
    }

    try
    {
        if ( optimize->parsed() )
            return cmd_optimize( cfg );
        if ( evaluate_cmd->parsed() )
            return cmd_evaluate( cfg );
        if ( luth->parsed() )
            return cmd_luth( cfg );
        if ( report->parsed() )
            return cmd_report( cfg );
    }
    catch ( const luther::ConfigError &e )
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch ( const luther::InfeasibleError &e )
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch ( const luther::ConvergenceError &e )
    {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return kExitNoConvergence;
    }
    catch ( const luther::Error &e )
    {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    catch ( const std::exception &e )
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
