// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "luther/evaluation.hpp"
#include "luther/solver.hpp"
#include "luther/spectral.hpp"

namespace luther
{

enum class TableKind
{
    sensitivity,
    cmf,
    illuminant,
    reflectance,
    filter
};

/// A loaded spectral dataset: one or more named value columns on the
/// canonical grid, plus the path it came from.
struct SpectralTable
{
    TableKind                kind;
    WavelengthGrid           grid;
    std::vector<std::string> names;
    std::vector<Eigen::VectorXd> columns;
    std::string              source_path;

    /// Columns as individual spectra.
    std::vector<SpectralSample> samples() const;

    /// The three columns as a SensorSet with the grid pitch folded in
    /// (sensitivity / cmf tables only).
    SensorSet sensor_set() const;
};

/// Parses a delimited spectral file. Format: UTF-8, comma separated, header
/// row `wavelength_nm,<name1>[,<name2>,...]`, one row per wavelength,
/// '#'-prefixed comment lines ignored. Wavelengths must increase strictly
/// and cover 400-700 nm; data is resampled onto the canonical grid.
/// sensitivity and cmf tables must carry exactly 3 value columns, filter
/// tables exactly 1.
SpectralTable load_spectral_csv( const std::filesystem::path &path,
                                 TableKind kind );

/// Writes a spectrum as a wavelength,value CSV that load_spectral_csv
/// reads back bit-exactly.
void save_spectral_csv( const std::filesystem::path &path,
                        const SpectralSample &sample,
                        const std::string &column_name );

/// Persists a solved filter into `dir`: the filter spectrum as filter.csv
/// and a JSON sidecar solution.json carrying the correction matrix
/// (row-major), the solver configuration, the objective trace, convergence
/// diagnostics and the evaluation statistics. `extra` is merged into the
/// sidecar verbatim (the CLI stores its resolved run configuration there).
void save_solution( const FilterSolution &solution, const EvalReport &report,
                    const std::filesystem::path &dir,
                    const std::string &extra_json = {} );

/// Reads back the correction matrix from a solution.json sidecar.
Eigen::Matrix3d load_sidecar_correction( const std::filesystem::path &path );

/// Shortest decimal representation of a double that parses back to the
/// identical value.
std::string format_double( double value );

} // namespace luther
