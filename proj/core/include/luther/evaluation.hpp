// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "luther/colorimetry.hpp"
#include "luther/spectral.hpp"

namespace luther
{

/// Per-illuminant colour error aggregates.
struct IlluminantStats
{
    std::string id;
    double      mean;
    double      median;
    double      p95;
    double      max;
};

/// NRMSE plus Delta E statistics of a colour measurement experiment.
/// mean / median / p95 are per-illuminant aggregates averaged over the
/// illuminant set; max is the maximum over all illuminants of the
/// per-illuminant max (the average of per-illuminant maxima is reported
/// alongside it as max_avg).
struct EvalReport
{
    double nrmse          = 0.0;
    double delta_e_mean   = 0.0;
    double delta_e_median = 0.0;
    double delta_e_p95    = 0.0;
    double delta_e_max    = 0.0;
    double delta_e_max_avg = 0.0;
    int    n_illuminants  = 0;
    int    n_reflectances = 0;
    bool   pooled_p95     = false;

    std::vector<IlluminantStats> per_illuminant;
    std::vector<std::string>     skipped_illuminants;
};

struct ExperimentOptions
{
    /// Compute the 95th percentile over the pooled Delta E values of all
    /// illuminants instead of averaging per-illuminant percentiles.
    bool pooled_p95 = false;
    /// Constrain each per-illuminant correction matrix to map the camera
    /// white exactly onto the illuminant white point.
    bool preserve_white = false;
};

/// Goodness of the best linear sensitivity fit: |Q M - X|_F / |X|_F with
/// M the Moore-Penrose least-squares solution. 0 means the sensors are an
/// exact linear transform of the matching functions.
double nrmse( const SensorSet &sensors_or_filtered, const SensorSet &cmfs );

/// Colour measurement experiment: for every illuminant, camera responses of
/// all reflectances are mapped to ground-truth XYZ by a per-illuminant
/// least-squares 3x3 matrix, both sides are converted to CIELAB under that
/// illuminant's white point, and the per-reflectance Delta E values are
/// aggregated. Illuminants with rank-deficient camera responses are skipped
/// and reported.
EvalReport colour_experiment( const SensorSet &sensors,
                              const std::optional<SpectralSample> &filter,
                              const SensorSet &cmfs,
                              const std::vector<SpectralSample> &illuminants,
                              const std::vector<SpectralSample> &reflectances,
                              const ExperimentOptions &options = {},
                              std::vector<std::string> illuminant_ids = {} );

/// Linear-interpolation percentile (inclusive endpoints) of an unsorted,
/// non-empty list. p is in [0, 100].
double percentile( std::vector<double> values, double p );

} // namespace luther
