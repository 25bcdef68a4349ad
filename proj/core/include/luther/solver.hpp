// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "luther/cosine_basis.hpp"
#include "luther/spectral.hpp"

namespace luther
{

enum class SolverMode
{
    constrained,       // f_min <= Bc <= f_max with a truncated basis
    luth_unconstrained // full basis, f >= small positive floor
};

/// Configuration of the alternating least-squares filter optimization.
struct SolverConfig
{
    int    basis_m = 8;
    double f_min   = 0.2;
    double f_max   = 1.0;
    /// Convergence threshold on the squared Frobenius change of the
    /// effective sensitivities between iterations. Compared against the
    /// change normalized by |X|_F^2 unless raw_epsilon is set.
    double epsilon     = 1e-8;
    bool   raw_epsilon = false;
    int    max_iters   = 500;
    SolverMode mode    = SolverMode::constrained;

    void validate( int grid_samples ) const;
};

/// Optional warm start for run_als: coefficients for the first QP and the
/// correction matrix used in the first filter step. Either part may be
/// omitted; the defaults are the mid-bounds flat filter and the unfiltered
/// least-squares fit.
struct AlsStart
{
    std::optional<CoefficientVector> coeffs;
    std::optional<Eigen::Matrix3d>   correction;
};

/// Result of the alternating optimization: the filter, its basis
/// coefficients, the 3x3 correction matrix and convergence diagnostics.
/// objective_trace holds |diag(Bc) Q M - X|_F^2 after every half-step,
/// starting with the objective at the initial point.
struct FilterSolution
{
    SpectralSample      filter;
    CoefficientVector   coeffs;
    Eigen::Matrix3d     correction;
    std::vector<double> objective_trace;
    int                 iterations;
    bool                converged;
    SolverConfig        config;
};

/// Rearranges diag(f) Q M as a linear map of f: column i of the result is
/// vec(D_i Q M) with D_i the single-entry selector at (i, i), columns
/// stacked top to bottom. For the 31-sample grid the result is 93 x 31 and
/// satisfies V f = vec(diag(f) Q M).
Eigen::MatrixXd build_v_matrix( const SensorSet &sensors,
                                const Eigen::Matrix3d &correction );

/// Least-squares correction matrix for a fixed filter:
/// argmin_M |diag(f) Q M - X|_F^2 via the Moore-Penrose pseudo-inverse.
Eigen::Matrix3d solve_m_step( const SensorSet &sensors,
                              const SpectralSample &filter,
                              const SensorSet &cmfs );

/// Constrained filter-coefficient step: assembles the quadratic form
/// H = B'V'VB, g = -2 B'V'w with w = vec(X) and minimizes subject to
/// f_min <= Bc <= f_max. Infinite bounds are allowed.
CoefficientVector solve_c_step( const SensorSet &sensors,
                                const Eigen::Matrix3d &correction,
                                const SensorSet &cmfs,
                                const BasisMatrix &basis, double f_min,
                                double f_max,
                                std::optional<CoefficientVector> start = {} );

/// Alternating least-squares loop: repeats the filter step and the
/// correction step until the effective sensitivities stop changing or the
/// iteration budget runs out (in which case the best iterate is returned
/// with converged == false).
FilterSolution run_als( const SensorSet &sensors, const SensorSet &cmfs,
                        const SolverConfig &config,
                        const std::optional<AlsStart> &warm = {} );

/// Positivity-only filter optimization: full basis, lower bound 1e-6, no
/// upper bound. The returned pair is rescaled so the filter peaks at 1,
/// with the correction matrix absorbing the inverse scale.
FilterSolution luth_unconstrained( const SensorSet &sensors,
                                   const SensorSet &cmfs );

/// As above but taking epsilon / max_iters / raw_epsilon from `base`
/// (basis order, bounds and mode are still forced to the unconstrained
/// setting).
FilterSolution luth_unconstrained( const SensorSet &sensors,
                                   const SensorSet &cmfs,
                                   const SolverConfig &base );

/// Sentinel for an unbounded f_max.
inline constexpr double kNoUpperBound =
    std::numeric_limits<double>::infinity();

} // namespace luther
