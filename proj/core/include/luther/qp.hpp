// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "luther/errors.hpp"

namespace luther
{

enum class BoundSide
{
    lower,
    upper
};

/// One active inequality: constraint row index plus the side that binds.
struct ActiveConstraint
{
    int       index;
    BoundSide side;

    friend auto operator<=>( const ActiveConstraint &,
                             const ActiveConstraint & ) = default;
};

/// Dense convex quadratic program
///
///     minimize    c' H c + g' c
///     subject to  lower_i <= a_i' c <= upper_i        (rows of A)
///
/// H must be symmetric positive semidefinite. Bounds may be infinite on
/// either side; rows with lower == upper are treated as equalities.
struct QpProblem
{
    Eigen::MatrixXd hessian;           // H, m x m
    Eigen::VectorXd linear;            // g, m
    Eigen::MatrixXd constraint_matrix; // A, p x m
    Eigen::VectorXd lower;             // p
    Eigen::VectorXd upper;             // p

    /// Throws DimensionError / DataError / InfeasibleError when the basic
    /// invariants (shapes, symmetry, PSD, bound ordering) are violated.
    void validate() const;
};

/// Primal solution with its optimality certificate.
struct QpSolution
{
    Eigen::VectorXd               c;
    double                        objective;
    std::vector<ActiveConstraint> active_set; // sorted by (index, side)
    int                           iterations;
    double                        kkt_residual;
};

/// Raised when the active-set iteration cap runs out; carries the best
/// iterate reached so far.
class QpIterationError : public ConvergenceError
{
public:
    QpIterationError( const std::string &msg, QpSolution best )
        : ConvergenceError( msg ), best_iterate( std::move( best ) )
    {
    }

    QpSolution best_iterate;
};

/// Solves the QP with a primal active-set method (null-space form, dense
/// factorizations). Returns a KKT point; for strictly convex H this is the
/// global minimizer. `start` must be feasible when provided; otherwise a
/// feasible point is constructed internally.
///
/// Throws InfeasibleError when no feasible point exists and
/// QpIterationError when the iteration cap of 10*(m+p) is exhausted.
QpSolution solve_qp( const QpProblem &problem,
                     std::optional<Eigen::VectorXd> start = std::nullopt );

} // namespace luther
