// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#include "luther/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace luther
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_equality_row( const QpProblem &p, int i )
{
    return p.lower( i ) == p.upper( i );
}

double feasibility_scale( const QpProblem &p )
{
    double s = 1.0;
    for ( Eigen::Index i = 0; i < p.lower.size(); ++i )
    {
        if ( std::isfinite( p.lower( i ) ) )
            s = std::max( s, std::abs( p.lower( i ) ) );
        if ( std::isfinite( p.upper( i ) ) )
            s = std::max( s, std::abs( p.upper( i ) ) );
    }
    return s;
}

double max_violation( const QpProblem &p, const Eigen::VectorXd &c )
{
    double worst = 0.0;
    const Eigen::VectorXd ac = p.constraint_matrix * c;
    for ( Eigen::Index i = 0; i < ac.size(); ++i )
    {
        if ( std::isfinite( p.lower( i ) ) )
            worst = std::max( worst, p.lower( i ) - ac( i ) );
        if ( std::isfinite( p.upper( i ) ) )
            worst = std::max( worst, ac( i ) - p.upper( i ) );
    }
    return worst;
}

// Cyclic projection onto the half-spaces; converges to a point of the
// intersection whenever one exists.
void project_feasible( const QpProblem &p, Eigen::VectorXd &c, double tol )
{
    const int p_rows = static_cast<int>( p.constraint_matrix.rows() );
    for ( int sweep = 0; sweep < 200; ++sweep )
    {
        if ( max_violation( p, c ) <= tol )
            return;
        for ( int i = 0; i < p_rows; ++i )
        {
            const Eigen::RowVectorXd a = p.constraint_matrix.row( i );
            const double norm2 = a.squaredNorm();
            if ( norm2 == 0.0 )
                continue;
            const double v = a.dot( c );
            if ( std::isfinite( p.upper( i ) ) && v > p.upper( i ) )
                c -= a.transpose() * ( ( v - p.upper( i ) ) / norm2 );
            else if ( std::isfinite( p.lower( i ) ) && v < p.lower( i ) )
                c += a.transpose() * ( ( p.lower( i ) - v ) / norm2 );
        }
    }
}

Eigen::VectorXd find_feasible_start( const QpProblem &p, double tol )
{
    const Eigen::Index rows = p.constraint_matrix.rows();
    const Eigen::Index m = p.hessian.rows();

    // Least-squares towards per-row targets (bound midpoints where finite),
    // refined by cyclic projection.
    Eigen::VectorXd target( rows );
    for ( Eigen::Index i = 0; i < rows; ++i )
    {
        const double lo = p.lower( i );
        const double hi = p.upper( i );
        if ( std::isfinite( lo ) && std::isfinite( hi ) )
            target( i ) = 0.5 * ( lo + hi );
        else if ( std::isfinite( lo ) )
            target( i ) = lo + 1.0;
        else if ( std::isfinite( hi ) )
            target( i ) = hi - 1.0;
        else
            target( i ) = 0.0;
    }

    Eigen::VectorXd c = Eigen::VectorXd::Zero( m );
    if ( rows > 0 )
        c = p.constraint_matrix.colPivHouseholderQr().solve( target );
    project_feasible( p, c, tol );

    const double violation = max_violation( p, c );
    if ( violation > tol * 1e3 )
    {
        // Report the most violated row with its bounds.
        const Eigen::VectorXd ac = p.constraint_matrix * c;
        int worst = 0;
        double worst_v = -kInf;
        for ( Eigen::Index i = 0; i < rows; ++i )
        {
            double v = std::max(
                std::isfinite( p.lower( i ) ) ? p.lower( i ) - ac( i )
                                              : -kInf,
                std::isfinite( p.upper( i ) ) ? ac( i ) - p.upper( i )
                                              : -kInf );
            if ( v > worst_v )
            {
                worst_v = v;
                worst = static_cast<int>( i );
            }
        }
        std::ostringstream msg;
        msg << "no feasible point found; constraint " << worst
            << " with bounds [" << p.lower( worst ) << ", "
            << p.upper( worst ) << "] is violated by " << worst_v;
        throw InfeasibleError( msg.str() );
    }
    return c;
}

struct WorkingSet
{
    std::vector<ActiveConstraint> entries; // sorted by (index, side)
    std::vector<bool>             is_equality;

    bool contains( int index, BoundSide side ) const
    {
        ActiveConstraint key{ index, side };
        return std::binary_search( entries.begin(), entries.end(), key );
    }

    void add( int index, BoundSide side, bool equality )
    {
        ActiveConstraint key{ index, side };
        auto it = std::lower_bound( entries.begin(), entries.end(), key );
        const auto pos = it - entries.begin();
        entries.insert( it, key );
        is_equality.insert( is_equality.begin() + pos, equality );
    }

    void remove_at( std::size_t pos )
    {
        entries.erase( entries.begin() + pos );
        is_equality.erase( is_equality.begin() + pos );
    }

    std::size_t size() const { return entries.size(); }
};

Eigen::MatrixXd working_rows( const QpProblem &p, const WorkingSet &w )
{
    Eigen::MatrixXd aw( w.size(), p.constraint_matrix.cols() );
    for ( std::size_t j = 0; j < w.size(); ++j )
        aw.row( static_cast<Eigen::Index>( j ) ) =
            p.constraint_matrix.row( w.entries[j].index );
    return aw;
}

} // namespace

void QpProblem::validate() const
{
    const Eigen::Index m = hessian.rows();
    if ( hessian.cols() != m )
        throw DimensionError( "QP hessian is not square" );
    if ( linear.size() != m )
        throw DimensionError( "QP linear term size does not match hessian" );
    if ( constraint_matrix.size() > 0 && constraint_matrix.cols() != m )
        throw DimensionError(
            "QP constraint matrix column count does not match hessian" );
    const Eigen::Index p = constraint_matrix.rows();
    if ( lower.size() != p || upper.size() != p )
        throw DimensionError(
            "QP bound vectors do not match the constraint row count" );

    if ( !hessian.allFinite() || !linear.allFinite() ||
         ( constraint_matrix.size() > 0 && !constraint_matrix.allFinite() ) )
        throw DataError( "QP data contains NaN or infinite values" );

    const double scale = std::max( 1.0, hessian.cwiseAbs().maxCoeff() );
    if ( ( hessian - hessian.transpose() ).cwiseAbs().maxCoeff() >
         1e-10 * scale )
        throw DataError( "QP hessian is not symmetric" );

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig( hessian );
    const double floor = -1e-10 * std::max( hessian.trace(), 1.0 );
    if ( eig.eigenvalues().minCoeff() < floor )
        throw DataError( "QP hessian is not positive semidefinite" );

    for ( Eigen::Index i = 0; i < p; ++i )
    {
        if ( std::isnan( lower( i ) ) || std::isnan( upper( i ) ) )
            throw DataError( "QP bounds contain NaN" );
        if ( lower( i ) > upper( i ) )
        {
            std::ostringstream msg;
            msg << "infeasible constraint " << i << ": lower bound "
                << lower( i ) << " exceeds upper bound " << upper( i );
            throw InfeasibleError( msg.str() );
        }
    }
}

QpSolution solve_qp( const QpProblem &problem,
                     std::optional<Eigen::VectorXd> start )
{
    problem.validate();

    const int m = static_cast<int>( problem.hessian.rows() );
    const int p = static_cast<int>( problem.constraint_matrix.rows() );
    const Eigen::MatrixXd &h = problem.hessian;
    const Eigen::VectorXd &g = problem.linear;
    const Eigen::MatrixXd &a = problem.constraint_matrix;

    const double feas_tol = 1e-12 * feasibility_scale( problem );

    Eigen::VectorXd c;
    if ( start )
    {
        if ( start->size() != m )
            throw DimensionError( "QP start vector has the wrong size" );
        c = *start;
        project_feasible( problem, c, feas_tol );
        if ( max_violation( problem, c ) > 1e-7 * feasibility_scale( problem ) )
            c = find_feasible_start( problem, feas_tol );
    }
    else
    {
        c = find_feasible_start( problem, feas_tol );
    }

    WorkingSet w;
    for ( int i = 0; i < p; ++i )
        if ( is_equality_row( problem, i ) )
            w.add( i, BoundSide::lower, true );

    const int max_iters = 10 * ( m + p );
    const auto objective_of = [&]( const Eigen::VectorXd &x ) {
        return x.dot( h * x ) + g.dot( x );
    };

    // Reduced Hessian factorization with the configured Tikhonov fallback
    // for rank-deficient problems.
    const double jitter =
        1e-12 * std::max( h.trace(), 1.0 + g.cwiseAbs().maxCoeff() );

    double kkt_residual = kInf;
    int iter = 0;
    for ( ; iter < max_iters; ++iter )
    {
        const Eigen::VectorXd grad = 2.0 * ( h * c ) + g;

        // Null-space basis of the working rows.
        const int k = static_cast<int>( w.size() );
        Eigen::MatrixXd aw;
        Eigen::MatrixXd z;
        if ( k == 0 )
        {
            z = Eigen::MatrixXd::Identity( m, m );
        }
        else
        {
            aw = working_rows( problem, w );
            Eigen::HouseholderQR<Eigen::MatrixXd> qr( aw.transpose() );
            const Eigen::MatrixXd q_full =
                qr.householderQ() * Eigen::MatrixXd::Identity( m, m );
            z = q_full.rightCols( m - k );
        }

        Eigen::VectorXd d = Eigen::VectorXd::Zero( m );
        if ( z.cols() > 0 )
        {
            const Eigen::MatrixXd hr = z.transpose() * ( 2.0 * h ) * z;
            const Eigen::VectorXd rhs = -( z.transpose() * grad );
            Eigen::LLT<Eigen::MatrixXd> llt( hr );
            if ( llt.info() == Eigen::Success )
            {
                d = z * llt.solve( rhs );
            }
            else
            {
                const Eigen::MatrixXd hr_reg =
                    hr + 2.0 * jitter *
                             Eigen::MatrixXd::Identity( z.cols(), z.cols() );
                Eigen::LDLT<Eigen::MatrixXd> ldlt( hr_reg );
                d = z * ldlt.solve( rhs );
            }
        }

        const double step_tol = 1e-12 * ( 1.0 + c.cwiseAbs().maxCoeff() );
        if ( d.cwiseAbs().maxCoeff() <= step_tol )
        {
            // Stationary on the working set: check the multipliers.
            if ( k == 0 )
            {
                kkt_residual = grad.cwiseAbs().maxCoeff();
                break;
            }

            const Eigen::VectorXd nu =
                aw.transpose().colPivHouseholderQr().solve( grad );
            kkt_residual =
                ( grad - aw.transpose() * nu ).cwiseAbs().maxCoeff();

            const double mu_tol = 1e-9 * ( 1.0 + grad.cwiseAbs().maxCoeff() );
            double worst_mu = -mu_tol;
            int worst_pos = -1;
            for ( int j = 0; j < k; ++j )
            {
                if ( w.is_equality[static_cast<std::size_t>( j )] )
                    continue;
                const double mu = w.entries[static_cast<std::size_t>( j )]
                                          .side == BoundSide::lower
                                      ? nu( j )
                                      : -nu( j );
                if ( mu < worst_mu )
                {
                    worst_mu = mu;
                    worst_pos = j;
                }
            }
            if ( worst_pos < 0 )
                break; // KKT point
            w.remove_at( static_cast<std::size_t>( worst_pos ) );
            continue;
        }

        // Ratio test over the constraints outside the working set; the
        // blocking constraint with the smallest step enters, smallest index
        // first on ties.
        double alpha = 1.0;
        int block_index = -1;
        BoundSide block_side = BoundSide::lower;
        const Eigen::VectorXd ad = a * d;
        const Eigen::VectorXd ac = a * c;
        for ( int i = 0; i < p; ++i )
        {
            const double r = ad( i );
            const double r_tol = 1e-13 * ( 1.0 + std::abs( ac( i ) ) );
            auto consider = [&]( double candidate, BoundSide side ) {
                candidate = std::max( candidate, 0.0 );
                if ( candidate < alpha - 1e-12 )
                {
                    alpha = candidate;
                    block_index = i;
                    block_side = side;
                }
            };
            if ( r > r_tol && std::isfinite( problem.upper( i ) ) &&
                 !w.contains( i, BoundSide::upper ) )
                consider( ( problem.upper( i ) - ac( i ) ) / r,
                          BoundSide::upper );
            if ( r < -r_tol && std::isfinite( problem.lower( i ) ) &&
                 !w.contains( i, BoundSide::lower ) )
                consider( ( problem.lower( i ) - ac( i ) ) / r,
                          BoundSide::lower );
        }

        c += alpha * d;
        if ( block_index >= 0 )
            w.add( block_index, block_side, false );
    }

    QpSolution solution;
    solution.c = c;
    solution.objective = objective_of( c );
    solution.active_set = w.entries;
    solution.iterations = iter;
    solution.kkt_residual = kkt_residual;

    if ( iter >= max_iters )
    {
        std::ostringstream msg;
        msg << "active-set QP did not converge within " << max_iters
            << " iterations";
        throw QpIterationError( msg.str(), std::move( solution ) );
    }
    return solution;
}

} // namespace luther
