// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#include "luther/pseudoinverse.hpp"

#include <Eigen/SVD>

namespace luther
{

Eigen::MatrixXd pseudo_inverse( const Eigen::MatrixXd &a, double rel_tol )
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        a, Eigen::ComputeThinU | Eigen::ComputeThinV );
    const Eigen::VectorXd &sigma = svd.singularValues();
    if ( sigma.size() == 0 )
        return Eigen::MatrixXd::Zero( a.cols(), a.rows() );

    const double cutoff = rel_tol * sigma( 0 );
    Eigen::VectorXd inv = Eigen::VectorXd::Zero( sigma.size() );
    for ( Eigen::Index i = 0; i < sigma.size(); ++i )
        if ( sigma( i ) > cutoff && sigma( i ) > 0.0 )
            inv( i ) = 1.0 / sigma( i );

    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

} // namespace luther
