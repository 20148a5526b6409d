#pragma once

#include <Eigen/Dense>

namespace epiassim {

struct GaussianBelief {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

/// One predict + update cycle of the linear Kalman filter:
///   x_p = F x,  P_p = F P F^T + C,
///   K = P_p G^T (G P_p G^T + D)^-1,  x = x_p + K (y - G x_p),  P = (I - K G) P_p.
/// Throws SingularInnovation when G P_p G^T + D cannot be factorised, DomainError
/// on non-conforming dimensions.
GaussianBelief kf_step(const GaussianBelief& belief, const Eigen::MatrixXd& f_matrix,
                       const Eigen::MatrixXd& g_matrix, const Eigen::MatrixXd& c,
                       const Eigen::MatrixXd& d, const Eigen::VectorXd& y);

/// Kalman gain P G^T (G P G^T + D)^-1 for a given predicted covariance.
Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& predicted_cov, const Eigen::MatrixXd& g_matrix,
                            const Eigen::MatrixXd& d);

}  // namespace epiassim
