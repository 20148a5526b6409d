#include "epiassim/kalman.hpp"

#include "epiassim/errors.hpp"

namespace epiassim {

Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& predicted_cov, const Eigen::MatrixXd& g_matrix,
                            const Eigen::MatrixXd& d)
{
    const Eigen::MatrixXd innovation_cov = g_matrix * predicted_cov * g_matrix.transpose() + d;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(innovation_cov);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, innovation_cov.diagonal().maxCoeff())) {
        throw SingularInnovation("kf_step: innovation covariance is numerically singular");
    }
    // K^T = S^-1 G P  (S, P symmetric)
    return ldlt.solve(g_matrix * predicted_cov).transpose();
}

GaussianBelief kf_step(const GaussianBelief& belief, const Eigen::MatrixXd& f_matrix,
                       const Eigen::MatrixXd& g_matrix, const Eigen::MatrixXd& c,
                       const Eigen::MatrixXd& d, const Eigen::VectorXd& y)
{
    const Eigen::Index n = belief.mean.size();
    const Eigen::Index m = y.size();
    if (belief.covariance.rows() != n || belief.covariance.cols() != n || f_matrix.rows() != n ||
        f_matrix.cols() != n || c.rows() != n || c.cols() != n || g_matrix.rows() != m ||
        g_matrix.cols() != n || d.rows() != m || d.cols() != m) {
        throw DomainError("kf_step: dimensions do not conform");
    }

    const Eigen::VectorXd x_pred = f_matrix * belief.mean;
    const Eigen::MatrixXd p_pred = f_matrix * belief.covariance * f_matrix.transpose() + c;
    const Eigen::MatrixXd gain = kalman_gain(p_pred, g_matrix, d);

    GaussianBelief out;
    out.mean = x_pred + gain * (y - g_matrix * x_pred);
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    out.covariance = (identity - gain * g_matrix) * p_pred;
    // symmetrise away roundoff
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

}  // namespace epiassim
