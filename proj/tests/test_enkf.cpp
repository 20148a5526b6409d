#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "epiassim/enkf.hpp"
#include "epiassim/errors.hpp"
#include "epiassim/kalman.hpp"

using namespace epiassim;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const std::vector<Component> scalar_layout{{"x", ComponentKind::State}};
const std::vector<Component> joint_layout{
    {"S", ComponentKind::State}, {"I", ComponentKind::State}, {"b0", ComponentKind::Parameter}};

MatrixXd random_members(Eigen::Index dim, Eigen::Index n, std::uint64_t seed)
{
    RandomStream rng(seed);
    MatrixXd m(dim, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) m(i, j) = rng.normal(double(i), 1.0 + double(i));
    return m;
}

MemberObserver first_component()
{
    return [](std::size_t, const Eigen::Ref<const VectorXd>& z) { return z[0]; };
}

double sample_variance(const Eigen::RowVectorXd& row)
{
    const double mean = row.mean();
    return (row.array() - mean).square().sum() / double(row.size() - 1);
}

}  // namespace

TEST(Ensemble, LayoutChecks)
{
    EXPECT_THROW(Ensemble(scalar_layout, MatrixXd::Zero(1, 1)), DomainError);
    EXPECT_THROW(Ensemble(scalar_layout, MatrixXd::Zero(2, 4)), DomainError);
    EXPECT_THROW(Ensemble({{"x", ComponentKind::State}, {"x", ComponentKind::State}}, 4), DomainError);
    EXPECT_THROW(Ensemble({{"p", ComponentKind::Parameter}, {"x", ComponentKind::State}}, 4), DomainError);

    const Ensemble e(joint_layout, 5);
    EXPECT_EQ(e.state_dim(), 2u);
    EXPECT_EQ(e.parameter_dim(), 1u);
    EXPECT_EQ(e.index_of("b0"), 2u);
    EXPECT_FALSE(e.contains("beta"));
    EXPECT_THROW(e.index_of("beta"), DomainError);
}

TEST(Ensemble, MeanAndCovarianceMatchLoops)
{
    const Ensemble e(joint_layout, random_members(3, 50, 1));
    const MatrixXd& z = e.members();
    VectorXd mean = VectorXd::Zero(3);
    for (Eigen::Index n = 0; n < 50; ++n) mean += z.col(n);
    mean /= 50.0;
    MatrixXd cov = MatrixXd::Zero(3, 3);
    for (Eigen::Index n = 0; n < 50; ++n) cov += (z.col(n) - mean) * (z.col(n) - mean).transpose();
    cov /= 49.0;
    EXPECT_TRUE(e.mean().isApprox(mean, 1e-13));
    EXPECT_TRUE(e.covariance().isApprox(cov, 1e-13));
}

TEST(EnkfAnalyze, TwoMemberExample)
{
    Ensemble e(scalar_layout, MatrixXd{{0.0, 2.0}});
    VectorXd perturbed(2);
    perturbed << 3.0, 3.0;
    const AnalysisRecord r = enkf_analyze(e, first_component(), perturbed, 3.0, 2.0);
    EXPECT_DOUBLE_EQ(r.gain[0], 0.5);
    EXPECT_DOUBLE_EQ(e.members()(0, 0), 1.5);
    EXPECT_DOUBLE_EQ(e.members()(0, 1), 2.5);
    EXPECT_DOUBLE_EQ(r.phi_yy, 2.0);
    EXPECT_DOUBLE_EQ(r.predicted_mean, 1.0);
    EXPECT_DOUBLE_EQ(r.nu, (9.0 + 1.0) / 2.0);
}

TEST(EnkfAnalyze, UncorrelatedComponentIsUntouched)
{
    MatrixXd z(2, 4);
    z << 0, 0, 2, 2,
         1, -1, 1, -1;
    Ensemble e({{"y", ComponentKind::State}, {"u", ComponentKind::State}}, z);
    VectorXd perturbed(4);
    perturbed << 5, 6, 7, 8;
    const AnalysisRecord r = enkf_analyze(e, first_component(), perturbed, 6.5, 1.0);
    EXPECT_EQ(r.gain[1], 0.0);
    EXPECT_EQ(e.members().row(1), z.row(1));
}

TEST(EnkfAnalyze, HugeObservationVarianceLeavesMembers)
{
    const MatrixXd z = random_members(3, 20, 2);
    Ensemble e(joint_layout, z);
    const VectorXd perturbed = VectorXd::Constant(20, 50.0);
    enkf_analyze(e, first_component(), perturbed, 50.0, 1e12);
    EXPECT_LT((e.members() - z).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(EnkfAnalyze, ZeroInnovationIsAFixedPoint)
{
    const MatrixXd z = random_members(3, 30, 3);
    Ensemble e(joint_layout, z);
    const VectorXd perturbed = z.row(0).transpose();
    const AnalysisRecord r = enkf_analyze(e, first_component(), perturbed, 0.0, 1.0);
    EXPECT_EQ(e.members(), z);
    EXPECT_EQ(r.nu, 0.0);
}

TEST(EnkfAnalyze, GainEqualsKalmanGainOfEnsembleCovariance)
{
    // Linear observation y = G z: the ensemble gain is P G^T (G P G^T + D)^-1.
    const MatrixXd z = random_members(3, 40, 4);
    MatrixXd g(1, 3);
    g << 0.5, -1.0, 2.0;
    const VectorXd predictions = (g * z).transpose();
    const VectorXd k = ensemble_gain(z, predictions, 0.7);
    const Ensemble e(joint_layout, z);
    const MatrixXd reference = kalman_gain(e.covariance(), g, MatrixXd::Constant(1, 1, 0.7));
    EXPECT_TRUE(k.isApprox(reference.col(0), 1e-12));
}

TEST(EnkfAnalyze, NuIsMeanSquaredPerturbedInnovation)
{
    Ensemble e(joint_layout, random_members(3, 25, 5));
    const AnalysisRecord r = enkf_analyze(e, first_component(), 1.5, 0.4, MemberStreams{9, 1, Purpose::ObservationPerturbation});
    double nu = 0.0;
    for (Eigen::Index n = 0; n < 25; ++n) nu += std::pow(r.perturbed[n] - r.predictions[n], 2);
    EXPECT_NEAR(r.nu, nu / 25.0, 1e-12 * nu);
    EXPECT_EQ(r.d_obs, 0.4);
}

TEST(EnkfAnalyze, PerturbationsHaveTheObservationVariance)
{
    const std::size_t n = 10000;
    Ensemble e(scalar_layout, random_members(1, Eigen::Index(n), 6));
    const AnalysisRecord r = enkf_analyze(e, first_component(), 2.0, 4.0, MemberStreams{3, 1, Purpose::ObservationPerturbation});
    const VectorXd w = r.perturbed.array() - 2.0;
    EXPECT_NEAR(w.mean(), 0.0, 3.0 * 2.0 / std::sqrt(double(n)));
    EXPECT_NEAR(w.squaredNorm() / double(n), 4.0, 0.2 * 4.0);
}

TEST(EnkfAnalyze, RejectsBadInput)
{
    Ensemble e(scalar_layout, MatrixXd{{0.0, 2.0}});
    EXPECT_THROW(enkf_analyze(e, first_component(), VectorXd::Zero(3), 1.0, 1.0), DomainError);
    EXPECT_THROW(enkf_analyze(e, first_component(), VectorXd::Zero(2), 1.0, 0.0), DomainError);
    auto nan_obs = [](std::size_t, const Eigen::Ref<const VectorXd>&) { return NAN; };
    EXPECT_THROW(enkf_analyze(e, nan_obs, VectorXd::Zero(2), 1.0, 1.0), SingularInnovation);
}

TEST(EnkfAnalyze, WorkerCountDoesNotChangeTheUpdate)
{
    const MatrixXd z = random_members(3, 64, 7);
    Ensemble a(joint_layout, z);
    Ensemble b(joint_layout, z);
    const MemberStreams streams{11, 2, Purpose::ObservationPerturbation};
    enkf_analyze(a, first_component(), 1.0, 0.5, streams, 1);
    enkf_analyze(b, first_component(), 1.0, 0.5, streams, 4);
    EXPECT_EQ(a.members(), b.members());
}

TEST(EnkfPredict, ZeroNoiseIdentityPropagation)
{
    const MatrixXd z = random_members(3, 10, 8);
    Ensemble e(joint_layout, z);
    enkf_predict(e, [](std::size_t, Eigen::Ref<VectorXd>) {}, VectorXd::Zero(3),
                 MemberStreams{1, 1, Purpose::ProcessNoise});
    EXPECT_EQ(e.members(), z);
}

TEST(EnkfPredict, ProcessNoiseVarianceAndParameterBlock)
{
    const Eigen::Index n = 10000;
    const MatrixXd z = MatrixXd::Zero(3, n);
    Ensemble e(joint_layout, z);
    VectorXd c(3);
    c << 4.0, 0.25, 0.0;
    enkf_predict(e, [](std::size_t, Eigen::Ref<VectorXd>) {}, c, MemberStreams{2, 1, Purpose::ProcessNoise}, {}, 3);
    EXPECT_NEAR(sample_variance(e.members().row(0)), 4.0, 0.2 * 4.0);
    EXPECT_NEAR(sample_variance(e.members().row(1)), 0.25, 0.2 * 0.25);
    EXPECT_EQ(e.members().row(2), z.row(2));
}

TEST(EnkfPredict, ProjectionRunsAfterNoise)
{
    Ensemble e(scalar_layout, MatrixXd::Zero(1, 500));
    enkf_predict(e, [](std::size_t, Eigen::Ref<VectorXd>) {}, VectorXd::Constant(1, 1.0),
                 MemberStreams{3, 1, Purpose::ProcessNoise},
                 [](Eigen::Ref<VectorXd> z) { z[0] = std::max(z[0], 0.0); });
    EXPECT_GE(e.members().minCoeff(), 0.0);
    EXPECT_GT(e.members().maxCoeff(), 0.0);
}

TEST(EnkfPredict, RejectsNoiseOnParameters)
{
    Ensemble e(joint_layout, 4);
    VectorXd c(3);
    c << 1.0, 1.0, 1.0;
    EXPECT_THROW(enkf_predict(e, [](std::size_t, Eigen::Ref<VectorXd>) {}, c, MemberStreams{}), DomainError);
    EXPECT_THROW(enkf_predict(e, [](std::size_t, Eigen::Ref<VectorXd>) {}, VectorXd::Zero(2), MemberStreams{}),
                 DomainError);
}

TEST(EnkfPredict, FailureNamesTheMember)
{
    Ensemble e(scalar_layout, MatrixXd::Zero(1, 8));
    for (unsigned workers : {1u, 4u}) {
        try {
            enkf_predict(
                e,
                [](std::size_t n, Eigen::Ref<VectorXd>) {
                    if (n == 3 || n == 6) throw StepSizeUnderflow("integrate: boom", 0.0, 0.0);
                },
                VectorXd::Zero(1), MemberStreams{}, {}, workers);
            FAIL();
        } catch (const MemberFailure& f) {
            EXPECT_EQ(f.member(), 3u);
        }
    }
}

TEST(ParameterDrift, ZeroDriftIsIdentity)
{
    const MatrixXd z = random_members(3, 10, 9);
    Ensemble e(joint_layout, z);
    parameter_drift(e, VectorXd::Zero(1), MemberStreams{1, 1, Purpose::ParameterDrift});
    EXPECT_EQ(e.members(), z);
}

TEST(ParameterDrift, VarianceAndStateBlock)
{
    const Eigen::Index n = 10000;
    const MatrixXd z = random_members(3, n, 10);
    Ensemble e(joint_layout, z);
    parameter_drift(e, VectorXd::Constant(1, 2025.0), MemberStreams{4, 1, Purpose::ParameterDrift});
    EXPECT_EQ(e.members().topRows(2), z.topRows(2));
    const Eigen::RowVectorXd increments = e.members().row(2) - z.row(2);
    EXPECT_NEAR(sample_variance(increments), 2025.0, 0.2 * 2025.0);
}

TEST(ParameterDrift, RejectsBadVariance)
{
    Ensemble e(joint_layout, 4);
    EXPECT_THROW(parameter_drift(e, VectorXd::Zero(2), MemberStreams{}), DomainError);
    EXPECT_THROW(parameter_drift(e, VectorXd::Constant(1, -1.0), MemberStreams{}), DomainError);
}
