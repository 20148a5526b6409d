#include <vector>

#include <gtest/gtest.h>

#include "epiassim/diagnostics.hpp"
#include "epiassim/errors.hpp"
#include "epiassim/random.hpp"

using namespace epiassim;

TEST(Mse, Example)
{
    const std::vector<double> truth{1, 2};
    const std::vector<double> estimate{2, 4};
    EXPECT_DOUBLE_EQ(mse(truth, estimate), 2.5);
    EXPECT_EQ(mse(truth, truth), 0.0);
}

TEST(Mse, NonNegativeAndSymmetric)
{
    RandomStream rng(1);
    std::vector<double> a(50);
    std::vector<double> b(50);
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = rng.normal(0, 10);
        b[k] = rng.normal(0, 10);
    }
    EXPECT_GE(mse(a, b), 0.0);
    EXPECT_EQ(mse(a, b), mse(b, a));
}

TEST(Mse, RejectsBadLengths)
{
    const std::vector<double> two{1, 2};
    const std::vector<double> three{1, 2, 3};
    const std::vector<double> none;
    EXPECT_THROW(mse(two, three), LengthMismatch);
    EXPECT_THROW(mse(none, none), DomainError);
}

TEST(RelativeError, Examples)
{
    EXPECT_DOUBLE_EQ(relative_error(1800, 900), 0.5);
    EXPECT_DOUBLE_EQ(relative_error(-2, -3), 0.5);
    EXPECT_EQ(relative_error(0.08, 0.08), 0.0);
    EXPECT_THROW(relative_error(0.0, 1.0), DomainError);
}

TEST(ConsistencyGamma, Examples)
{
    const std::vector<InnovationRecord> matched{{2.0, 1.0, 1.0}, {4.0, 1.0, 3.0}};
    const ConsistencyReport a = consistency_gamma(matched);
    EXPECT_DOUBLE_EQ(a.gamma, 1.0);
    EXPECT_EQ(a.used, 2u);
    EXPECT_EQ(a.excluded, 0u);

    const std::vector<InnovationRecord> over{{4.0, 1.0, 1.0}};
    EXPECT_DOUBLE_EQ(consistency_gamma(over).gamma, 0.5);
}

TEST(ConsistencyGamma, InvariantUnderCommonScaling)
{
    RandomStream rng(2);
    std::vector<InnovationRecord> records;
    for (int k = 0; k < 30; ++k) records.push_back({rng.uniform(0.5, 5), rng.uniform(0, 2), rng.uniform(0.1, 2)});
    std::vector<InnovationRecord> scaled = records;
    for (auto& r : scaled) {
        r.nu *= 37.0;
        r.phi_yy *= 37.0;
        r.d_obs *= 37.0;
    }
    EXPECT_NEAR(consistency_gamma(records).gamma, consistency_gamma(scaled).gamma, 1e-12);
}

TEST(ConsistencyGamma, SkipsDegenerateSteps)
{
    const std::vector<InnovationRecord> records{{2.0, 1.0, 1.0}, {0.0, 1.0, 1.0}, {1e-13, 0.0, 1.0}};
    const ConsistencyReport r = consistency_gamma(records);
    EXPECT_DOUBLE_EQ(r.gamma, 1.0);
    EXPECT_EQ(r.used, 1u);
    EXPECT_EQ(r.excluded, 2u);
}

TEST(ConsistencyGamma, AllDegenerateOrEmpty)
{
    const std::vector<InnovationRecord> degenerate{{0.0, 1.0, 1.0}, {1e-15, 1.0, 1.0}};
    EXPECT_THROW(consistency_gamma(degenerate), DegenerateInnovation);
    EXPECT_THROW(consistency_gamma(std::vector<InnovationRecord>{}), DomainError);
}
