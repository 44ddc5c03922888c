#include <gtest/gtest.h>

#include <cmath>

#include "bre/errors.hpp"
#include "bre/lgm_model.hpp"
#include "bre/rng.hpp"

using namespace bre;

namespace {

// Scalar covariance algebra written directly from the model equations.
double covariance_oracle(const PopulationParams& p, std::size_t i, std::size_t j)
{
    const std::size_t ci = i / 15, ti = (i / 3) % 5, ki = i % 3;
    const std::size_t cj = j / 15, tj = (j / 3) % 5, kj = j % 3;
    const double si = p.time_scores[ti], sj = p.time_scores[tj];
    const auto& g = p.growth_cov;
    double eta = g(2 * ci, 2 * cj) + sj * g(2 * ci, 2 * cj + 1) + si * g(2 * ci + 1, 2 * cj)
                 + si * sj * g(2 * ci + 1, 2 * cj + 1);
    if (ci == cj && ti == tj) eta += p.wave_residual_var[ci][ti];
    double s = p.loadings[ci][ki] * p.loadings[cj][kj] * eta;
    if (i == j) s += p.indicator_residual_var[ci][ki];
    return s;
}

// Slope covariance recovered from off-diagonal marker covariances.
double recovered_slope_corr(const PopulationParams& p, const Eigen::MatrixXd& sigma)
{
    // f(t, t') = a + t' b1 + t b2 + t t' c for markers with distinct wave
    // indices; with time scores 0..4 the second difference isolates c.
    const auto cov = [&](std::size_t c1, std::size_t t1, std::size_t c2, std::size_t t2) {
        return sigma(column_index(c1, t1, 0), column_index(c2, t2, 0));
    };
    const auto slope_cov = [&](std::size_t c1, std::size_t c2) {
        // (f(2,4) - f(1,4)) - (f(2,3) - f(1,3)) = (t2 - t1)(t4 - t3) c
        const double scale = (p.time_scores[2] - p.time_scores[1]) * (p.time_scores[4] - p.time_scores[3]);
        return ((cov(c1, 2, c2, 4) - cov(c1, 1, c2, 4)) - (cov(c1, 2, c2, 3) - cov(c1, 1, c2, 3))) / scale;
    };
    return slope_cov(0, 1) / std::sqrt(slope_cov(0, 0) * slope_cov(1, 1));
}

}  // namespace

TEST(PopulationParams, DefaultsAreValid)
{
    const auto p = PopulationParams::defaults(0.3);
    EXPECT_NO_THROW(p.validate());
    EXPECT_NEAR(p.slope_slope_corr(), 0.3, 1e-15);
    for (double rho : {0.1, 0.3, 0.55}) EXPECT_NO_THROW(build_moments(PopulationParams::defaults(rho)));
}

TEST(PopulationParams, RhoInsertion)
{
    auto p = PopulationParams::defaults(0.1);
    p.set_slope_slope_corr(0.55);
    const double expected = 0.55 * std::sqrt(p.growth_cov(kSlopeB, kSlopeB) * p.growth_cov(kSlopeH, kSlopeH));
    EXPECT_EQ(p.growth_cov(kSlopeB, kSlopeH), expected);
    EXPECT_EQ(p.growth_cov(kSlopeH, kSlopeB), expected);
    EXPECT_THROW(p.set_slope_slope_corr(1.5), Error);
    EXPECT_THROW(p.set_slope_slope_corr(-1.0), Error);
}

TEST(PopulationParams, ValidationErrors)
{
    auto p = PopulationParams::defaults();
    p.time_scores = {0, 1, 1, 3, 4};
    EXPECT_THROW(p.validate(), Error);

    p = PopulationParams::defaults();
    p.loadings[1][0] = 0.9;
    EXPECT_THROW(p.validate(), Error);

    p = PopulationParams::defaults();
    p.indicator_residual_var[0][2] = -0.1;
    EXPECT_THROW(p.validate(), Error);

    p = PopulationParams::defaults();
    p.growth_cov(kInterceptB, kSlopeB) = p.growth_cov(kSlopeB, kInterceptB) = 5.0;
    try {
        build_moments(p);
        FAIL() << "expected NotPositiveDefinite";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
    }
}

TEST(ImpliedMoments, DegenerateInterceptOnlyCollapse)
{
    PopulationParams p;
    p.growth_means.setZero();
    p.growth_cov = Eigen::Vector4d(1.0, 0.0, 1.0, 0.0).asDiagonal();
    for (std::size_t c = 0; c < kConstructs; ++c) {
        p.loadings[c] = {1.0, 1.0, 1.0};
        p.wave_residual_var[c].fill(0.0);
        p.indicator_residual_var[c].fill(0.0);
        p.indicator_intercepts[c].fill(0.0);
    }
    const auto m = implied_moments(p);
    EXPECT_TRUE(m.mu.isZero(0.0));
    for (std::size_t i = 0; i < kObserved; ++i)
        for (std::size_t j = 0; j < kObserved; ++j)
            EXPECT_EQ(m.sigma(i, j), (i / 15 == j / 15) ? 1.0 : 0.0);

    try {
        build_moments(p);
        FAIL() << "expected NotPositiveDefinite";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
    }
}

TEST(ImpliedMoments, MatchesScalarOracle)
{
    const auto p = PopulationParams::defaults(0.55);
    const auto m = build_moments(p);
    EXPECT_TRUE(m.sigma.isApprox(m.sigma.transpose(), 0.0));
    for (std::size_t i = 0; i < kObserved; ++i) {
        EXPECT_GT(m.sigma(i, i), 0.0);
        const std::size_t c = i / 15, t = (i / 3) % 5, k = i % 3;
        const double eta_mean = p.growth_means(2 * c) + p.time_scores[t] * p.growth_means(2 * c + 1);
        EXPECT_NEAR(m.mu(i), p.indicator_intercepts[c][k] + p.loadings[c][k] * eta_mean, 1e-14);
        for (std::size_t j = 0; j < kObserved; ++j)
            EXPECT_NEAR(m.sigma(i, j), covariance_oracle(p, i, j), 1e-12);
    }
}

TEST(ImpliedMoments, SlopeCorrelationRecoverable)
{
    RandomStream rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        auto p = PopulationParams::defaults(0.0);
        p.growth_cov(kSlopeB, kSlopeB) = 0.1 + rng.uniform();
        p.growth_cov(kSlopeH, kSlopeH) = 0.1 + rng.uniform();
        const double rho = 1.6 * (rng.uniform() - 0.5);
        p.set_slope_slope_corr(rho);
        if (p.growth_cov.llt().info() != Eigen::Success) continue;
        const auto m = implied_moments(p);
        EXPECT_NEAR(recovered_slope_corr(p, m.sigma), rho, 1e-12);
    }
}

TEST(ImpliedMoments, ColumnOrder)
{
    EXPECT_EQ(column_index(0, 0, 0), 0u);
    EXPECT_EQ(column_index(0, 1, 2), 5u);
    EXPECT_EQ(column_index(1, 0, 0), 15u);
    EXPECT_EQ(column_index(1, 4, 2), 29u);
    const auto names = observed_column_names();
    ASSERT_EQ(names.size(), kObserved);
    EXPECT_EQ(names[0], "B_t1_y1");
    EXPECT_EQ(names[5], "B_t2_y3");
    EXPECT_EQ(names[29], "H_t5_y3");
    for (std::size_t col = 0; col < kObserved; ++col) EXPECT_EQ(wave_of_column(col), (col / 3) % 5);
}

TEST(GenerateDataset, IdentityMeansWithinClt)
{
    ModelMoments m{Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4)};
    RandomStream rng(5);
    const std::size_t n = 100000;
    const auto d = generate_dataset(m, n, rng);
    ASSERT_EQ(d.rows(), n);
    const Eigen::VectorXd mean = d.values.colwise().mean();
    for (Eigen::Index j = 0; j < 4; ++j) EXPECT_LT(std::abs(mean(j)), 4.0 * std::sqrt(1.0 / n));
}

TEST(GenerateDataset, Deterministic)
{
    const auto m = build_moments(PopulationParams::defaults());
    RandomStream a(99), b(99);
    const auto da = generate_dataset(m, 50, a);
    const auto db = generate_dataset(m, 50, b);
    EXPECT_EQ(da.values, db.values);
    RandomStream c(100);
    EXPECT_NE(generate_dataset(m, 50, c).values, da.values);
}

TEST(GenerateDataset, SingleRow)
{
    const auto m = build_moments(PopulationParams::defaults());
    RandomStream rng(1);
    const auto d = generate_dataset(m, 1, rng);
    EXPECT_EQ(d.rows(), 1u);
    EXPECT_EQ(d.cols(), kObserved);
    EXPECT_TRUE(d.complete());
    EXPECT_TRUE(d.values.allFinite());
    EXPECT_EQ(d.column_names.size(), kObserved);
    EXPECT_THROW(generate_dataset(m, 0, rng), Error);
}

TEST(GenerateDataset, RejectsNonPd)
{
    ModelMoments m{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Ones(2, 2)};
    m.sigma(0, 1) = m.sigma(1, 0) = 2.0;
    RandomStream rng(1);
    try {
        generate_dataset(m, 3, rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
    }
}

TEST(GenerateDataset, SampleMomentsConvergeAtOneMillion)
{
    const auto m = build_moments(PopulationParams::defaults(0.3));
    RandomStream rng(20250101);
    const auto d = generate_dataset(m, 1000000, rng);
    const Eigen::VectorXd mean = d.values.colwise().mean();
    const Eigen::MatrixXd centered = d.values.rowwise() - mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / double(d.rows() - 1);
    EXPECT_LT((mean - m.mu).cwiseAbs().maxCoeff(), 0.02);
    EXPECT_LT((cov - m.sigma).cwiseAbs().maxCoeff(), 0.02);
}
