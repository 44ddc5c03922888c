#include <gtest/gtest.h>

#include <cmath>

#include "bre/errors.hpp"
#include "bre/sim_harness.hpp"

using namespace bre;

namespace {

ConditionSpec make_spec(double rho, std::size_t n, std::size_t reps, std::uint64_t seed)
{
    ConditionSpec s;
    s.rho = rho;
    s.n = n;
    s.replications = reps;
    s.population = PopulationParams::defaults(rho);
    s.master_seed = seed;
    return s;
}

void expect_same_arm(const ArmOutcome& a, const ArmOutcome& b)
{
    EXPECT_EQ(a.converged, b.converged);
    EXPECT_EQ(a.admissible, b.admissible);
    ASSERT_EQ(a.estimates.size(), b.estimates.size());
    for (std::size_t i = 0; i < a.estimates.size(); ++i) {
        if (std::isnan(a.estimates[i]))
            EXPECT_TRUE(std::isnan(b.estimates[i]));
        else
            EXPECT_EQ(a.estimates[i], b.estimates[i]);
    }
}

}  // namespace

TEST(Replication, DeterministicForSeedConditionAndRep)
{
    const auto spec = make_spec(0.3, 200, 5, 42);
    const auto a = run_replication(spec, 3);
    const auto b = run_replication(spec, 3);
    expect_same_arm(a.reference, b.reference);
    expect_same_arm(a.comparison, b.comparison);

    const auto other = run_replication(spec, 4);
    EXPECT_NE(a.reference.estimates[0], other.reference.estimates[0]);

    auto shifted = spec;
    shifted.condition_index = 1;
    EXPECT_NE(run_replication(shifted, 3).reference.estimates[0], a.reference.estimates[0]);
}

TEST(Replication, NearDegeneratePopulationArmsAgree)
{
    auto spec = make_spec(0.3, 500, 1, 7);
    for (auto& row : spec.population.wave_residual_var) row.fill(1e-3);
    for (auto& row : spec.population.indicator_residual_var) row.fill(1e-3);
    const auto r = run_replication(spec, 0);
    ASSERT_TRUE(r.reference.usable(0));
    ASSERT_TRUE(r.comparison.usable(0));
    EXPECT_NEAR(r.reference.estimates[0], r.comparison.estimates[0], 0.02);
}

TEST(Replication, ReferenceArmIsConsistentAtModerateN)
{
    const auto result = run_condition(make_spec(0.3, 500, 200, 11), 1);
    std::size_t close = 0;
    for (const auto& rec : result.reps)
        if (rec.reference.usable(0) && std::abs(rec.reference.estimates[0] - 0.3) < 0.15) ++close;
    EXPECT_GE(close, 190u);
}

TEST(Condition, SingleReplicationSuppressesMetrics)
{
    const auto result = run_condition(make_spec(0.3, 100, 1, 3), 1);
    ASSERT_EQ(result.metrics.size(), 1u);
    EXPECT_FALSE(result.metrics[0].report.has_value());
    EXPECT_FALSE(result.metrics[0].suppressed_reason.empty());
    EXPECT_TRUE(result.degenerate());
}

TEST(Condition, CompleteDesignReproducesReference)
{
    auto spec = make_spec(0.3, 300, 20, 5);
    spec.design = no_missing();
    const auto result = run_condition(spec, 1);
    ASSERT_TRUE(result.metrics[0].report.has_value());
    const auto& rep = *result.metrics[0].report;
    EXPECT_DOUBLE_EQ(rep.re_percent, 100.0);
    EXPECT_DOUBLE_EQ(rep.iqr_overlap, 1.0);
    EXPECT_DOUBLE_EQ(rep.bre, 1.0 - rep.amrb);
}

TEST(Condition, ExclusionAccountingBalances)
{
    const auto result = run_condition(make_spec(0.3, 40, 30, 9), 1);
    const auto& ex = result.exclusions;
    const auto& m = result.metrics[0];
    EXPECT_EQ(m.reference.size() + ex.nonconverged_ref + ex.inadmissible_ref, 30u);
    EXPECT_EQ(m.comparison.size() + ex.nonconverged_comp + ex.inadmissible_comp, 30u);
    EXPECT_EQ(result.reps.size(), 30u);
    for (std::size_t i = 0; i < result.reps.size(); ++i) EXPECT_EQ(result.reps[i].rep, i);
}

TEST(Condition, WorkerCountDoesNotChangeResults)
{
    const auto spec = make_spec(0.55, 80, 24, 13);
    const auto serial = run_condition_serial(spec);
    for (int workers : {1, 3, 8}) {
        const auto par = run_condition(spec, workers);
        ASSERT_EQ(par.reps.size(), serial.reps.size());
        for (std::size_t i = 0; i < serial.reps.size(); ++i) {
            expect_same_arm(par.reps[i].reference, serial.reps[i].reference);
            expect_same_arm(par.reps[i].comparison, serial.reps[i].comparison);
        }
        EXPECT_EQ(summary_line(par), summary_line(serial));
    }
}

TEST(Condition, InvalidSpecsRejectedBeforeRunning)
{
    auto tiny = make_spec(0.3, 5, 2, 1);
    EXPECT_THROW(run_condition(tiny, 2), Error);
    auto none = make_spec(0.3, 100, 0, 1);
    EXPECT_THROW(run_condition(none, 1), Error);
}

TEST(Grid, ExpandsRhoMajor)
{
    GridSpec g;
    g.master_seed = 1;
    const auto specs = expand_grid(g);
    ASSERT_EQ(specs.size(), 24u);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        EXPECT_EQ(specs[i].condition_index, i);
        EXPECT_EQ(specs[i].rho, g.rho_levels[i / 8]);
        EXPECT_EQ(specs[i].n, g.n_levels[i % 8]);
        EXPECT_NEAR(specs[i].population.slope_slope_corr(), specs[i].rho, 1e-15);
        EXPECT_EQ(specs[i].true_value("slope_slope_corr"), specs[i].rho);
    }
}
