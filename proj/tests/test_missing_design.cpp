#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "bre/errors.hpp"
#include "bre/missing_design.hpp"

using namespace bre;

TEST(Swmd6, TablePattern)
{
    const auto d = swmd6();
    ASSERT_EQ(d.groups(), 6u);
    const std::vector<std::vector<bool>> expected{
        {true, true, true, true, true},
        {true, true, true, true, false},
        {true, true, true, false, true},
        {true, true, false, true, true},
        {true, false, true, true, true},
        {false, true, true, true, true},
    };
    EXPECT_EQ(d.group_wave_mask, expected);
    for (std::size_t t = 0; t < kWaves; ++t) {
        int observed = 0;
        for (const auto& row : d.group_wave_mask) observed += row[t] ? 1 : 0;
        EXPECT_EQ(observed, 5);
    }
    EXPECT_NO_THROW(d.validate());
}

TEST(AssignGroups, BalancedAllocation)
{
    const auto d = swmd6();
    RandomStream rng(4);
    const auto count = [&](std::size_t n) {
        std::vector<std::size_t> sizes(6, 0);
        for (auto g : assign_groups(n, d, rng)) ++sizes.at(g);
        return sizes;
    };
    EXPECT_EQ(count(60), (std::vector<std::size_t>{10, 10, 10, 10, 10, 10}));
    EXPECT_EQ(count(40), (std::vector<std::size_t>{7, 7, 7, 7, 6, 6}));
    EXPECT_EQ(count(6), (std::vector<std::size_t>{1, 1, 1, 1, 1, 1}));
}

TEST(AssignGroups, DeterministicAndShuffled)
{
    const auto d = swmd6();
    RandomStream a(17), b(17);
    const auto la = assign_groups(120, d, a);
    EXPECT_EQ(la, assign_groups(120, d, b));
    EXPECT_FALSE(std::is_sorted(la.begin(), la.end()));
}

TEST(AssignGroups, TooFewRows)
{
    RandomStream rng(1);
    try {
        assign_groups(5, swmd6(), rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientSample);
    }
}

namespace {

DataMatrix ramp_data(std::size_t n)
{
    DataMatrix d;
    d.values.resize(n, kObserved);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < kObserved; ++c) d.values(r, c) = 0.1 * r + 0.001 * c;
    d.mask.setConstant(n, kObserved, true);
    return d;
}

}  // namespace

TEST(ApplyDesign, MasksWholeWaveForBothConstructs)
{
    const auto design = swmd6();
    const auto data = ramp_data(6);
    const std::vector<std::size_t> labels{0, 1, 2, 3, 4, 5};
    const auto out = apply_design(data, labels, design);
    EXPECT_EQ(out.values, data.values);
    EXPECT_TRUE(out.mask.row(0).all());
    for (std::size_t g = 1; g < 6; ++g) {
        const std::size_t skipped = 5 - g;  // 0-based wave
        EXPECT_EQ(out.mask.row(g).count(), 24);
        for (std::size_t col = 0; col < kObserved; ++col)
            EXPECT_EQ(out.mask(g, col), wave_of_column(col) != skipped);
    }
    // group 6 misses wave 1 only
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_FALSE(out.mask(5, column_index(0, 0, k)));
        EXPECT_FALSE(out.mask(5, column_index(1, 0, k)));
    }
}

TEST(ApplyDesign, MissingFractionIsOneSixth)
{
    const auto design = swmd6();
    RandomStream rng(8);
    const auto data = ramp_data(600);
    const auto out = apply_design(data, assign_groups(600, design, rng), design);
    const auto missing = static_cast<std::size_t>((!out.mask).count());
    EXPECT_EQ(missing, 5u * 100u * 6u);
    EXPECT_EQ(missing * 6, 600u * 30u);
}

TEST(ApplyDesign, IdempotentAndValueFree)
{
    const auto design = swmd6();
    RandomStream rng(9);
    const auto data = ramp_data(60);
    const auto labels = assign_groups(60, design, rng);
    const auto once = apply_design(data, labels, design);
    const auto twice = apply_design(once, labels, design);
    EXPECT_TRUE((once.mask == twice.mask).all());
    EXPECT_EQ(once.values, twice.values);

    // mask depends on labels only
    auto shifted = data;
    shifted.values.array() += 100.0;
    EXPECT_TRUE((apply_design(shifted, labels, design).mask == once.mask).all());
}

TEST(ApplyDesign, InvalidLabels)
{
    const auto data = ramp_data(3);
    try {
        apply_design(data, {0, 1, 6}, swmd6());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidGroup);
    }
    EXPECT_THROW(apply_design(data, {0, 1}, swmd6()), Error);
}

TEST(CustomDesign, ParsesAndValidates)
{
    const auto d = custom_design("mine", {"11111", "01111"});
    EXPECT_EQ(d.groups(), 2u);
    EXPECT_FALSE(d.group_wave_mask[1][0]);
    EXPECT_THROW(custom_design("bad", {"1111"}), Error);
    EXPECT_THROW(custom_design("bad", {"00000"}), Error);
    EXPECT_THROW(custom_design("bad", {"11x11"}), Error);
    EXPECT_EQ(design_by_name("swmd6").group_wave_mask, swmd6().group_wave_mask);
    EXPECT_EQ(design_by_name("complete").groups(), 1u);
    EXPECT_THROW(design_by_name("three-form"), Error);
}
