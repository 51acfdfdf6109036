#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "sdfest/error.hpp"
#include "sdfest/generators.hpp"
#include "sdfest/model.hpp"
#include "sdfest/step_cdf.hpp"

namespace sdfest
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();

TEST(StepCdf, ConstructorValidates)
{
    EXPECT_THROW(StepCdf(std::vector<Jump>{}), ConfigError);
    EXPECT_THROW(StepCdf({{1.0, 0.5}, {1.0, 0.5}}), NumericError);
    EXPECT_THROW(StepCdf({{2.0, 0.5}, {1.0, 0.5}}), NumericError);
    EXPECT_THROW(StepCdf({{1.0, 0.0}, {2.0, 1.0}}), NumericError);
    EXPECT_THROW(StepCdf({{1.0, 0.5}, {2.0, 0.4}}), NumericError);
    EXPECT_NO_THROW(StepCdf({{1.0, 0.5}, {2.0, 0.5}}));
}

TEST(StepCdf, RightContinuousEvaluation)
{
    StepCdf F({{0.0, 0.25}, {1.0, 0.5}, {2.5, 0.25}});
    EXPECT_EQ(F(-0.1), 0.0);
    EXPECT_EQ(F(0.0), 0.25);
    EXPECT_EQ(F(0.999), 0.25);
    EXPECT_EQ(F(1.0), 0.75);
    EXPECT_EQ(F.left_limit(1.0), 0.25);
    EXPECT_EQ(F(2.5), 1.0);
    EXPECT_EQ(F(inf), 1.0);
    EXPECT_EQ(F(-inf), 0.0);
}

TEST(StepCdf, FromSampleMergesTies)
{
    std::vector<double> v{2.0, 1.0, 2.0, 3.0};
    auto F = StepCdf::from_sample(v);
    ASSERT_EQ(F.size(), 3u);
    EXPECT_EQ(F.jumps()[1].location, 2.0);
    EXPECT_DOUBLE_EQ(F.jumps()[1].mass, 0.5);
    EXPECT_EQ(F(2.0), 0.75);
}

TEST(StepCdf, FromMultiplicitiesIsExact)
{
    std::vector<double> loc{0.0, 1.0, 2.0};
    std::vector<std::uint64_t> cnt{1, 1, 1};
    auto F = StepCdf::from_multiplicities(loc, cnt);
    EXPECT_EQ(F(0.0), 1.0 / 3.0);
    EXPECT_EQ(F(1.0), 2.0 / 3.0);
    EXPECT_EQ(F(2.0), 1.0);
}

TEST(SupDistance, Examples)
{
    StepCdf a({{1.0, 1.0}});
    StepCdf b({{2.0, 1.0}});
    EXPECT_EQ(sup_distance(a, a), 0.0);
    EXPECT_EQ(sup_distance(a, b), 1.0);
    EXPECT_EQ(sup_distance(b, a), 1.0);

    StepCdf c({{0.0, 0.5}, {1.0, 0.5}});
    StepCdf d({{0.5, 0.5}, {1.0, 0.5}});
    EXPECT_EQ(sup_distance(c, d), 0.5);
}

// Brute-force oracle: evaluate at every jump, just before it and far out
double brute_sup(StepCdf const& a, StepCdf const& b)
{
    std::vector<double> xs;
    for (auto const& F : {&a, &b})
        for (auto j : F->jumps())
            xs.push_back(j.location);
    double best = 0;
    for (double x : xs)
    {
        best = std::max(best, std::fabs(a(x) - b(x)));
        double below = std::nextafter(x, -inf);
        best = std::max(best, std::fabs(a(below) - b(below)));
    }
    return best;
}

TEST(SupDistance, MatchesBruteForceOnRandomSamples)
{
    std::mt19937_64 eng(12);
    std::uniform_int_distribution<int> pick(0, 8);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<double> u(1 + trial % 7), v(1 + trial % 5);
        for (auto& x : u)
            x = pick(eng) * 0.25;
        for (auto& x : v)
            x = pick(eng) * 0.25;
        auto a = StepCdf::from_sample(u);
        auto b = StepCdf::from_sample(v);
        EXPECT_NEAR(sup_distance(a, b), brute_sup(a, b), 1e-15);
    }
}

TEST(SupDistance, ContinuousReference)
{
    // Uniform(0,1) against its 4-point midpoint discretization: sup is 1/8
    std::vector<double> v{0.125, 0.375, 0.625, 0.875};
    auto F = StepCdf::from_sample(v);
    auto U = [](double x) { return std::clamp(x, 0.0, 1.0); };
    EXPECT_NEAR(sup_distance(F, U), 0.125, 1e-15);
}

//---------------------------------------------------------------------------//
TEST(CellModel, Validation)
{
    EXPECT_THROW(CellModel({}), ConfigError);
    EXPECT_THROW(CellModel({0.5, 0.6}), NumericError);
    EXPECT_THROW(CellModel({1.5, -0.5}), NumericError);
    CellModel ok({0.25, 0.75});
    EXPECT_EQ(ok.num_cells(), 2u);
    EXPECT_EQ(ok[1], 0.75);
}

TEST(GroupingScheme, Validation)
{
    EXPECT_THROW(GroupingScheme::make(10, 3), ConfigError);
    EXPECT_THROW(GroupingScheme::make(10, 0), ConfigError);
    EXPECT_THROW(GroupingScheme::make(10, 20), ConfigError);
    auto s = GroupingScheme::make(10, 5);
    EXPECT_EQ(s.group_size, 2u);
}

TEST(StructuralCdf, UniformCells)
{
    CellModel cells({0.25, 0.25, 0.25, 0.25});
    auto F = structural_cdf(cells);
    ASSERT_EQ(F.size(), 1u);
    EXPECT_EQ(F.jumps()[0], (Jump{1.0, 1.0}));
    EXPECT_EQ(F(0.99), 0.0);
    EXPECT_EQ(F(1.0), 1.0);
}

TEST(StructuralCdf, ExampleGeneratorM4)
{
    CellModel cells({0.4375, 0.3125, 0.1875, 0.0625});
    auto F = structural_cdf(cells);
    ASSERT_EQ(F.size(), 4u);
    std::vector<double> support{0.25, 0.75, 1.25, 1.75};
    for (std::size_t i = 0; i < 4; ++i)
    {
        EXPECT_EQ(F.jumps()[i].location, support[i]);
        EXPECT_DOUBLE_EQ(F.jumps()[i].mass, 0.25);
    }
    EXPECT_EQ(F(1.0), 0.5);
    EXPECT_EQ(F(inf), 1.0);
    EXPECT_EQ(F(0.2), 0.0);
}

TEST(StructuralCdf, ExampleM1000CloseToLimit)
{
    auto gen = example_generator();
    auto F = structural_cdf(cells_from_generator(gen, 1000));
    double d = sup_distance(F, [](double x) { return std::clamp(x / 2, 0.0, 1.0); });
    // M p_j = 2 - (2j - 1)/M, so the distance is exactly 1/(2M)
    EXPECT_NEAR(d, 0.0005, 1e-12);
    EXPECT_LE(d, 0.002);
}

TEST(GroupModel, BlockSums)
{
    CellModel cells({0.4375, 0.3125, 0.1875, 0.0625});
    auto g = group_model(cells, GroupingScheme::make(4, 2, false));
    ASSERT_EQ(g.num_groups(), 2u);
    EXPECT_DOUBLE_EQ(g.probabilities()[0], 0.75);
    EXPECT_DOUBLE_EQ(g.probabilities()[1], 0.25);

    auto Fm = grouped_structural_cdf(g);
    ASSERT_EQ(Fm.size(), 2u);
    EXPECT_EQ(Fm.jumps()[0].location, 0.5);
    EXPECT_EQ(Fm.jumps()[1].location, 1.5);
    EXPECT_EQ(Fm(1.0), 0.5);
}

TEST(GroupModel, OrderedSortsAscending)
{
    CellModel cells({0.4375, 0.3125, 0.1875, 0.0625});
    auto g = group_model(cells, GroupingScheme::make(4, 2, true));
    EXPECT_DOUBLE_EQ(g.probabilities()[0], 0.25);
    EXPECT_DOUBLE_EQ(g.probabilities()[1], 0.75);
    std::vector<std::size_t> expected{3, 2, 1, 0};
    EXPECT_TRUE(std::equal(expected.begin(), expected.end(), g.cell_order().begin()));
}

TEST(GroupModel, IdentityAndUniform)
{
    auto cells = cells_from_generator(example_generator(), 60);
    auto g1 = group_model(cells, GroupingScheme::make(60, 60));
    for (std::size_t j = 0; j < 60; ++j)
        EXPECT_EQ(g1.probabilities()[j], cells[j]);
    EXPECT_EQ(grouped_structural_cdf(g1), structural_cdf(cells));

    auto uni = cells_from_generator(uniform_generator(), 60);
    for (std::size_t m : {1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60})
    {
        auto g = group_model(uni, GroupingScheme::make(60, m));
        for (double q : g.probabilities())
            EXPECT_NEAR(q, static_cast<double>(60 / m) / 60.0, 1e-15);
        auto Fm = grouped_structural_cdf(g);
        EXPECT_EQ(Fm.size(), 1u);
        EXPECT_NEAR(Fm.jumps()[0].location, 1.0, 1e-12);
    }
}

TEST(GroupModel, PreservesMass)
{
    auto cells = cells_from_generator(example_generator(), 1000);
    for (std::size_t m : {1, 8, 40, 125, 1000})
    {
        auto g = group_model(cells, GroupingScheme::make(1000, m, true));
        double s = std::accumulate(g.probabilities().begin(), g.probabilities().end(), 0.0);
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(GroupModel, OrderedGroupingBound)
{
    for (auto const& gen : {example_generator(), uniform_generator(), power_generator(0.5)})
    {
        auto cells = cells_from_generator(gen, 1000);
        auto FM = structural_cdf(cells);
        for (std::size_t m = 1; m <= 1000; ++m)
        {
            if (1000 % m)
                continue;
            auto Fm = grouped_structural_cdf(group_model(cells, GroupingScheme::make(1000, m, true)));
            double k = 1000.0 / static_cast<double>(m);
            if (gen.name == "uniform")
            {
                // Both are a single jump at 1, up to rounding in the location
                ASSERT_EQ(Fm.size(), 1u);
                EXPECT_NEAR(Fm.jumps()[0].location, FM.jumps()[0].location, 1e-12);
                continue;
            }
            EXPECT_LE(sup_distance(FM, Fm), k / 1000.0 + 1.0 / static_cast<double>(m) + 1e-12)
                << gen.name << " m=" << m;
        }
    }
}
}  // namespace
}  // namespace sdfest
