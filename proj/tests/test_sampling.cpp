#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "sdfest/error.hpp"
#include "sdfest/generators.hpp"
#include "sdfest/rng.hpp"
#include "sdfest/sampling.hpp"

namespace sdfest
{
namespace
{
struct Stats
{
    double mean{};
    double var{};
};

template<class T>
Stats stats(std::vector<T> const& xs)
{
    double const n = static_cast<double>(xs.size());
    double m = 0;
    for (auto x : xs)
        m += static_cast<double>(x);
    m /= n;
    double v = 0;
    for (auto x : xs)
        v += (static_cast<double>(x) - m) * (static_cast<double>(x) - m);
    return {m, v / (n - 1)};
}

TEST(Rng, StreamsAreReproducibleAndDistinct)
{
    Rng a(RngStream{5, 3});
    Rng b(RngStream{5, 3});
    Rng c(RngStream{5, 4});
    Rng d(RngStream{6, 3});
    for (int i = 0; i < 100; ++i)
    {
        auto x = a.bits();
        EXPECT_EQ(x, b.bits());
        EXPECT_NE(x, c.bits());
        EXPECT_NE(x, d.bits());
    }
}

TEST(Rng, UniformRange)
{
    Rng rng(RngStream{1, 0});
    double lo = 1, hi = 0, sum = 0;
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i)
    {
        double u = rng.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_GE(lo, 0.0);
    EXPECT_LT(hi, 1.0);
    EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
}

TEST(Rng, BelowIsUniform)
{
    Rng rng(RngStream{2, 0});
    constexpr std::uint64_t bound = 7;
    constexpr int n = 70000;
    std::vector<int> hits(bound);
    for (int i = 0; i < n; ++i)
    {
        auto v = rng.below(bound);
        ASSERT_LT(v, bound);
        ++hits[v];
    }
    // Chi-square with 6 dof; 22.46 is the 0.999 quantile
    double chi = 0;
    for (int h : hits)
        chi += (h - 10000.0) * (h - 10000.0) / 10000.0;
    EXPECT_LT(chi, 22.46);
}

TEST(Rng, PoissonMoments)
{
    for (double mean : {0.3, 4.0, 9.99, 10.0, 37.5, 3000.0})
    {
        Rng rng(RngStream{3, static_cast<std::uint64_t>(mean * 100)});
        constexpr int reps = 100000;
        std::vector<std::uint64_t> xs(reps);
        for (auto& x : xs)
            x = rng.poisson(mean);
        auto s = stats(xs);
        EXPECT_NEAR(s.mean, mean, 5 * std::sqrt(mean / reps)) << mean;
        // Var of the sample variance for Poisson: (mean + 2 mean^2) / reps
        EXPECT_NEAR(s.var, mean, 5 * std::sqrt((mean + 2 * mean * mean) / reps)) << mean;
    }
    Rng rng(RngStream{3, 0});
    EXPECT_EQ(rng.poisson(0.0), 0u);
    EXPECT_THROW(rng.poisson(-1.0), NumericError);
}

TEST(Rng, PoissonSmallMeanPmf)
{
    // Compare observed frequencies with the exact pmf
    Rng rng(RngStream{4, 0});
    double const mean = 3.0;
    constexpr int reps = 200000;
    std::vector<int> hits(30);
    for (int i = 0; i < reps; ++i)
        ++hits[std::min<std::uint64_t>(rng.poisson(mean), 29)];
    double p = std::exp(-mean);
    for (int k = 0; k < 10; ++k)
    {
        double se = std::sqrt(p * (1 - p) / reps);
        EXPECT_NEAR(hits[k] / double(reps), p, 5 * se) << k;
        p *= mean / (k + 1);
    }
}

TEST(AliasTable, Frequencies)
{
    std::vector<double> p{0.5, 0.0, 0.2, 0.3};
    AliasTable table(p);
    Rng rng(RngStream{5, 0});
    constexpr int n = 200000;
    std::vector<int> hits(4);
    for (int i = 0; i < n; ++i)
        ++hits[table.sample(rng)];
    EXPECT_EQ(hits[1], 0);
    for (std::size_t j = 0; j < 4; ++j)
        EXPECT_NEAR(hits[j] / double(n), p[j], 5 * std::sqrt(p[j] * (1 - p[j]) / n));
}

//---------------------------------------------------------------------------//
TEST(DrawMultinomial, SingleCell)
{
    CellModel cells({1.0});
    auto c = draw_multinomial(cells, 7, RngStream{0, 0});
    ASSERT_EQ(c.counts.size(), 1u);
    EXPECT_EQ(c.counts[0], 7u);
    EXPECT_NO_THROW(c.validate());
}

TEST(DrawMultinomial, UniformTwoCellsBand)
{
    CellModel cells({0.5, 0.5});
    std::uint64_t const n = 1000000;
    auto c = draw_multinomial(cells, n, RngStream{9, 0});
    double band = 4 * std::sqrt(n / 4.0);
    EXPECT_NEAR(static_cast<double>(c.counts[0]), n / 2.0, band);
    EXPECT_EQ(c.counts[0] + c.counts[1], n);
}

TEST(DrawMultinomial, MeansMatch)
{
    auto cells = cells_from_generator(example_generator(), 5);
    std::uint64_t const n = 50;
    constexpr int reps = 10000;
    MultinomialSampler sampler(cells);
    std::vector<std::vector<std::uint64_t>> per_cell(5, std::vector<std::uint64_t>(reps));
    for (int r = 0; r < reps; ++r)
    {
        Rng rng(RngStream{11, static_cast<std::uint64_t>(r)});
        auto c = sampler.draw(n, rng);
        for (std::size_t j = 0; j < 5; ++j)
            per_cell[j][r] = c.counts[j];
    }
    for (std::size_t j = 0; j < 5; ++j)
    {
        double np = n * cells[j];
        double se = std::sqrt(np * (1 - cells[j]) / reps);
        EXPECT_NEAR(stats(per_cell[j]).mean, np, 5 * se);
    }
}

TEST(DrawMultinomial, Reproducible)
{
    auto cells = cells_from_generator(example_generator(), 100);
    auto a = draw_multinomial(cells, 300, RngStream{42, 7});
    auto b = draw_multinomial(cells, 300, RngStream{42, 7});
    auto c = draw_multinomial(cells, 300, RngStream{42, 8});
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_NE(a.counts, c.counts);
}

//---------------------------------------------------------------------------//
TEST(DrawCoupled, PrefixCoupling)
{
    CellModel cells({0.5, 0.3, 0.2});
    std::uint64_t const n = 5;
    int degenerate = 0;
    for (std::uint64_t r = 0; r < 20000; ++r)
    {
        auto cc = draw_coupled(cells, n, RngStream{13, r});
        auto const& nu = cc.multinomial;
        auto const& rho = cc.poissonized;
        ASSERT_NO_THROW(nu.validate());
        ASSERT_NO_THROW(rho.validate());
        std::uint64_t N = rho.realized_size;
        std::uint64_t dn = N > n ? N - n : n - N;
        std::uint64_t l1 = 0;
        for (std::size_t j = 0; j < 3; ++j)
        {
            l1 += nu.counts[j] > rho.counts[j] ? nu.counts[j] - rho.counts[j]
                                               : rho.counts[j] - nu.counts[j];
            // One is a prefix of the other
            if (N >= n)
                ASSERT_LE(nu.counts[j], rho.counts[j]);
            else
                ASSERT_GE(nu.counts[j], rho.counts[j]);
        }
        ASSERT_EQ(l1, dn);
        if (N == n)
        {
            ++degenerate;
            ASSERT_EQ(nu.counts, rho.counts);
        }
    }
    EXPECT_GT(degenerate, 0);
}

TEST(DrawCoupled, PoissonMarginals)
{
    auto cells = cells_from_generator(example_generator(), 4);
    std::uint64_t const n = 40;
    constexpr int reps = 10000;
    MultinomialSampler sampler(cells);
    std::vector<std::vector<std::uint64_t>> rho(4, std::vector<std::uint64_t>(reps));
    for (int r = 0; r < reps; ++r)
    {
        Rng rng(RngStream{17, static_cast<std::uint64_t>(r)});
        auto cc = sampler.draw_coupled(n, rng);
        for (std::size_t j = 0; j < 4; ++j)
            rho[j][r] = cc.poissonized.counts[j];
    }
    for (std::size_t j = 0; j < 4; ++j)
    {
        double lam = n * cells[j];
        auto s = stats(rho[j]);
        EXPECT_NEAR(s.mean, lam, 5 * std::sqrt(lam / reps));
        EXPECT_NEAR(s.var, lam, 5 * std::sqrt((lam + 2 * lam * lam) / reps));
    }
}

//---------------------------------------------------------------------------//
TEST(DrawPoissonizedGrouped, SingleGroup)
{
    GroupedModel g({1.0}, {0});
    constexpr int reps = 10000;
    std::vector<std::uint64_t> xs(reps);
    for (int r = 0; r < reps; ++r)
        xs[r] = draw_poissonized_grouped(g, 100, RngStream{19, std::uint64_t(r)}).counts[0];
    EXPECT_NEAR(stats(xs).mean, 100.0, 5 * std::sqrt(100.0 / reps));
}

TEST(DrawPoissonizedGrouped, ZeroProbabilityGivesZero)
{
    GroupedModel g({0.0, 1.0}, {0, 1});
    for (std::uint64_t r = 0; r < 100; ++r)
        EXPECT_EQ(draw_poissonized_grouped(g, 50, RngStream{0, r}).counts[0], 0u);
}

double ks_statistic(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0;
    std::uint64_t top = std::max(a.back(), b.back());
    for (std::uint64_t v = 0; v <= top; ++v)
    {
        double fa = double(std::upper_bound(a.begin(), a.end(), v) - a.begin()) / a.size();
        double fb = double(std::upper_bound(b.begin(), b.end(), v) - b.begin()) / b.size();
        d = std::max(d, std::fabs(fa - fb));
    }
    return d;
}

TEST(DrawPoissonizedGrouped, MatchesGroupedCoupledRho)
{
    auto cells = cells_from_generator(example_generator(), 20);
    auto scheme = GroupingScheme::make(20, 4);
    auto grouped = group_model(cells, scheme);
    std::uint64_t const n = 60;
    constexpr int reps = 10000;
    MultinomialSampler sampler(cells);
    for (std::size_t j : {0u, 3u})
    {
        std::vector<std::uint64_t> direct(reps), via(reps);
        for (int r = 0; r < reps; ++r)
        {
            direct[r] = draw_poissonized_grouped(grouped, n, RngStream{23, std::uint64_t(r)}).counts[j];
            Rng rng(RngStream{29, std::uint64_t(r)});
            via[r] = group_counts(sampler.draw_coupled(n, rng).poissonized, scheme).counts[j];
        }
        // Two-sample KS critical value at level 0.05
        EXPECT_LT(ks_statistic(direct, via), 1.358 * std::sqrt(2.0 / reps));
    }
}

//---------------------------------------------------------------------------//
TEST(GroupCounts, Examples)
{
    CountsVector c{CountsKind::multinomial, {1, 2, 3, 4}, 10, 10};
    auto g = group_counts(c, GroupingScheme::make(4, 2));
    EXPECT_EQ(g.counts, (std::vector<std::uint64_t>{3, 7}));
    EXPECT_EQ(g.kind, CountsKind::multinomial);
    EXPECT_EQ(g.realized_size, 10u);

    EXPECT_EQ(group_counts(c, GroupingScheme::make(4, 4)).counts, c.counts);
    EXPECT_THROW(group_counts(c, GroupingScheme::make(6, 2)), ConfigError);
    EXPECT_THROW(group_counts(c, GroupingScheme::make(4, 2, true)), ConfigError);
}

TEST(GroupCounts, PreservesTotal)
{
    auto cells = cells_from_generator(example_generator(), 60);
    for (std::uint64_t r = 0; r < 20; ++r)
    {
        auto c = draw_poissonized(cells, 200, RngStream{31, r});
        for (std::size_t m : {1, 2, 3, 5, 12, 60})
        {
            auto g = group_counts(c, GroupingScheme::make(60, m));
            EXPECT_EQ(std::accumulate(g.counts.begin(), g.counts.end(), std::uint64_t{0}),
                      c.realized_size);
        }
    }
}

TEST(GroupCounts, OrderedUsesModelPermutation)
{
    // Cells in a non-monotone order so the permutation matters
    CellModel cells({0.1, 0.4, 0.05, 0.25, 0.15, 0.05});
    auto scheme = GroupingScheme::make(6, 3, true);
    auto grouped = group_model(cells, scheme);
    std::uint64_t const n = 100;
    constexpr int reps = 10000;
    std::vector<double> mean(3);
    for (int r = 0; r < reps; ++r)
    {
        auto c = draw_multinomial(cells, n, RngStream{37, std::uint64_t(r)});
        auto g = group_counts(c, scheme, grouped.cell_order());
        for (std::size_t j = 0; j < 3; ++j)
            mean[j] += static_cast<double>(g.counts[j]) / reps;
    }
    for (std::size_t j = 0; j < 3; ++j)
    {
        double q = grouped.probabilities()[j];
        EXPECT_NEAR(mean[j], n * q, 5 * std::sqrt(n * q * (1 - q) / reps));
    }
}
}  // namespace
}  // namespace sdfest
