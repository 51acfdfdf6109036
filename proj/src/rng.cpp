#include "sdfest/rng.hpp"

#include <cmath>

#include "sdfest/error.hpp"

namespace sdfest
{
namespace
{
__extension__ typedef unsigned __int128 uint128;
}  // namespace

std::uint64_t Rng::below(std::uint64_t bound)
{
    // Lemire's nearly-divisionless multiply-shift with rejection
    uint128 product = static_cast<uint128>(engine_())
                                * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound)
    {
        std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold)
        {
            product = static_cast<uint128>(engine_()) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

std::uint64_t Rng::poisson(double mean)
{
    if (!(mean >= 0) || !std::isfinite(mean))
        throw NumericError("poisson mean must be finite and nonnegative");
    if (mean == 0)
        return 0;

    if (mean < 10)
    {
        double u = this->uniform();
        double term = std::exp(-mean);
        double cdf = term;
        std::uint64_t k = 0;
        while (u > cdf && term > 0)
        {
            ++k;
            term *= mean / static_cast<double>(k);
            cdf += term;
        }
        return k;
    }

    double const slam = std::sqrt(mean);
    double const loglam = std::log(mean);
    double const b = 0.931 + 2.53 * slam;
    double const a = -0.059 + 0.02483 * b;
    double const invalpha = 1.1239 + 1.1328 / (b - 3.4);
    double const vr = 0.9277 - 3.6224 / (b - 2);
    while (true)
    {
        double u = this->uniform() - 0.5;
        double v = this->uniform();
        double us = 0.5 - std::abs(u);
        double k = std::floor((2 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr)
            return static_cast<std::uint64_t>(k);
        if (k < 0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b)
            <= -mean + k * loglam - std::lgamma(k + 1))
        {
            return static_cast<std::uint64_t>(k);
        }
    }
}

AliasTable::AliasTable(std::span<double const> probabilities)
    : prob_(probabilities.size()), alias_(probabilities.size())
{
    std::size_t const n = probabilities.size();
    if (n == 0)
        throw ConfigError("alias table needs at least one category");

    double total = 0;
    for (double p : probabilities)
        total += p;

    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        scaled[i] = probabilities[i] * static_cast<double>(n) / total;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty())
    {
        std::size_t s = small.back();
        small.pop_back();
        std::size_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0)
        {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding
    for (std::size_t i : large)
    {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
    for (std::size_t i : small)
    {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
}
}  // namespace sdfest
