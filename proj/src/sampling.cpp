#include "sdfest/sampling.hpp"

#include <numeric>
#include <string>

#include "sdfest/error.hpp"

namespace sdfest
{
char const* to_string(CountsKind kind)
{
    switch (kind)
    {
        case CountsKind::multinomial:
            return "multinomial";
        case CountsKind::poissonized:
            return "poissonized";
    }
    return "?";
}

void CountsVector::validate() const
{
    if (counts.empty())
        throw ConfigError("counts vector is empty");
    std::uint64_t total = std::accumulate(counts.begin(), counts.end(),
                                          std::uint64_t{0});
    if (total != realized_size)
    {
        throw NumericError("counts sum to " + std::to_string(total)
                           + " but the realised sample size is "
                           + std::to_string(realized_size));
    }
    if (kind == CountsKind::multinomial && realized_size != nominal_size)
        throw NumericError("multinomial counts must sum to n");
}

MultinomialSampler::MultinomialSampler(CellModel const& cells)
    : table_(cells.probabilities())
{
}

void MultinomialSampler::accumulate(std::uint64_t draws,
                                    Rng& rng,
                                    std::vector<std::uint64_t>& counts) const
{
    for (std::uint64_t i = 0; i < draws; ++i)
        ++counts[table_.sample(rng)];
}

CountsVector MultinomialSampler::draw(std::uint64_t n, Rng& rng) const
{
    CountsVector result;
    result.kind = CountsKind::multinomial;
    result.counts.assign(table_.size(), 0);
    result.nominal_size = n;
    result.realized_size = n;
    accumulate(n, rng, result.counts);
    return result;
}

CoupledCounts MultinomialSampler::draw_coupled(std::uint64_t n, Rng& rng) const
{
    std::uint64_t const big_n = rng.poisson(static_cast<double>(n));
    std::uint64_t const common = std::min(n, big_n);

    CoupledCounts out;
    auto& nu = out.multinomial;
    auto& rho = out.poissonized;
    nu.kind = CountsKind::multinomial;
    nu.nominal_size = n;
    nu.realized_size = n;
    rho.kind = CountsKind::poissonized;
    rho.nominal_size = n;
    rho.realized_size = big_n;

    nu.counts.assign(table_.size(), 0);
    accumulate(common, rng, nu.counts);
    rho.counts = nu.counts;
    // The tail of the longer prefix
    accumulate(std::max(n, big_n) - common, rng,
               big_n > n ? rho.counts : nu.counts);
    return out;
}

CountsVector draw_multinomial(CellModel const& cells,
                              std::uint64_t n,
                              RngStream stream)
{
    Rng rng(stream);
    return MultinomialSampler(cells).draw(n, rng);
}

CoupledCounts draw_coupled(CellModel const& cells,
                           std::uint64_t n,
                           RngStream stream)
{
    Rng rng(stream);
    return MultinomialSampler(cells).draw_coupled(n, rng);
}

namespace
{
CountsVector independent_poisson(std::span<double const> probabilities,
                                 std::uint64_t n,
                                 Rng& rng)
{
    CountsVector result;
    result.kind = CountsKind::poissonized;
    result.nominal_size = n;
    result.counts.resize(probabilities.size());
    std::uint64_t total = 0;
    auto const mean = static_cast<double>(n);
    for (std::size_t j = 0; j < probabilities.size(); ++j)
    {
        result.counts[j] = rng.poisson(mean * probabilities[j]);
        total += result.counts[j];
    }
    result.realized_size = total;
    return result;
}
}  // namespace

CountsVector draw_poissonized(CellModel const& cells,
                              std::uint64_t n,
                              RngStream stream)
{
    Rng rng(stream);
    return independent_poisson(cells.probabilities(), n, rng);
}

CountsVector draw_poissonized_grouped(GroupedModel const& grouped,
                                      std::uint64_t n,
                                      Rng& rng)
{
    return independent_poisson(grouped.probabilities(), n, rng);
}

CountsVector draw_poissonized_grouped(GroupedModel const& grouped,
                                      std::uint64_t n,
                                      RngStream stream)
{
    Rng rng(stream);
    return draw_poissonized_grouped(grouped, n, rng);
}

CountsVector group_counts(CountsVector const& counts,
                          GroupingScheme const& scheme,
                          std::span<std::size_t const> cell_order)
{
    scheme.validate();
    if (counts.counts.size() != scheme.num_cells)
    {
        throw ConfigError("counts vector has length "
                          + std::to_string(counts.counts.size())
                          + " but the scheme expects M="
                          + std::to_string(scheme.num_cells));
    }
    if (scheme.ordered && cell_order.size() != scheme.num_cells)
    {
        throw ConfigError("ordered grouping needs the cell permutation of "
                          "the grouped model");
    }

    CountsVector result;
    result.kind = counts.kind;
    result.nominal_size = counts.nominal_size;
    result.realized_size = counts.realized_size;
    result.counts.assign(scheme.num_groups, 0);
    bool const permuted = !cell_order.empty();
    for (std::size_t i = 0; i < scheme.num_cells; ++i)
    {
        std::size_t cell = permuted ? cell_order[i] : i;
        result.counts[i / scheme.group_size] += counts.counts[cell];
    }
    return result;
}
}  // namespace sdfest
