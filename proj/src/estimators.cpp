#include "sdfest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdfest/error.hpp"

namespace sdfest
{
char const* to_string(EstimatorKind kind)
{
    switch (kind)
    {
        case EstimatorKind::natural:
            return "natural";
        case EstimatorKind::grouped:
            return "grouped";
    }
    return "?";
}

double lattice_location(std::uint64_t count,
                        std::uint64_t groups,
                        std::uint64_t n)
{
    if (groups != 0 && count > std::numeric_limits<std::uint64_t>::max() / groups)
    {
        return static_cast<double>(static_cast<long double>(count) * groups
                                   / n);
    }
    return static_cast<double>(count * groups) / static_cast<double>(n);
}

EstimatorOutput scaled_count_estimator(CountsVector const& counts,
                                       std::uint64_t n,
                                       EstimatorKind kind)
{
    if (n == 0)
        throw ConfigError("sample size n must be positive");
    if (counts.counts.empty())
        throw ConfigError("estimator needs at least one count");

    std::uint64_t const groups = counts.counts.size();
    std::vector<std::uint64_t> sorted = counts.counts;
    std::sort(sorted.begin(), sorted.end());

    std::vector<std::uint64_t> distinct;
    std::vector<std::uint64_t> multiplicity;
    for (auto c : sorted)
    {
        if (!distinct.empty() && distinct.back() == c)
            ++multiplicity.back();
        else
        {
            distinct.push_back(c);
            multiplicity.push_back(1);
        }
    }
    std::vector<double> locations(distinct.size());
    for (std::size_t i = 0; i < distinct.size(); ++i)
        locations[i] = lattice_location(distinct[i], groups, n);

    return EstimatorOutput{
        StepCdf::from_multiplicities(locations, multiplicity),
        static_cast<double>(groups) / static_cast<double>(n),
        kind,
        counts.kind,
        groups,
        n,
        counts.counts,
        std::move(distinct),
    };
}

EstimatorOutput natural_estimator(CountsVector const& counts,
                                  std::uint64_t num_cells,
                                  std::uint64_t n)
{
    if (counts.counts.size() != num_cells)
    {
        throw ConfigError("natural estimator expects " + std::to_string(num_cells)
                          + " counts, got "
                          + std::to_string(counts.counts.size()));
    }
    return scaled_count_estimator(counts, n, EstimatorKind::natural);
}

EstimatorOutput grouped_estimator(CountsVector const& counts,
                                  GroupingScheme const& scheme,
                                  std::uint64_t n,
                                  std::span<std::size_t const> cell_order)
{
    auto grouped = group_counts(counts, scheme, cell_order);
    return scaled_count_estimator(grouped, n, EstimatorKind::grouped);
}

double scaled_count_fraction(std::span<std::uint64_t const> group_counts,
                             std::uint64_t n,
                             double x)
{
    std::uint64_t const groups = group_counts.size();
    std::uint64_t below = 0;
    for (auto c : group_counts)
        below += lattice_location(c, groups, n) <= x;
    return static_cast<double>(below) / static_cast<double>(groups);
}

RegimeDiagnostics check_regime(std::uint64_t num_cells,
                               std::uint64_t n,
                               std::uint64_t num_groups,
                               double alpha,
                               double threshold)
{
    if (num_cells == 0 || n == 0 || num_groups == 0)
        throw ConfigError("M, n and m must be positive");
    if (!(alpha > 0 && alpha < 1.0 / 6.0))
        throw ConfigError("alpha must lie in (0, 1/6)");

    RegimeDiagnostics d;
    d.alpha = alpha;
    d.threshold = threshold;
    auto const nn = static_cast<double>(n);
    auto const m = static_cast<double>(num_groups);
    d.lambda_hat = nn / static_cast<double>(num_cells);

    double const log_m = std::log(m);
    if (num_groups == 1)
    {
        d.consistency_ratio = std::numeric_limits<double>::infinity();
        d.rate_ratio = std::numeric_limits<double>::infinity();
        d.notes.emplace_back("m = 1: log m = 0, ratios reported as +inf");
    }
    else
    {
        d.consistency_ratio = nn / (m * log_m);
        d.rate_ratio = nn / (m * std::pow(log_m, 1.0 / (2.0 * alpha)));
    }
    d.in_regime = d.consistency_ratio > threshold;
    d.in_rate_regime = d.rate_ratio > threshold;
    d.natural_regime = num_groups == num_cells;
    if (d.natural_regime)
    {
        d.notes.emplace_back("natural estimator regime (k = 1): excluded by "
                             "the grouping consistency condition; the "
                             "estimator converges to the Poisson mixture "
                             "limit instead of F");
    }
    d.notes.emplace_back("diagnostic only: the regime conditions are "
                         "asymptotic and admit no finite-n verdict");
    return d;
}
}  // namespace sdfest
