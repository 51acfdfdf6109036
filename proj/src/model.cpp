#include "sdfest/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sdfest/error.hpp"
#include "sdfest/numeric.hpp"

namespace sdfest
{
namespace
{
void check_probability_vector(std::span<double const> p, char const* what)
{
    if (p.empty())
        throw ConfigError(std::string(what) + " must have at least one cell");
    for (std::size_t j = 0; j < p.size(); ++j)
    {
        if (!(p[j] >= 0.0) || !std::isfinite(p[j]))
        {
            throw NumericError(std::string(what) + " entry "
                               + std::to_string(j + 1)
                               + " is negative or not finite");
        }
    }
    double total = compensated_sum(p);
    if (std::abs(total - 1.0) > probability_sum_tolerance)
    {
        throw NumericError(std::string(what) + " sums to "
                           + std::to_string(total) + ", expected 1");
    }
}

constexpr double merge_tolerance = 1e-12;

StepCdf scaled_empirical_cdf(std::span<double const> p)
{
    auto const scale = static_cast<double>(p.size());
    std::vector<double> values(p.size());
    std::transform(p.begin(), p.end(), values.begin(),
                   [scale](double v) { return scale * v; });
    // Summation noise would otherwise split equal probabilities into
    // separate jumps a few ulps apart
    std::sort(values.begin(), values.end());
    for (std::size_t i = 1; i < values.size(); ++i)
    {
        if (values[i] - values[i - 1]
            <= merge_tolerance * std::max(1.0, std::fabs(values[i])))
        {
            values[i] = values[i - 1];
        }
    }
    return StepCdf::from_sample(values);
}
}  // namespace

CellModel::CellModel(std::vector<double> probabilities)
    : p_(std::move(probabilities))
{
    check_probability_vector(p_, "cell probability vector");
}

GroupingScheme GroupingScheme::make(std::size_t num_cells,
                                    std::size_t num_groups,
                                    bool ordered)
{
    GroupingScheme s;
    s.num_cells = num_cells;
    s.num_groups = num_groups;
    s.group_size = num_groups == 0 ? 0 : num_cells / num_groups;
    s.ordered = ordered;
    s.validate();
    return s;
}

void GroupingScheme::validate() const
{
    if (num_groups < 1 || num_groups > num_cells)
    {
        throw ConfigError("number of groups m=" + std::to_string(num_groups)
                          + " must satisfy 1 <= m <= M="
                          + std::to_string(num_cells));
    }
    if (group_size * num_groups != num_cells)
    {
        throw ConfigError("M=" + std::to_string(num_cells)
                          + " is not m*k for m=" + std::to_string(num_groups)
                          + ", k=" + std::to_string(group_size));
    }
}

GroupedModel::GroupedModel(std::vector<double> q,
                           std::vector<std::size_t> cell_order)
    : q_(std::move(q)), order_(std::move(cell_order))
{
    check_probability_vector(q_, "grouped probability vector");
    if (!order_.empty() && order_.size() % q_.size() != 0)
        throw ConfigError("cell order length is not a multiple of m");
}

std::vector<std::size_t> ascending_order(std::span<double const> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return values[a] < values[b];
                     });
    return order;
}

StepCdf structural_cdf(CellModel const& cells)
{
    return scaled_empirical_cdf(cells.probabilities());
}

GroupedModel group_model(CellModel const& cells, GroupingScheme const& scheme)
{
    scheme.validate();
    if (scheme.num_cells != cells.num_cells())
    {
        throw ConfigError("grouping scheme has M="
                          + std::to_string(scheme.num_cells)
                          + " but the model has "
                          + std::to_string(cells.num_cells()) + " cells");
    }

    std::vector<std::size_t> order;
    if (scheme.ordered)
        order = ascending_order(cells.probabilities());
    else
    {
        order.resize(cells.num_cells());
        std::iota(order.begin(), order.end(), std::size_t{0});
    }

    std::vector<double> q(scheme.num_groups, 0.0);
    for (std::size_t g = 0; g < scheme.num_groups; ++g)
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < scheme.group_size; ++i)
            sum += cells[order[g * scheme.group_size + i]];
        q[g] = sum;
    }
    return GroupedModel(std::move(q), std::move(order));
}

StepCdf grouped_structural_cdf(GroupedModel const& grouped)
{
    return scaled_empirical_cdf(grouped.probabilities());
}
}  // namespace sdfest
