#include "sdfest/step_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdfest/error.hpp"
#include "sdfest/numeric.hpp"

namespace sdfest
{
StepCdf::StepCdf(std::vector<Jump> jumps) : jumps_(std::move(jumps))
{
    if (jumps_.empty())
        throw ConfigError("step cdf needs at least one jump");

    std::vector<double> masses;
    masses.reserve(jumps_.size());
    for (std::size_t i = 0; i < jumps_.size(); ++i)
    {
        auto const& j = jumps_[i];
        if (!std::isfinite(j.location))
            throw NumericError("step cdf jump location is not finite");
        if (!(j.mass > 0.0))
            throw NumericError("step cdf jump mass must be positive");
        if (i > 0 && !(jumps_[i - 1].location < j.location))
            throw NumericError(
                "step cdf jump locations must be strictly increasing");
        masses.push_back(j.mass);
    }
    double total = compensated_sum(masses);
    if (std::abs(total - 1.0) > probability_sum_tolerance)
        throw NumericError("step cdf masses sum to " + std::to_string(total)
                           + ", expected 1");

    cumulative_.resize(jumps_.size());
    double running = 0.0;
    for (std::size_t i = 0; i < jumps_.size(); ++i)
    {
        running += jumps_[i].mass;
        cumulative_[i] = std::min(running, 1.0);
    }
    cumulative_.back() = 1.0;
}

StepCdf StepCdf::from_sample(std::span<double const> values)
{
    if (values.empty())
        throw ConfigError("step cdf needs a nonempty sample");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> locations;
    std::vector<std::uint64_t> counts;
    for (double v : sorted)
    {
        if (!locations.empty() && locations.back() == v)
            ++counts.back();
        else
        {
            locations.push_back(v);
            counts.push_back(1);
        }
    }
    return from_multiplicities(locations, counts);
}

StepCdf StepCdf::from_multiplicities(std::span<double const> locations,
                                     std::span<std::uint64_t const> counts)
{
    if (locations.size() != counts.size() || locations.empty())
        throw ConfigError("locations and multiplicities must have equal, "
                          "nonzero length");

    std::uint64_t total = 0;
    for (auto c : counts)
    {
        if (c == 0)
            throw NumericError("zero multiplicity in step cdf");
        total += c;
    }

    StepCdf result;
    result.jumps_.reserve(locations.size());
    result.cumulative_.reserve(locations.size());
    auto const denom = static_cast<double>(total);
    std::uint64_t running = 0;
    for (std::size_t i = 0; i < locations.size(); ++i)
    {
        if (!std::isfinite(locations[i]))
            throw NumericError("step cdf jump location is not finite");
        if (i > 0 && !(locations[i - 1] < locations[i]))
            throw NumericError(
                "step cdf jump locations must be strictly increasing");
        running += counts[i];
        result.jumps_.push_back(
            {locations[i], static_cast<double>(counts[i]) / denom});
        result.cumulative_.push_back(static_cast<double>(running) / denom);
    }
    return result;
}

double StepCdf::operator()(double x) const
{
    auto it = std::upper_bound(
        jumps_.begin(), jumps_.end(), x,
        [](double value, Jump const& j) { return value < j.location; });
    if (it == jumps_.begin())
        return 0.0;
    return cumulative_[static_cast<std::size_t>(it - jumps_.begin()) - 1];
}

double StepCdf::left_limit(double x) const
{
    auto it = std::lower_bound(
        jumps_.begin(), jumps_.end(), x,
        [](Jump const& j, double value) { return j.location < value; });
    if (it == jumps_.begin())
        return 0.0;
    return cumulative_[static_cast<std::size_t>(it - jumps_.begin()) - 1];
}

double sup_distance(StepCdf const& a, StepCdf const& b)
{
    // Both functions are constant on [x_i, x_{i+1}) of the merged grid and
    // vanish left of it, so the right values at the merged locations suffice;
    // left limits are included anyway.
    std::vector<double> grid;
    grid.reserve(a.size() + b.size());
    for (auto const& j : a.jumps())
        grid.push_back(j.location);
    for (auto const& j : b.jumps())
        grid.push_back(j.location);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double sup = 0.0;
    for (double x : grid)
    {
        sup = std::max(sup, std::abs(a(x) - b(x)));
        sup = std::max(sup, std::abs(a.left_limit(x) - b.left_limit(x)));
    }
    return sup;
}

double sup_distance(StepCdf const& a,
                    std::function<double(double)> const& continuous_cdf)
{
    auto jumps = a.jumps();
    auto cumulative = a.cumulative();

    // Left of the first jump a = 0 and F rises to F(x_0)
    double sup = continuous_cdf(jumps.front().location);
    for (std::size_t i = 0; i < jumps.size(); ++i)
    {
        double value = cumulative[i];
        sup = std::max(sup,
                       std::abs(value - continuous_cdf(jumps[i].location)));
        if (i + 1 < jumps.size())
        {
            sup = std::max(
                sup, std::abs(value - continuous_cdf(jumps[i + 1].location)));
        }
    }
    // Right of the last jump a = 1 and F only climbs towards 1, which the
    // last loop iteration already covers
    return sup;
}
}  // namespace sdfest
