#include "sdfest/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sdfest/error.hpp"

namespace sdfest
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();

// Smallest positive argument used in place of u = 0, where densities may be
// undefined
double const tiny_u = std::nextafter(0.0, 1.0);

bool parse_double(std::string_view text, double& out)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.empty())
        return false;
    auto const* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}
}  // namespace

GeneratorAudit audit_generator(SmoothGenerator const& gen,
                               std::size_t grid_points)
{
    if (grid_points < 2)
        throw ConfigError("generator audit needs at least two grid points");

    GeneratorAudit audit;
    auto const n = static_cast<double>(grid_points);

    audit.normalized = std::abs(gen.cdf(1.0) - gen.cdf(0.0) - 1.0) <= 1e-12;
    if (!audit.normalized)
        audit.notes.emplace_back("G(1) - G(0) differs from 1");

    audit.monotone = true;
    double prev_cdf = gen.cdf(0.0);
    double prev_density = 0.0;
    audit.max_density = -inf;
    audit.min_density = inf;
    audit.max_slope = 0.0;
    for (std::size_t i = 1; i <= grid_points; ++i)
    {
        double u = static_cast<double>(i) / n;
        double value = gen.cdf(u);
        if (value < prev_cdf)
            audit.monotone = false;
        prev_cdf = value;

        double d = gen.density(u);
        audit.max_density = std::max(audit.max_density, d);
        audit.min_density = std::min(audit.min_density, d);
        if (i > 1)
            audit.max_slope = std::max(audit.max_slope,
                                       std::abs(d - prev_density) * n);
        prev_density = d;
    }
    if (!audit.monotone)
        audit.notes.emplace_back("G decreases somewhere on the audit grid");

    double const tau = gen.density_bound;
    audit.density_bound_ok = audit.max_density <= tau * (1 + 1e-12) + 1e-12;
    if (!audit.density_bound_ok)
        audit.notes.emplace_back("density exceeds the declared bound tau");

    double const slope = gen.density_slope_bound;
    audit.slope_bound_ok = audit.max_slope <= slope * (1 + 1e-9) + 1e-9;
    if (!audit.slope_bound_ok)
        audit.notes.emplace_back(
            "finite-difference slope of g exceeds the declared sup|g'|");

    audit.within_bound_hypotheses = gen.has_bounded_density()
                                    && audit.density_bound_ok;
    if (!gen.has_bounded_density())
        audit.notes.emplace_back(
            "unbounded density: outside the hypotheses of the MSE bounds");

    audit.density_bounded_away_from_zero = gen.density_floor > 0
                                           && audit.min_density > 0;
    if (!audit.density_bounded_away_from_zero)
        audit.notes.emplace_back("density is not bounded away from zero");
    return audit;
}

SmoothGenerator example_generator()
{
    SmoothGenerator gen;
    gen.name = "example";
    gen.cdf = [](double x) { return 2 * x - x * x; };
    gen.density = [](double x) { return 2 * (1 - x); };
    gen.density_bound = 2.0;
    gen.density_slope_bound = 2.0;
    gen.density_floor = 0.0;
    gen.limit_cdf = [](double x) { return std::clamp(0.5 * x, 0.0, 1.0); };
    return gen;
}

SmoothGenerator uniform_generator()
{
    SmoothGenerator gen;
    gen.name = "uniform";
    gen.cdf = [](double x) { return x; };
    gen.density = [](double) { return 1.0; };
    gen.density_bound = 1.0;
    gen.density_slope_bound = 0.0;
    gen.density_floor = 1.0;
    gen.limit_cdf = [](double x) { return x >= 1.0 ? 1.0 : 0.0; };
    return gen;
}

SmoothGenerator power_generator(double exponent)
{
    if (!(exponent > 0.0 && exponent <= 1.0))
        throw ConfigError("power generator exponent must lie in (0, 1]");
    if (exponent == 1.0)
    {
        auto gen = uniform_generator();
        gen.name = "power:1";
        return gen;
    }

    double const a = exponent;
    SmoothGenerator gen;
    std::ostringstream name;
    name << "power:" << a;
    gen.name = name.str();
    gen.cdf = [a](double x) { return x <= 0 ? 0.0 : std::pow(x, a); };
    gen.density = [a](double x) { return a * std::pow(x, a - 1); };
    gen.density_bound = inf;
    gen.density_slope_bound = inf;
    gen.density_floor = a;
    // g is decreasing, so {g <= x} = [(x/a)^(1/(a-1)), 1]
    gen.limit_cdf = [a](double x) {
        if (x < a)
            return 0.0;
        return 1.0 - std::pow(x / a, 1.0 / (a - 1.0));
    };
    return gen;
}

SmoothGenerator table_generator(std::vector<std::pair<double, double>> nodes,
                                std::string name)
{
    if (nodes.size() < 2)
        throw ConfigError("table generator needs at least two nodes");
    if (nodes.front().first != 0.0 || nodes.back().first != 1.0)
        throw ConfigError("table generator nodes must start at u=0 and end "
                          "at u=1");
    if (std::abs(nodes.front().second) > 1e-12
        || std::abs(nodes.back().second - 1.0) > 1e-12)
        throw NumericError("table generator must satisfy G(0)=0, G(1)=1");

    std::vector<double> slopes;
    for (std::size_t i = 1; i < nodes.size(); ++i)
    {
        double du = nodes[i].first - nodes[i - 1].first;
        double dg = nodes[i].second - nodes[i - 1].second;
        if (!(du > 0))
            throw ConfigError("table generator u values must be strictly "
                              "increasing");
        if (dg < 0)
            throw NumericError("table generator G is not monotone at u="
                               + std::to_string(nodes[i].first));
        slopes.push_back(dg / du);
    }

    std::vector<double> us, gs;
    for (auto const& [u, g] : nodes)
    {
        us.push_back(u);
        gs.push_back(g);
    }

    // Index of the segment (u_i, u_{i+1}] containing x
    auto segment = [us](double x) {
        auto it = std::lower_bound(us.begin() + 1, us.end(), x);
        if (it == us.end())
            --it;
        return static_cast<std::size_t>(it - us.begin()) - 1;
    };

    SmoothGenerator gen;
    gen.name = std::move(name);
    gen.cdf = [us, gs, slopes, segment](double x) {
        if (x <= 0)
            return 0.0;
        if (x >= 1)
            return 1.0;
        auto i = segment(x);
        return gs[i] + slopes[i] * (x - us[i]);
    };
    gen.density = [slopes, segment](double x) { return slopes[segment(x)]; };
    gen.density_bound = *std::max_element(slopes.begin(), slopes.end());
    gen.density_floor = *std::min_element(slopes.begin(), slopes.end());
    // A piecewise-constant density has jumps, hence no finite sup|g'|
    gen.density_slope_bound = gen.density_bound == gen.density_floor ? 0.0
                                                                      : inf;
    return gen;
}

SmoothGenerator load_table_generator(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError(path, "cannot open generator table");

    std::vector<std::pair<double, double>> nodes;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;
        auto comma = line.find(',');
        double u = 0, g = 0;
        bool ok = comma != std::string::npos
                  && parse_double(std::string_view(line).substr(0, comma), u)
                  && parse_double(std::string_view(line).substr(comma + 1), g);
        if (!ok)
        {
            if (!seen_data)
            {
                seen_data = true;  // header row
                continue;
            }
            throw ConfigError(path + ":" + std::to_string(line_no)
                              + ": expected 'u,G(u)'");
        }
        seen_data = true;
        nodes.emplace_back(u, g);
    }
    return table_generator(std::move(nodes), "table:" + path);
}

SmoothGenerator generator_by_name(std::string_view name)
{
    if (name == "example")
        return example_generator();
    if (name == "uniform")
        return uniform_generator();
    if (name.starts_with("power:"))
    {
        double a = 0;
        if (!parse_double(name.substr(6), a))
            throw ConfigError("bad power generator exponent in '"
                              + std::string(name) + "'");
        return power_generator(a);
    }
    if (name.starts_with("table:"))
        return load_table_generator(std::string(name.substr(6)));
    throw ConfigError("unknown generator '" + std::string(name)
                      + "' (expected example, uniform, power:<a> or "
                        "table:<path>)");
}

CellModel cells_from_generator(SmoothGenerator const& gen,
                               std::size_t num_cells)
{
    if (num_cells < 1)
        throw ConfigError("number of cells must be at least 1");

    auto const m = static_cast<double>(num_cells);
    std::vector<double> p(num_cells);
    double prev = gen.cdf(0.0);
    for (std::size_t j = 1; j <= num_cells; ++j)
    {
        double next = gen.cdf(static_cast<double>(j) / m);
        p[j - 1] = next - prev;
        if (p[j - 1] < 0)
            throw NumericError("generator G is not monotone: p_"
                               + std::to_string(j) + " < 0");
        prev = next;
    }
    return CellModel(std::move(p));
}

LimitSdf::LimitSdf(SmoothGenerator const& gen, std::size_t grid_points)
{
    if (gen.limit_cdf)
    {
        closed_form_ = gen.limit_cdf;
        return;
    }
    if (grid_points < 1)
        throw ConfigError("limit sdf grid needs at least one cell");
    density_ = gen.density;
    grid_values_.resize(grid_points + 1);
    auto const n = static_cast<double>(grid_points);
    grid_values_[0] = density_(tiny_u);
    for (std::size_t i = 1; i <= grid_points; ++i)
        grid_values_[i] = density_(static_cast<double>(i) / n);
}

double LimitSdf::operator()(double x) const
{
    if (closed_form_)
        return closed_form_(x);

    std::size_t const cells = grid_values_.size() - 1;
    auto const n = static_cast<double>(cells);
    double const h = 1.0 / n;
    double measure = 0.0;
    for (std::size_t i = 1; i <= cells; ++i)
    {
        double a = grid_values_[i - 1];
        double b = grid_values_[i];
        bool a_in = a <= x;
        bool b_in = b <= x;
        if (a_in && b_in)
        {
            measure += h;
            continue;
        }
        if (!a_in && !b_in)
            continue;

        // Single crossing: bisect for the level-x point
        double lo = i == 1 ? tiny_u : static_cast<double>(i - 1) / n;
        double hi = static_cast<double>(i) / n;
        double const left = lo;
        double const right = hi;
        for (int it = 0; it < 60 && hi - lo > 1e-16; ++it)
        {
            double mid = 0.5 * (lo + hi);
            if ((density_(mid) <= x) == a_in)
                lo = mid;
            else
                hi = mid;
        }
        double cross = 0.5 * (lo + hi);
        measure += a_in ? cross - (i == 1 ? 0.0 : left) : right - cross;
    }
    return std::clamp(measure, 0.0, 1.0);
}

LimitSdf limit_sdf(SmoothGenerator const& gen, std::size_t grid_points)
{
    return LimitSdf(gen, grid_points);
}

StepDensity::StepDensity(std::span<double const> probabilities)
{
    if (probabilities.empty())
        throw ConfigError("step density needs at least one block");
    auto const k = static_cast<double>(probabilities.size());
    heights_.reserve(probabilities.size());
    for (double p : probabilities)
        heights_.push_back(k * p);
}

double StepDensity::operator()(double t) const
{
    auto const k = static_cast<double>(heights_.size());
    double block = std::ceil(t * k) - 1;
    block = std::clamp(block, 0.0, k - 1);
    return heights_[static_cast<std::size_t>(block)];
}

double StepDensity::sup_deviation(std::function<double(double)> const& density,
                                  std::size_t samples_per_block) const
{
    auto const k = static_cast<double>(heights_.size());
    auto const s = static_cast<double>(std::max<std::size_t>(samples_per_block, 1));
    double sup = 0.0;
    for (std::size_t j = 0; j < heights_.size(); ++j)
    {
        for (std::size_t i = 0; i <= samples_per_block; ++i)
        {
            double u = (static_cast<double>(j) + static_cast<double>(i) / s) / k;
            if (u <= 0)
                u = tiny_u;
            sup = std::max(sup, std::abs(heights_[j] - density(u)));
        }
    }
    return sup;
}

StepDensity step_density(CellModel const& cells)
{
    return StepDensity(cells.probabilities());
}

StepDensity step_density(GroupedModel const& grouped)
{
    return StepDensity(grouped.probabilities());
}
}  // namespace sdfest
