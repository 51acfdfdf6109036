#include "sdfest/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "sdfest/error.hpp"
#include "sdfest/quadrature.hpp"

namespace sdfest
{
namespace
{
using std::numbers::pi;
using cdouble = std::complex<double>;

constexpr double char_tolerance = 1e-8;
constexpr double cdf_tolerance = 1e-6;

// e^{i x} - 1 without cancellation in the real part
cdouble expi_minus_one(double x)
{
    double s = std::sin(0.5 * x);
    return {-2.0 * s * s, std::sin(x)};
}

cdouble phi_from_probabilities(double t,
                               std::span<double const> probabilities,
                               std::uint64_t n)
{
    if (n == 0)
        throw ConfigError("sample size n must be positive");
    auto const groups = static_cast<double>(probabilities.size());
    double const ratio = groups / static_cast<double>(n);  // m/n
    cdouble const w = expi_minus_one(t * ratio);
    cdouble sum = 0.0;
    for (double q : probabilities)
    {
        double z = groups * q;
        sum += std::exp((z / ratio) * w);
    }
    return sum / groups;
}

double poisson_cdf(std::uint64_t k, double mean)
{
    if (mean <= 0)
        return 1.0;
    return boost::math::gamma_q(static_cast<double>(k) + 1.0, mean);
}
}  // namespace

void BoundParams::validate() const
{
    if (!(lambda > 0))
        throw ConfigError("lambda must be positive");
    if (!(tau > 0) || !std::isfinite(tau))
        throw ConfigError("tau must be positive and finite");
    if (!(c > 0) || !std::isfinite(c))
        throw ConfigError("c must be positive and finite");
    if (!(alpha > 0 && alpha < 1.0 / 6.0))
        throw ConfigError("alpha must lie in (0, 1/6)");
}

BoundParams BoundParams::for_generator(SmoothGenerator const& gen,
                                       double lambda,
                                       double alpha)
{
    if (!gen.has_bounded_density()
        || !std::isfinite(gen.density_slope_bound))
    {
        throw ConfigError("generator '" + gen.name
                          + "' is outside the bound hypotheses (unbounded "
                            "density or density slope)");
    }
    BoundParams p;
    p.lambda = lambda;
    p.tau = gen.density_bound;
    double s = gen.density_slope_bound;
    // A constant density gives f_m = g exactly; any c > 0 is valid then
    p.c = s > 0 ? s * s / 12.0 : std::numeric_limits<double>::min();
    p.alpha = alpha;
    p.validate();
    return p;
}

LimitLaw natural_limit_law(SmoothGenerator const& gen, double lambda)
{
    if (!(lambda > 0))
        throw ConfigError("lambda must be positive");
    std::ostringstream desc;
    desc << "Z = g(U), U ~ Uniform(0,1], g from generator '" << gen.name
         << "'; Y | Z=z ~ Poisson(" << lambda
         << " z), degenerate at 0 when z = 0; natural estimator -> "
            "F_{Y/lambda}";
    auto F = std::make_shared<LimitSdf>(gen);
    return LimitLaw{
        lambda,
        [F](double x) { return (*F)(x); },
        [gen, lambda](double x) { return poisson_mixture_cdf(x, gen, lambda); },
        desc.str(),
    };
}

cdouble phi_m(double t, GroupedModel const& grouped, std::uint64_t n)
{
    return phi_from_probabilities(t, grouped.probabilities(), n);
}

cdouble phi_m(double t, CellModel const& cells, std::uint64_t n)
{
    return phi_from_probabilities(t, cells.probabilities(), n);
}

cdouble limit_char_natural(double t, SmoothGenerator const& gen, double lambda)
{
    if (!(lambda > 0))
        throw ConfigError("lambda must be positive");
    cdouble const w = lambda * expi_minus_one(t / lambda);
    return integrate(
        [&](double u) -> cdouble { return std::exp(gen.density(u) * w); },
        0.0, 1.0, char_tolerance);
}

cdouble limit_char(double t, SmoothGenerator const& gen)
{
    return integrate(
        [&](double u) -> cdouble {
            double a = t * gen.density(u);
            return {std::cos(a), std::sin(a)};
        },
        0.0, 1.0, char_tolerance);
}

double poisson_mixture_cdf(double x, SmoothGenerator const& gen, double lambda)
{
    if (!(lambda > 0))
        throw ConfigError("lambda must be positive");
    if (std::isnan(x))
        throw ConfigError("x is NaN");
    if (x < 0)
        return 0.0;
    double scaled = lambda * x;
    if (scaled > 1e15)
        return 1.0;
    scaled += 1e-9 * std::max(1.0, scaled);
    auto const k = static_cast<std::uint64_t>(std::floor(scaled));
    double value = integrate(
        [&](double u) { return poisson_cdf(k, lambda * gen.density(u)); },
        0.0, 1.0, cdf_tolerance);
    return std::clamp(value, 0.0, 1.0);
}

double l2_density_gap(SmoothGenerator const& gen, std::size_t num_groups)
{
    auto cells = cells_from_generator(gen, num_groups);
    auto const m = static_cast<double>(num_groups);
    double total = 0.0;
    for (std::size_t j = 0; j < num_groups; ++j)
    {
        double height = m * cells[j];
        double a = static_cast<double>(j) / m;
        double b = static_cast<double>(j + 1) / m;
        total += integrate(
            [&](double u) {
                double d = height - gen.density(u);
                return d * d;
            },
            a, b, 1e-14 / m);
    }
    return total;
}

double esseen_bias_bound(std::uint64_t m,
                         std::uint64_t n,
                         double smoothing_T,
                         BoundParams const& params)
{
    params.validate();
    if (!(smoothing_T > 0))
        throw ConfigError("smoothing parameter T must be positive");
    double const r = static_cast<double>(m) / static_cast<double>(n);
    double const T = smoothing_T;
    double const mm = static_cast<double>(m);
    return 4.0 / (9.0 * pi) * r * r * T * T * T
           + 1.0 / (2.0 * pi) * r * T * T
           + params.c / (2.0 * pi) * T * T / (mm * mm)
           + 24.0 * params.tau / (pi * T);
}

double leading_bias_bound(std::uint64_t m,
                          std::uint64_t n,
                          BoundParams const& params)
{
    params.validate();
    double const r = static_cast<double>(m) / static_cast<double>(n);
    return 3.0 / (2.0 * pi) * std::pow(24.0 * params.tau, 2.0 / 3.0)
           * std::cbrt(r);
}

namespace
{
bool large_m_branch(std::uint64_t m, std::uint64_t n)
{
    // m >= n^{1/3} checked as m^3 >= n to stay exact on integers
    long double mm = static_cast<long double>(m);
    return mm * mm * mm >= static_cast<long double>(n);
}
}  // namespace

double optimal_T(std::uint64_t m, std::uint64_t n, BoundParams const& params)
{
    params.validate();
    double const scale = std::cbrt(24.0 * params.tau);
    if (large_m_branch(m, n))
        return scale * std::cbrt(static_cast<double>(n) / static_cast<double>(m));
    return scale / std::cbrt(params.c)
           * std::pow(static_cast<double>(m), 2.0 / 3.0);
}

double mse_bound(std::uint64_t m,
                 std::uint64_t n,
                 BoundParams const& params,
                 MseRegime regime)
{
    params.validate();
    if (m == 0 || n == 0)
        throw ConfigError("m and n must be positive");
    double const variance_term = 1.0 / (4.0 * static_cast<double>(m));
    bool large = regime == MseRegime::large_m
                 || (regime == MseRegime::automatic && large_m_branch(m, n));
    if (!large)
        return variance_term;
    double const r = static_cast<double>(m) / static_cast<double>(n);
    return 9.0 / (4.0 * pi * pi) * std::pow(24.0 * params.tau, 4.0 / 3.0)
               * std::pow(r, 2.0 / 3.0)
           + variance_term;
}

OptimalGroups optimal_m(std::uint64_t n, BoundParams const& params)
{
    params.validate();
    auto const nn = static_cast<double>(n);
    double const k24 = 24.0 * params.tau;
    OptimalGroups out;
    out.m = std::pow(std::pow(pi, 6) / (216.0 * std::pow(k24, 4)), 0.2)
            * std::pow(nn, 0.4);
    out.stated_bound = 33.0 / 4.0
                       * std::pow(k24 * k24 / (6.0 * std::pow(pi, 3)), 0.4)
                       * std::pow(nn, -0.4);
    out.plugged_bound = 9.0 / (4.0 * pi * pi) * std::pow(k24, 4.0 / 3.0)
                            * std::pow(out.m / nn, 2.0 / 3.0)
                        + 1.0 / (4.0 * out.m);
    out.below_threshold = out.m < std::cbrt(nn);
    return out;
}

namespace
{
// Smallest minimizer of a convex sequence f on [lo, hi]
template<class F>
std::uint64_t convex_argmin(std::uint64_t lo, std::uint64_t hi, F&& f)
{
    while (hi - lo > 2)
    {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (f(mid) <= f(mid + 1))
            hi = mid;
        else
            lo = mid + 1;
    }
    std::uint64_t best = lo;
    for (std::uint64_t m = lo + 1; m <= hi; ++m)
        if (f(m) < f(best))
            best = m;
    return best;
}
}  // namespace

std::uint64_t integer_argmin_mse_bound(std::uint64_t n,
                                       BoundParams const& params,
                                       MseRegime regime)
{
    params.validate();
    if (n == 0)
        throw ConfigError("sample size n must be positive");
    auto f = [&](std::uint64_t m) { return mse_bound(m, n, params, regime); };
    if (regime != MseRegime::automatic)
        return convex_argmin(1, n, f);

    // 1/(4m) decreases up to the last m with m^3 < n; the large-m branch is
    // convex above it
    auto last_small = static_cast<std::uint64_t>(
        std::cbrt(static_cast<double>(n)));
    while (last_small > 0 && large_m_branch(last_small, n))
        --last_small;
    while (!large_m_branch(last_small + 1, n))
        ++last_small;
    std::uint64_t best = last_small > 0 ? last_small : 1;
    if (last_small < n)
    {
        std::uint64_t large = convex_argmin(last_small + 1, n, f);
        if (last_small == 0 || f(large) < f(best))
            best = large;
    }
    return best;
}

double bernstein_poisson_tail(double mean, double epsilon)
{
    if (!(mean > 0) || !(epsilon > 0))
        throw ConfigError("mean and epsilon must be positive");
    double value = 2.0
                   * std::exp(-epsilon * epsilon
                              / (2.0 + epsilon / std::sqrt(mean)));
    return std::min(value, 1.0);
}

double poissonization_union_bound(GroupedModel const& grouped,
                                  std::uint64_t n,
                                  double delta)
{
    if (!(delta > 0))
        throw ConfigError("delta must be positive");
    if (n == 0)
        throw ConfigError("sample size n must be positive");
    auto q = grouped.probabilities();
    auto const m = static_cast<double>(q.size());
    double c = m * *std::max_element(q.begin(), q.end());
    return 2.0 * m
           * std::exp(-delta * delta * (static_cast<double>(n) / m)
                      / (2.0 * c + delta));
}
}  // namespace sdfest
