#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "model.hpp"

namespace sdfest
{
//---------------------------------------------------------------------------//
/*!
 * Smooth generating distribution G on [0, 1] with density g on (0, 1].
 *
 * Cell probabilities are generated as p_j = G(j/M) - G((j-1)/M). The bound
 * constants are user supplied and audited numerically by audit_generator:
 * \c density_bound is tau = sup g, \c density_slope_bound is sup |g'| and
 * \c density_floor is inf g.
 */
struct SmoothGenerator
{
    std::string name;
    std::function<double(double)> cdf;
    std::function<double(double)> density;
    double density_bound{std::numeric_limits<double>::infinity()};
    double density_slope_bound{std::numeric_limits<double>::infinity()};
    double density_floor{0.0};
    //! Closed-form limit structural cdf, if known
    std::function<double(double)> limit_cdf;

    bool has_bounded_density() const
    {
        return density_bound < std::numeric_limits<double>::infinity();
    }
};

struct GeneratorAudit
{
    bool normalized{false};      //!< G(1) - G(0) = 1
    bool monotone{false};        //!< G nondecreasing on the grid
    bool density_bound_ok{false};
    bool slope_bound_ok{false};
    //! Bounded density, as needed by the mean squared error bounds
    bool within_bound_hypotheses{false};
    bool density_bounded_away_from_zero{false};
    double max_density{0};
    double min_density{0};
    double max_slope{0};
    std::vector<std::string> notes;

    bool ok() const
    {
        return normalized && monotone && density_bound_ok && slope_bound_ok;
    }
};

GeneratorAudit audit_generator(SmoothGenerator const& gen,
                               std::size_t grid_points = 10000);

// G(x) = 2x - x^2, g(x) = 2(1 - x); limit structural cdf x/2 on [0, 2]
SmoothGenerator example_generator();
// G(x) = x, g = 1; every cell has probability 1/M
SmoothGenerator uniform_generator();
// G(x) = x^a for 0 < a <= 1; unbounded density at 0 when a < 1 (Zipf-like
// head), so it falls outside the bound hypotheses
SmoothGenerator power_generator(double exponent);
// Piecewise-linear G through (u, G(u)) nodes, which must start at (0, 0),
// end at (1, 1) and be nondecreasing
SmoothGenerator table_generator(std::vector<std::pair<double, double>> nodes,
                                std::string name = "table");
// Reads a two-column CSV of (u, G(u)); '#' lines and a header are skipped
SmoothGenerator load_table_generator(std::string const& path);

// "example", "uniform", "power:<a>" or "table:<path>"
SmoothGenerator generator_by_name(std::string_view name);

CellModel cells_from_generator(SmoothGenerator const& gen,
                               std::size_t num_cells);

//---------------------------------------------------------------------------//
/*!
 * Limit structural distribution function F(x) = |{u in (0,1] : g(u) <= x}|.
 *
 * Uses the generator's closed form when available. Otherwise g is tabulated
 * on a uniform grid and every grid cell where g crosses the level x is
 * resolved by bisection, which is exact up to the bisection tolerance as long
 * as g crosses a level at most once per grid cell.
 */
class LimitSdf
{
  public:
    LimitSdf(SmoothGenerator const& gen, std::size_t grid_points = 100000);

    double operator()(double x) const;

  private:
    std::function<double(double)> closed_form_;
    std::function<double(double)> density_;
    std::vector<double> grid_values_;
};

LimitSdf limit_sdf(SmoothGenerator const& gen,
                   std::size_t grid_points = 100000);

//---------------------------------------------------------------------------//
/*!
 * Piecewise-constant density f(t) = K * p_j on ((j-1)/K, j/K].
 */
class StepDensity
{
  public:
    explicit StepDensity(std::span<double const> probabilities);

    double operator()(double t) const;
    std::size_t num_blocks() const { return heights_.size(); }

    // sup over (0, 1] of |f(t) - density(t)|, sampled at the block edges and
    // samples_per_block interior points of every block
    double sup_deviation(std::function<double(double)> const& density,
                         std::size_t samples_per_block = 8) const;

  private:
    std::vector<double> heights_;
};

StepDensity step_density(CellModel const& cells);
StepDensity step_density(GroupedModel const& grouped);
}  // namespace sdfest
