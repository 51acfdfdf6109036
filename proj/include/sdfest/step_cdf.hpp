#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sdfest
{
struct Jump
{
    double location;
    double mass;

    friend bool operator==(Jump const&, Jump const&) = default;
};

//---------------------------------------------------------------------------//
/*!
 * Right-continuous distribution function with finitely many jumps.
 *
 * This is the single representation used for the structural distribution
 * function, its grouped version and all four estimators. Jumps are stored
 * aggregated: locations are strictly increasing and ties (exactly equal
 * doubles) are merged into a single jump.
 *
 * Evaluation follows the indicator convention \c I[value <= x], i.e. the
 * value at \c x includes the mass located at \c x.
 */
class StepCdf
{
  public:
    // Validating constructor: sorted, strictly increasing, positive masses
    // summing to one within 1e-12
    explicit StepCdf(std::vector<Jump> jumps);

    // Empirical distribution of a sample, each value carrying mass 1/size
    static StepCdf from_sample(std::span<double const> values);

    // Empirical distribution from distinct sorted locations with integer
    // multiplicities; mass and cumulative values are computed as exact
    // ratios multiplicity/total
    static StepCdf from_multiplicities(std::span<double const> locations,
                                       std::span<std::uint64_t const> counts);

    double operator()(double x) const;
    double left_limit(double x) const;

    std::span<Jump const> jumps() const { return jumps_; }
    //! Value just after each jump (same indexing as jumps())
    std::span<double const> cumulative() const { return cumulative_; }

    std::size_t size() const { return jumps_.size(); }
    double min_support() const { return jumps_.front().location; }
    double max_support() const { return jumps_.back().location; }

    friend bool operator==(StepCdf const& a, StepCdf const& b)
    {
        return a.jumps_ == b.jumps_;
    }

  private:
    StepCdf() = default;

    std::vector<Jump> jumps_;
    std::vector<double> cumulative_;
};

// Exact sup_x |a(x) - b(x)| over the merged jump set
double sup_distance(StepCdf const& a, StepCdf const& b);

// Exact sup_x |a(x) - F(x)| for a continuous nondecreasing F with F(-inf)=0
// and F(+inf)=1. Between two jumps of a the extremes of |a - F| are reached
// at the interval endpoints, so checking both ends of every interval is
// enough.
double sup_distance(StepCdf const& a,
                    std::function<double(double)> const& continuous_cdf);
}  // namespace sdfest
