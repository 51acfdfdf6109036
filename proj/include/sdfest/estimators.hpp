#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"
#include "sampling.hpp"
#include "step_cdf.hpp"

namespace sdfest
{
enum class EstimatorKind
{
    natural,
    grouped,
};

char const* to_string(EstimatorKind kind);

//---------------------------------------------------------------------------//
/*!
 * Result of one of the four estimators.
 *
 * Jump locations are (groups * count) / n for the distinct integer counts in
 * \c jump_counts, so the lattice structure is checkable on integers. The raw
 * (grouped) counts are kept for re-evaluation at arbitrary points.
 */
struct EstimatorOutput
{
    StepCdf cdf;
    double scale;  //!< groups / n
    EstimatorKind kind;
    CountsKind sampling;
    std::uint64_t groups;  //!< M for natural, m for grouped
    std::uint64_t n;
    std::vector<std::uint64_t> counts;
    std::vector<std::uint64_t> jump_counts;
};

// (groups * count) / n, rounded once
double lattice_location(std::uint64_t count,
                        std::uint64_t groups,
                        std::uint64_t n);

// Empirical cdf of (groups / n) * count_j, mass 1/groups each. Both
// estimators reduce to this on their (grouped) counts.
EstimatorOutput scaled_count_estimator(CountsVector const& counts,
                                       std::uint64_t n,
                                       EstimatorKind kind);

// F-hat_M (or F-tilde_M for poissonized counts)
EstimatorOutput natural_estimator(CountsVector const& counts,
                                  std::uint64_t num_cells,
                                  std::uint64_t n);

// F-hat_m (or F-tilde_m): groups the counts, then scaled_count_estimator
EstimatorOutput grouped_estimator(CountsVector const& counts,
                                  GroupingScheme const& scheme,
                                  std::uint64_t n,
                                  std::span<std::size_t const> cell_order = {});

// Fraction of groups with lattice_location(count) <= x, without building a
// StepCdf. Agrees exactly with scaled_count_estimator(...).cdf(x).
double scaled_count_fraction(std::span<std::uint64_t const> group_counts,
                             std::uint64_t n,
                             double x);

//---------------------------------------------------------------------------//
/*!
 * Heuristic diagnostics for the asymptotic regime conditions.
 *
 * n/M -> lambda, n/(m log m) -> infinity and n/(m (log m)^(1/(2 alpha))) ->
 * infinity are asymptotic; the threshold only flags ratios that are
 * comfortably large and is diagnostic only.
 */
struct RegimeDiagnostics
{
    double lambda_hat{};
    double consistency_ratio{};  //!< n / (m log m)
    double rate_ratio{};         //!< n / (m (log m)^(1/(2 alpha)))
    double alpha{};
    double threshold{};
    bool in_regime{};            //!< consistency_ratio > threshold
    bool in_rate_regime{};       //!< rate_ratio > threshold
    bool natural_regime{};       //!< m == M (k = 1)
    std::vector<std::string> notes;
};

RegimeDiagnostics check_regime(std::uint64_t num_cells,
                               std::uint64_t n,
                               std::uint64_t num_groups,
                               double alpha = 0.1,
                               double threshold = 5.0);
}  // namespace sdfest
