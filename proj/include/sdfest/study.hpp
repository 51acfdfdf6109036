#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "generators.hpp"

namespace sdfest
{
//---------------------------------------------------------------------------//
/*!
 * Monte Carlo experiment description.
 *
 * Replication r draws from RngStream{seed, r}. Every m must divide M; for
 * m = M the grouped estimator is the natural estimator.
 */
struct StudyConfig
{
    std::string generator{"example"};
    std::uint64_t num_cells{1000};  //!< M
    std::uint64_t n{3000};
    std::vector<std::uint64_t> m_values{1000};
    std::vector<double> x_grid{0.5, 1.0, 1.5};
    std::uint64_t reps{500};
    std::uint64_t seed{0};
    bool poissonized{false};
    bool ordered{false};
    //! Worker threads; 0 picks std::thread::hardware_concurrency
    unsigned threads{0};

    void validate() const;
};

// Divisor of num_cells closest to target (smaller one on ties)
std::uint64_t nearest_divisor(std::uint64_t num_cells, double target);

// All divisors of num_cells in ascending order
std::vector<std::uint64_t> divisors(std::uint64_t num_cells);

struct MseCell
{
    std::uint64_t m{};
    double x{};
    double target{};    //!< F(x)
    double mean{};      //!< replication mean of the estimate
    double bias{};      //!< mean - F(x)
    double variance{};  //!< sample variance, reps - 1 denominator
    double mse{};       //!< mean of (estimate - F(x))^2
    double mc_standard_error{};        //!< of the mean
    double variance_standard_error{};  //!< of the sample variance

    // mse - bias^2 - variance (reps - 1)/reps; zero up to rounding
    double decomposition_residual(std::uint64_t reps) const;
};

struct MseReport
{
    StudyConfig config;
    std::vector<MseCell> cells;  //!< ordered by (m index, x index)
    double wall_seconds{};

    MseCell const& at(std::uint64_t m, double x) const;
};

MseReport run_mse_study(StudyConfig const& config);
MseReport run_mse_study(StudyConfig const& config, SmoothGenerator const& gen);

struct VarianceAuditRow
{
    std::uint64_t m{};
    double x{};
    double variance{};
    double threshold{};  //!< 1/(4m) + 4 * standard error of the variance
    bool pass{};
};

// Poissonized estimators only
std::vector<VarianceAuditRow> variance_audit(StudyConfig const& config);
std::vector<VarianceAuditRow> variance_audit(MseReport const& report);

struct SweepRow
{
    std::uint64_t m{};
    double mse{};       //!< averaged over x_grid
    double bias_sq{};   //!< averaged over x_grid
    double variance{};  //!< averaged over x_grid
};

struct SweepResult
{
    MseReport report;
    std::vector<SweepRow> rows;
    std::uint64_t argmin_m{};
};

SweepResult sweep_m(StudyConfig const& config);
SweepResult sweep_m(StudyConfig const& config, SmoothGenerator const& gen);

//---------------------------------------------------------------------------//
/*!
 * Difference between an estimator and its Poissonized version under the
 * coupling of draw_coupled.
 */
struct GapRow
{
    std::uint64_t m{};
    double x{};
    double mean_squared_gap{};
};

struct GapResult
{
    StudyConfig config;
    std::vector<GapRow> rows;
    //! Per m: replications where sup_x |F-hat - F-tilde| > |N - n| / m
    std::vector<std::uint64_t> coupling_violations;
    //! Replications with N = n, all of which must show a zero gap
    std::uint64_t degenerate_reps{};
    std::uint64_t degenerate_nonzero{};

    // Average over x of the mean squared gap for m
    double mean_gap(std::uint64_t m) const;
};

GapResult poissonization_gap(StudyConfig const& config);
GapResult poissonization_gap(StudyConfig const& config, SmoothGenerator const& gen);

struct GapLadderPoint
{
    std::uint64_t n{};
    std::uint64_t num_cells{};
    std::uint64_t m{};
    double mean_gap{};
};

struct GapLadder
{
    std::vector<GapLadderPoint> points;
    //! Least-squares slope of -log(mean gap) on log n
    double decay_exponent{};
};

// For each n: M = round(n / lambda), m = divisor of M nearest floor(n^{2/5})
GapLadder poissonization_gap_ladder(std::string const& generator,
                                    double lambda,
                                    std::vector<std::uint64_t> const& n_values,
                                    std::vector<double> const& x_grid,
                                    std::uint64_t reps,
                                    std::uint64_t seed);

struct ConcentrationRow
{
    std::uint64_t m{};
    double delta{};
    double multinomial_frequency{};
    double poissonized_frequency{};
    double bound{};
    bool consistent{};  //!< bound >= 1, or both frequencies <= bound
};

// Frequency of max_j |(m/n) count_j - m q_j| >= delta for grouped
// multinomial and Poissonized counts, next to the union bound
std::vector<ConcentrationRow> concentration_audit(StudyConfig const& config,
                                                  std::vector<double> const& deltas);

struct SupDistanceRow
{
    std::uint64_t m{};
    double mean_sup_distance{};
    double standard_error{};
};

// Replication mean of the exact sup_x |F-hat_m - F| for a continuous limit F
std::vector<SupDistanceRow> sup_distance_study(StudyConfig const& config);
}  // namespace sdfest
