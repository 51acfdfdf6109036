#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "generators.hpp"
#include "model.hpp"

namespace sdfest
{
//---------------------------------------------------------------------------//
/*!
 * Constants entering the bias and MSE bounds.
 *
 * \c lambda is the limit of n/M, \c tau bounds the limit density, \c c is the
 * constant in int (f_m - g)^2 <= c / m^2 and \c alpha in (0, 1/6) is the
 * exponent of the rate condition. Note that \c c is unrelated to the
 * max_j m q_j constant of the concentration bound, which is read off the
 * grouped model instead.
 */
struct BoundParams
{
    double lambda{3.0};
    double tau{2.0};
    double c{1.0 / 3.0};
    double alpha{0.1};

    void validate() const;

    // tau from the generator, c = (sup |g'|)^2 / 12 (midpoint-rule L2 error
    // constant for a Lipschitz density)
    static BoundParams for_generator(SmoothGenerator const& gen,
                                     double lambda,
                                     double alpha = 0.1);
};

//! Limit laws of the natural estimator for a generator and lambda
struct LimitLaw
{
    double lambda;
    std::function<double(double)> structural;  //!< F, the law of Z = g(U)
    std::function<double(double)> natural;     //!< F_{Y/lambda}
    std::string description;
};

LimitLaw natural_limit_law(SmoothGenerator const& gen, double lambda);

// Characteristic function of Y_m:
// (1/m) sum_j exp((n/m) z_j (e^{i t m/n} - 1)), z_j = m q_j
std::complex<double> phi_m(double t, GroupedModel const& grouped, std::uint64_t n);
std::complex<double> phi_m(double t, CellModel const& cells, std::uint64_t n);

// int_0^1 exp(lambda g(u) (e^{it/lambda} - 1)) du, absolute error 1e-8
std::complex<double> limit_char_natural(double t,
                                        SmoothGenerator const& gen,
                                        double lambda);

// int_0^1 exp(i t g(u)) du: characteristic function of F
std::complex<double> limit_char(double t, SmoothGenerator const& gen);

// F_{Y/lambda}(x) = int_0^1 P(Poisson(lambda g(u)) <= floor(lambda x)) du,
// absolute error 1e-6. Points within 1e-9 (relative) of the lattice
// (1/lambda) Z count as lattice points.
double poisson_mixture_cdf(double x, SmoothGenerator const& gen, double lambda);

// int_0^1 (f_m(u) - g(u))^2 du for the step density with m blocks
double l2_density_gap(SmoothGenerator const& gen, std::size_t num_groups);

// Four-term smoothing bound on |E F-tilde_m(x) - F(x)|
double esseen_bias_bound(std::uint64_t m,
                         std::uint64_t n,
                         double smoothing_T,
                         BoundParams const& params);

// Leading-order bias bound at the optimal T when m >= n^{1/3}:
// 3/(2 pi) (24 tau)^{2/3} (m/n)^{1/3}
double leading_bias_bound(std::uint64_t m,
                          std::uint64_t n,
                          BoundParams const& params);

// (24 tau)^{1/3} (n/m)^{1/3} when m >= n^{1/3}, else
// c^{-1/3} (24 tau)^{1/3} m^{2/3}
double optimal_T(std::uint64_t m, std::uint64_t n, BoundParams const& params);

enum class MseRegime
{
    automatic,  //!< large_m when m >= n^{1/3}, else small_m
    large_m,
    small_m,
};

// Leading-order MSE bound (remainder terms dropped):
// large_m: 9/(4 pi^2) (24 tau)^{4/3} (m/n)^{2/3} + 1/(4m); small_m: 1/(4m)
double mse_bound(std::uint64_t m,
                 std::uint64_t n,
                 BoundParams const& params,
                 MseRegime regime = MseRegime::automatic);

struct OptimalGroups
{
    double m;              //!< (pi^6 / (6^3 (24 tau)^4))^{1/5} n^{2/5}
    double stated_bound;   //!< 33/4 ((24 tau)^2 / (6 pi^3))^{2/5} n^{-2/5}
    double plugged_bound;  //!< large_m mse_bound evaluated at real-valued m
    bool below_threshold;  //!< m < n^{1/3}, i.e. outside the large_m branch
};

OptimalGroups optimal_m(std::uint64_t n, BoundParams const& params);

// Integer m in [1, n] minimizing mse_bound(m, n, params, regime); the
// smallest minimizer on ties
std::uint64_t integer_argmin_mse_bound(std::uint64_t n,
                                       BoundParams const& params,
                                       MseRegime regime = MseRegime::automatic);

// min(1, 2 exp(-eps^2 / (2 + eps mean^{-1/2})))
double bernstein_poisson_tail(double mean, double epsilon);

// 2 m exp(-delta^2 (n/m) / (2c + delta)) with c = max_j m q_j; this equals
// 2 exp(log m (-(n/(m log m)) delta^2/(2c + delta) + 1)) and stays defined at
// m = 1. Not capped.
double poissonization_union_bound(GroupedModel const& grouped,
                                  std::uint64_t n,
                                  double delta);
}  // namespace sdfest
