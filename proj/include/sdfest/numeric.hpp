#pragma once

#include <cmath>
#include <span>

namespace sdfest
{
// Neumaier-compensated sum. Used wherever a probability vector has to be
// checked against 1 at 1e-12.
inline double compensated_sum(std::span<double const> values)
{
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values)
    {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            carry += (sum - t) + v;
        else
            carry += (v - t) + sum;
        sum = t;
    }
    return sum + carry;
}

inline constexpr double probability_sum_tolerance = 1e-12;
}  // namespace sdfest
