#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "step_cdf.hpp"

namespace sdfest
{
// Shortest round-trip decimal representation; integral values print
// without exponent or fraction
std::string format_number(double value);

struct StepCdfCsvOptions
{
    //! Extra column evaluated at every x (e.g. the limit F)
    std::function<double(double)> overlay;
    std::string overlay_name{"F_limit"};
    //! Final row at this x (value 1) when it lies beyond the last jump
    std::optional<double> tail_x;
};

// Columns x,F[,overlay]. The first row is an anchor (min - eps, 0) with
// eps = 0.05 max(span, 1); then one row per jump with the value after it.
void write_step_cdf_csv(std::ostream& os,
                        StepCdf const& cdf,
                        StepCdfCsvOptions const& options = {});

// Plain numeric table with a header row
void write_table_csv(std::ostream& os,
                     std::vector<std::string> const& header,
                     std::vector<std::vector<double>> const& rows);
}  // namespace sdfest
