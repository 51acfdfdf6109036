#include "sdfest/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>

#include "sdfest/error.hpp"

namespace sdfest
{
std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::to_chars_result res;
    if (value == std::trunc(value) && std::fabs(value) < 0x1.0p53)
        res = std::to_chars(buf, buf + sizeof(buf), static_cast<std::int64_t>(value));
    else
        res = std::to_chars(buf, buf + sizeof(buf), value);
    auto [end, ec] = res;
    if (ec != std::errc{})
        throw NumericError("number formatting failed");
    return std::string(buf, end);
}

void write_step_cdf_csv(std::ostream& os,
                        StepCdf const& cdf,
                        StepCdfCsvOptions const& options)
{
    bool const overlay = static_cast<bool>(options.overlay);
    os << "x,F";
    if (overlay)
        os << ',' << options.overlay_name;
    os << '\n';

    auto row = [&](double x, double F) {
        os << format_number(x) << ',' << format_number(F);
        if (overlay)
            os << ',' << format_number(options.overlay(x));
        os << '\n';
    };

    double const span = cdf.max_support() - cdf.min_support();
    double const eps = 0.05 * std::max(span, 1.0);
    row(cdf.min_support() - eps, 0.0);
    auto jumps = cdf.jumps();
    auto cum = cdf.cumulative();
    for (std::size_t i = 0; i < jumps.size(); ++i)
        row(jumps[i].location, cum[i]);
    if (options.tail_x && *options.tail_x > cdf.max_support())
        row(*options.tail_x, 1.0);
}

void write_table_csv(std::ostream& os,
                     std::vector<std::string> const& header,
                     std::vector<std::vector<double>> const& rows)
{
    for (std::size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << '\n';
    for (auto const& r : rows)
    {
        if (r.size() != header.size())
            throw ConfigError("table row width does not match header");
        for (std::size_t i = 0; i < r.size(); ++i)
            os << (i ? "," : "") << format_number(r[i]);
        os << '\n';
    }
}
}  // namespace sdfest
