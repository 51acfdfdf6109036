#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdfest/study.hpp"

namespace sdfest::cli
{
enum ExitCode
{
    exit_success = 0,
    exit_config = 2,
    exit_numeric = 3,
    exit_io = 4,
};

// Runs the command line; output goes to \c out unless --out is given,
// error JSON to \c err
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

// Schema-1 study config: {"schema": 1, "generator", "num_cells", "n",
// "m_values", "x_grid", "reps", "seed", "poissonized", "ordered", "threads"}
StudyConfig study_config_from_json(nlohmann::json const& j);
nlohmann::json to_json(StudyConfig const& config);

// Comma list "a,b,c" or range "start:stop:step" (stop inclusive within
// half a step)
std::vector<double> parse_grid(std::string const& text);

struct FigureFiles
{
    std::string natural;
    std::string m40;
    std::string m10;
};

// One example-generator sample at M = 1000, n = 3000; writes the natural,
// m = 40 and m = 10 estimators with the limit overlay
FigureFiles reproduce_figures(std::string const& out_dir, std::uint64_t seed);
}  // namespace sdfest::cli
