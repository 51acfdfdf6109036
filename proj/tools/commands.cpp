#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "sdfest/asymptotics.hpp"
#include "sdfest/csv.hpp"
#include "sdfest/error.hpp"
#include "sdfest/estimators.hpp"
#include "sdfest/generators.hpp"
#include "sdfest/ingest.hpp"
#include "sdfest/sampling.hpp"

namespace sdfest::cli
{
namespace
{
using json = nlohmann::json;

struct SharedFlags
{
    std::uint64_t seed{0};
    std::string out;
    std::string format{"csv"};
};

void add_shared(CLI::App* sub, SharedFlags& flags)
{
    sub->add_option("--seed", flags.seed, "RNG seed (default 0)");
    sub->add_option("--out", flags.out, "Output file; stdout when omitted");
    sub->add_option("--format", flags.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

void write_file(std::string const& path, std::string const& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError(path, "cannot open for writing");
    f << content;
    f.close();
    if (!f)
        throw IoError(path, "write failed");
}

json step_cdf_json(StepCdf const& cdf)
{
    json jumps = json::array();
    auto js = cdf.jumps();
    auto cum = cdf.cumulative();
    for (std::size_t i = 0; i < js.size(); ++i)
        jumps.push_back({{"x", js[i].location}, {"mass", js[i].mass}, {"F", cum[i]}});
    return jumps;
}

json regime_json(RegimeDiagnostics const& d)
{
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {
        {"lambda_hat", d.lambda_hat},
        {"consistency_ratio", finite_or_null(d.consistency_ratio)},
        {"rate_ratio", finite_or_null(d.rate_ratio)},
        {"alpha", d.alpha},
        {"threshold", d.threshold},
        {"in_regime", d.in_regime},
        {"in_rate_regime", d.in_rate_regime},
        {"natural_regime", d.natural_regime},
        {"notes", d.notes},
    };
}

//---------------------------------------------------------------------------//
// Writes a result: CSV (plus a JSON sidecar at <out>.json holding the config
// echo and diagnostics) or a single JSON document
struct Result
{
    std::string command;
    json config;
    std::string csv;
    json data;
    json diagnostics;
};

void emit(Result const& r, SharedFlags const& flags, std::ostream& out)
{
    json meta = {{"schema", 1}, {"command", r.command}, {"config", r.config}};
    if (!r.diagnostics.is_null())
        meta["diagnostics"] = r.diagnostics;

    if (flags.format == "json")
    {
        json doc = meta;
        doc["data"] = r.data;
        std::string text = doc.dump(2) + "\n";
        if (flags.out.empty())
            out << text;
        else
            write_file(flags.out, text);
        return;
    }
    if (flags.out.empty())
    {
        out << "# " << meta.dump() << '\n' << r.csv;
        return;
    }
    write_file(flags.out, r.csv);
    write_file(flags.out + ".json", meta.dump(2) + "\n");
}

std::string table_csv(std::vector<std::string> const& header,
                      std::vector<std::vector<double>> const& rows)
{
    std::ostringstream os;
    write_table_csv(os, header, rows);
    return os.str();
}

json table_json(std::vector<std::string> const& header,
                std::vector<std::vector<double>> const& rows)
{
    json arr = json::array();
    for (auto const& r : rows)
    {
        json obj;
        for (std::size_t i = 0; i < header.size(); ++i)
            obj[header[i]] = r[i];
        arr.push_back(obj);
    }
    return arr;
}

std::vector<std::uint64_t> read_counts(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError(path, "cannot open for reading");
    std::vector<std::uint64_t> counts;
    std::string line;
    std::size_t lineno = 0;
    bool header_allowed = true;
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        auto field = line.substr(line.find_last_of(',') == std::string::npos
                                     ? 0
                                     : line.find_last_of(',') + 1);
        field.erase(0, field.find_first_not_of(" \t"));
        field.erase(field.find_last_not_of(" \t") + 1);
        std::uint64_t value{};
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size())
        {
            if (header_allowed)
            {
                header_allowed = false;
                continue;
            }
            throw ConfigError(path + ":" + std::to_string(lineno)
                              + ": expected a nonnegative integer count");
        }
        header_allowed = false;
        counts.push_back(value);
    }
    if (in.bad())
        throw IoError(path, "read failed");
    if (counts.empty())
        throw ConfigError(path + ": no counts found");
    return counts;
}

CountsVector make_counts(std::vector<std::uint64_t> counts,
                         CountsKind kind,
                         std::uint64_t n)
{
    CountsVector v;
    v.kind = kind;
    v.realized_size = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    v.counts = std::move(counts);
    v.nominal_size = n;
    return v;
}

std::function<double(double)> limit_function(SmoothGenerator const& gen)
{
    auto F = std::make_shared<LimitSdf const>(gen);
    return [F](double x) { return (*F)(x); };
}

double tail_x(SmoothGenerator const& gen, StepCdf const& cdf)
{
    double top = gen.has_bounded_density() ? gen.density_bound : cdf.max_support();
    return std::max(top, cdf.max_support());
}

std::string step_csv(StepCdf const& cdf,
                     std::function<double(double)> overlay,
                     std::optional<double> tail)
{
    std::ostringstream os;
    StepCdfCsvOptions opts;
    opts.overlay = std::move(overlay);
    opts.tail_x = tail;
    write_step_cdf_csv(os, cdf, opts);
    return os.str();
}

//---------------------------------------------------------------------------//
// estimate: estimator from observed counts
struct EstimateArgs
{
    std::string counts_path;
    std::uint64_t m{0};
    std::uint64_t n{0};
    bool sort_counts{false};
};

Result run_estimate(EstimateArgs const& a)
{
    auto counts = read_counts(a.counts_path);
    std::uint64_t const M = counts.size();
    std::uint64_t const total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    std::uint64_t const n = a.n ? a.n : total;
    std::uint64_t const m = a.m ? a.m : M;
    if (a.sort_counts)
        std::sort(counts.begin(), counts.end());
    auto cv = make_counts(counts, CountsKind::multinomial, n);

    EstimatorOutput est = (m == M && !a.sort_counts)
                              ? natural_estimator(cv, M, n)
                              : grouped_estimator(cv, GroupingScheme::make(M, m), n);
    Result r;
    r.command = "estimate";
    r.config = {{"counts", a.counts_path}, {"num_cells", M}, {"n", n}, {"m", m},
                {"sort_counts", a.sort_counts}};
    r.csv = step_csv(est.cdf, {}, std::nullopt);
    r.data = {{"jumps", step_cdf_json(est.cdf)}, {"group_counts", est.counts}};
    r.diagnostics = {{"estimator", to_string(est.kind)},
                     {"group_size", M / m},
                     {"total_count", total},
                     {"regime", regime_json(check_regime(M, n, m))}};
    return r;
}

//---------------------------------------------------------------------------//
// simulate: one sample from a generator, then an estimator
struct SimulateArgs
{
    std::string generator{"example"};
    std::uint64_t num_cells{1000};
    std::uint64_t n{3000};
    std::uint64_t m{0};
    bool ordered{false};
    bool poissonized{false};
    std::string counts_out;
};

Result run_simulate(SimulateArgs const& a, std::uint64_t seed)
{
    auto gen = generator_by_name(a.generator);
    auto cells = cells_from_generator(gen, a.num_cells);
    std::uint64_t const m = a.m ? a.m : a.num_cells;
    auto scheme = GroupingScheme::make(a.num_cells, m, a.ordered);
    auto grouped = group_model(cells, scheme);

    RngStream stream{seed, 0};
    CountsVector counts = a.poissonized ? draw_poissonized(cells, a.n, stream)
                                        : draw_multinomial(cells, a.n, stream);
    if (!a.counts_out.empty())
    {
        std::ostringstream os;
        os << "cell,count\n";
        for (std::size_t j = 0; j < counts.counts.size(); ++j)
            os << j + 1 << ',' << counts.counts[j] << '\n';
        write_file(a.counts_out, os.str());
    }
    EstimatorOutput est = (m == a.num_cells && !a.ordered)
                              ? natural_estimator(counts, a.num_cells, a.n)
                              : grouped_estimator(counts, scheme, a.n, grouped.cell_order());
    auto F = limit_function(gen);

    Result r;
    r.command = "simulate";
    r.config = {{"generator", a.generator}, {"num_cells", a.num_cells}, {"n", a.n},
                {"m", m}, {"ordered", a.ordered}, {"poissonized", a.poissonized},
                {"seed", seed}};
    r.csv = step_csv(est.cdf, F, tail_x(gen, est.cdf));
    r.data = {{"jumps", step_cdf_json(est.cdf)}, {"group_counts", est.counts}};
    r.diagnostics = {{"estimator", to_string(est.kind)},
                     {"group_size", a.num_cells / m},
                     {"sampling", to_string(counts.kind)},
                     {"realized_size", counts.realized_size},
                     {"sup_distance_to_limit", sup_distance(est.cdf, F)},
                     {"regime", regime_json(check_regime(a.num_cells, a.n, m))}};
    return r;
}

//---------------------------------------------------------------------------//
// mse: Monte Carlo study from a JSON config
struct MseArgs
{
    std::string config_path;
    bool sweep{false};
    bool variance_audit{false};
    bool gap{false};
    unsigned threads{0};
};

json cells_json(MseReport const& rep)
{
    json arr = json::array();
    for (auto const& c : rep.cells)
    {
        arr.push_back({{"m", c.m}, {"x", c.x}, {"target", c.target}, {"mean", c.mean},
                       {"bias", c.bias}, {"variance", c.variance}, {"mse", c.mse},
                       {"mc_standard_error", c.mc_standard_error},
                       {"variance_standard_error", c.variance_standard_error}});
    }
    return arr;
}

Result run_mse(MseArgs const& a, SharedFlags const& flags, bool seed_given)
{
    std::ifstream in(a.config_path);
    if (!in)
        throw IoError(a.config_path, "cannot open for reading");
    json j;
    try
    {
        j = json::parse(in);
    }
    catch (json::parse_error const& e)
    {
        throw ConfigError(a.config_path + ": " + e.what());
    }
    StudyConfig config = study_config_from_json(j);
    if (seed_given)
        config.seed = flags.seed;
    if (a.threads)
        config.threads = a.threads;
    if (int(a.sweep) + int(a.variance_audit) + int(a.gap) > 1)
        throw ConfigError("--sweep, --variance-audit and --gap are exclusive");

    Result r;
    r.command = "mse";
    r.config = to_json(config);
    r.config["config_path"] = a.config_path;

    if (a.gap)
    {
        auto gap = poissonization_gap(config);
        std::vector<std::string> header{"m", "x", "mean_squared_gap"};
        std::vector<std::vector<double>> rows;
        for (auto const& g : gap.rows)
            rows.push_back({double(g.m), g.x, g.mean_squared_gap});
        r.config["mode"] = "gap";
        r.csv = table_csv(header, rows);
        r.data = table_json(header, rows);
        r.diagnostics = {{"coupling_violations", gap.coupling_violations},
                         {"degenerate_reps", gap.degenerate_reps},
                         {"degenerate_nonzero", gap.degenerate_nonzero}};
        return r;
    }
    if (a.variance_audit)
    {
        auto report = run_mse_study(config);
        auto audit = variance_audit(report);
        std::vector<std::string> header{"m", "x", "variance", "threshold", "pass"};
        std::vector<std::vector<double>> rows;
        bool all = true;
        for (auto const& row : audit)
        {
            rows.push_back({double(row.m), row.x, row.variance, row.threshold,
                            row.pass ? 1.0 : 0.0});
            all = all && row.pass;
        }
        r.config["mode"] = "variance-audit";
        r.csv = table_csv(header, rows);
        r.data = table_json(header, rows);
        r.diagnostics = {{"all_pass", all}, {"wall_seconds", report.wall_seconds}};
        return r;
    }
    if (a.sweep)
    {
        auto sweep = sweep_m(config);
        std::vector<std::string> header{"m", "mse", "bias_sq", "variance"};
        std::vector<std::vector<double>> rows;
        for (auto const& row : sweep.rows)
            rows.push_back({double(row.m), row.mse, row.bias_sq, row.variance});
        r.config["mode"] = "sweep";
        r.csv = table_csv(header, rows);
        r.data = {{"rows", table_json(header, rows)}, {"cells", cells_json(sweep.report)}};
        r.diagnostics = {{"argmin_m", sweep.argmin_m},
                         {"cells", cells_json(sweep.report)},
                         {"wall_seconds", sweep.report.wall_seconds}};
        return r;
    }

    auto report = run_mse_study(config);
    std::vector<std::string> header{"m", "x", "target", "mean", "bias", "variance",
                                    "mse", "mc_standard_error", "variance_standard_error"};
    std::vector<std::vector<double>> rows;
    for (auto const& c : report.cells)
    {
        rows.push_back({double(c.m), c.x, c.target, c.mean, c.bias, c.variance, c.mse,
                        c.mc_standard_error, c.variance_standard_error});
    }
    r.config["mode"] = "report";
    r.csv = table_csv(header, rows);
    r.data = table_json(header, rows);
    r.diagnostics = {{"wall_seconds", report.wall_seconds}};
    return r;
}

//---------------------------------------------------------------------------//
// bounds: closed-form bias and MSE bounds
struct BoundsArgs
{
    std::uint64_t n{0};
    std::vector<std::uint64_t> m;
    std::string generator{"example"};
    double lambda{3.0};
    double alpha{0.1};
    std::optional<double> tau;
    std::optional<double> c;
};

Result run_bounds(BoundsArgs const& a)
{
    auto gen = generator_by_name(a.generator);
    BoundParams params;
    if (a.tau && a.c)
    {
        params.lambda = a.lambda;
        params.alpha = a.alpha;
    }
    else
    {
        params = BoundParams::for_generator(gen, a.lambda, a.alpha);
    }
    if (a.tau)
        params.tau = *a.tau;
    if (a.c)
        params.c = *a.c;
    params.validate();
    if (a.n == 0)
        throw ConfigError("--n must be positive");

    auto opt = optimal_m(a.n, params);
    std::vector<std::uint64_t> ms = a.m;
    if (ms.empty())
        ms.push_back(std::max<std::uint64_t>(1, std::llround(opt.m)));

    std::vector<std::string> header{"m", "n", "large_m_branch", "T", "esseen_bias",
                                    "leading_bias", "mse_bound"};
    std::vector<std::vector<double>> rows;
    for (auto m : ms)
    {
        if (m == 0)
            throw ConfigError("m must be positive");
        double T = optimal_T(m, a.n, params);
        bool large = static_cast<long double>(m) * m * m >= static_cast<long double>(a.n);
        rows.push_back({double(m), double(a.n), large ? 1.0 : 0.0, T,
                        esseen_bias_bound(m, a.n, T, params),
                        leading_bias_bound(m, a.n, params), mse_bound(m, a.n, params)});
    }
    Result r;
    r.command = "bounds";
    r.config = {{"n", a.n}, {"m", ms}, {"generator", a.generator},
                {"lambda", params.lambda}, {"tau", params.tau}, {"c", params.c},
                {"alpha", params.alpha}};
    r.csv = table_csv(header, rows);
    r.data = table_json(header, rows);
    r.diagnostics = {
        {"optimal_m", opt.m},
        {"stated_bound", opt.stated_bound},
        {"plugged_bound", opt.plugged_bound},
        {"optimal_m_below_threshold", opt.below_threshold},
        {"integer_argmin_large_m", integer_argmin_mse_bound(a.n, params, MseRegime::large_m)},
        {"integer_argmin_automatic", integer_argmin_mse_bound(a.n, params, MseRegime::automatic)},
    };
    return r;
}

//---------------------------------------------------------------------------//
// limit: Poisson mixture limit of the natural estimator
struct LimitArgs
{
    std::string x_grid;
    double lambda{3.0};
    std::string generator{"example"};
};

Result run_limit(LimitArgs const& a)
{
    if (!(a.lambda > 0))
        throw ConfigError("lambda must be positive");
    auto gen = generator_by_name(a.generator);
    auto xs = parse_grid(a.x_grid);
    LimitSdf F(gen);
    std::vector<std::string> header{"x", "F_Y_lambda", "F"};
    std::vector<std::vector<double>> rows;
    for (double x : xs)
        rows.push_back({x, poisson_mixture_cdf(x, gen, a.lambda), F(x)});
    Result r;
    r.command = "limit";
    r.config = {{"x", xs}, {"lambda", a.lambda}, {"generator", a.generator}};
    r.csv = table_csv(header, rows);
    r.data = table_json(header, rows);
    return r;
}

//---------------------------------------------------------------------------//
struct IngestArgs
{
    std::string text;
    std::uint64_t m{0};
    bool keep_case{false};
    bool no_digits{false};
};

Result run_ingest(IngestArgs const& a)
{
    TokenizerConfig rules;
    rules.lowercase = !a.keep_case;
    rules.keep_digits = !a.no_digits;
    auto corpus = tokenize_file(a.text, rules);
    auto est = estimate_from_corpus(corpus, a.m);

    Result r;
    r.command = "ingest";
    r.config = {{"text", a.text}, {"m", a.m}, {"lowercase", rules.lowercase},
                {"keep_digits", rules.keep_digits}};
    r.csv = step_csv(est.estimate.cdf, {}, std::nullopt);
    r.data = {{"jumps", step_cdf_json(est.estimate.cdf)}, {"group_counts", est.estimate.counts}};
    r.diagnostics = {{"n", corpus.n()},
                     {"num_words", est.observed_words},
                     {"phantom_cells", est.phantom_cells},
                     {"lambda_hat", est.lambda_hat},
                     {"regime", regime_json(est.regime)},
                     {"notes", est.notes}};
    return r;
}

json error_json(char const* kind, std::string const& message, int code)
{
    return {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
}
}  // namespace

//---------------------------------------------------------------------------//
StudyConfig study_config_from_json(nlohmann::json const& j)
{
    if (!j.is_object())
        throw ConfigError("study config must be a JSON object");
    if (!j.contains("schema") || j.at("schema") != 1)
        throw ConfigError("study config needs \"schema\": 1");
    static std::vector<std::string> const known{
        "schema", "generator", "num_cells", "n", "m_values", "x_grid",
        "reps", "seed", "poissonized", "ordered", "threads"};
    for (auto const& item : j.items())
    {
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw ConfigError("unknown study config key \"" + item.key() + "\"");
    }
    StudyConfig c;
    try
    {
        c.generator = j.value("generator", c.generator);
        c.num_cells = j.value("num_cells", c.num_cells);
        c.n = j.value("n", c.n);
        c.m_values = j.value("m_values", c.m_values);
        c.x_grid = j.value("x_grid", c.x_grid);
        c.reps = j.value("reps", c.reps);
        c.seed = j.value("seed", c.seed);
        c.poissonized = j.value("poissonized", c.poissonized);
        c.ordered = j.value("ordered", c.ordered);
        c.threads = j.value("threads", c.threads);
    }
    catch (json::exception const& e)
    {
        throw ConfigError(std::string("study config: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json to_json(StudyConfig const& c)
{
    return {{"schema", 1},           {"generator", c.generator}, {"num_cells", c.num_cells},
            {"n", c.n},              {"m_values", c.m_values},   {"x_grid", c.x_grid},
            {"reps", c.reps},        {"seed", c.seed},           {"poissonized", c.poissonized},
            {"ordered", c.ordered},  {"threads", c.threads}};
}

std::vector<double> parse_grid(std::string const& text)
{
    auto to_double = [&](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        double v{};
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
            throw ConfigError("cannot parse grid value '" + s + "'");
        return v;
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos)
    {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string p;
        while (std::getline(ss, p, ':'))
            parts.push_back(p);
        if (parts.size() != 3)
            throw ConfigError("grid range must be start:stop:step");
        double a = to_double(parts[0]), b = to_double(parts[1]), h = to_double(parts[2]);
        if (!(h > 0) || b < a)
            throw ConfigError("grid range needs step > 0 and stop >= start");
        auto steps = static_cast<std::uint64_t>(std::floor((b - a) / h + 0.5));
        if (steps > 10000000)
            throw ConfigError("grid range has too many points");
        for (std::uint64_t i = 0; i <= steps; ++i)
            out.push_back(a + static_cast<double>(i) * h);
    }
    else
    {
        std::stringstream ss(text);
        std::string p;
        while (std::getline(ss, p, ','))
            out.push_back(to_double(p));
    }
    if (out.empty())
        throw ConfigError("empty grid");
    return out;
}

FigureFiles reproduce_figures(std::string const& out_dir, std::uint64_t seed)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError(out_dir, ec.message());

    constexpr std::uint64_t M = 1000;
    constexpr std::uint64_t n = 3000;
    auto gen = example_generator();
    auto cells = cells_from_generator(gen, M);
    auto counts = draw_multinomial(cells, n, RngStream{seed, 0});
    auto F = limit_function(gen);

    FigureFiles files{(fs::path(out_dir) / "figure1_natural.csv").string(),
                      (fs::path(out_dir) / "figure2_m40.csv").string(),
                      (fs::path(out_dir) / "figure3_m10.csv").string()};

    auto write = [&](EstimatorOutput const& est, std::string const& path) {
        write_file(path, step_csv(est.cdf, F, std::max(2.0, est.cdf.max_support())));
    };
    write(natural_estimator(counts, M, n), files.natural);
    write(grouped_estimator(counts, GroupingScheme::make(M, 40), n), files.m40);
    write(grouped_estimator(counts, GroupingScheme::make(M, 10), n), files.m10);
    return files;
}

//---------------------------------------------------------------------------//
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Structural distribution function estimation: estimators, "
                 "Monte Carlo studies and bounds",
                 "sdfest"};
    app.require_subcommand(1);

    SharedFlags flags;

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Estimator from observed cell counts.\n"
                                     "CSV columns: x,F (first row is a zero anchor)");
    c_est->add_option("--counts", est.counts_path, "Counts file: one count per line, or "
                      "CSV whose last column is the count")->required();
    c_est->add_option("--m", est.m, "Number of groups (default: M, natural estimator)");
    c_est->add_option("--n", est.n, "Sample size (default: sum of counts)");
    c_est->add_flag("--sort-counts", est.sort_counts, "Order cells by ascending count before grouping");
    add_shared(c_est, flags);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Draw one sample from a generator and estimate.\n"
                                     "CSV columns: x,F,F_limit");
    c_sim->add_option("--generator", sim.generator, "example, uniform, power:<a> or table:<path>");
    c_sim->add_option("--cells", sim.num_cells, "Number of cells M");
    c_sim->add_option("--n", sim.n, "Sample size");
    c_sim->add_option("--m", sim.m, "Number of groups (default: M, natural estimator)");
    c_sim->add_flag("--ordered", sim.ordered, "Group cells in ascending probability order");
    c_sim->add_flag("--poissonized", sim.poissonized, "Independent Poisson(n p_j) counts");
    c_sim->add_option("--counts-out", sim.counts_out, "Also write the cell counts (cell,count)");
    add_shared(c_sim, flags);

    MseArgs mse;
    auto* c_mse = app.add_subcommand(
        "mse", "Monte Carlo bias/variance/MSE study from a JSON config (schema 1).\n"
               "CSV columns: m,x,target,mean,bias,variance,mse,mc_standard_error,"
               "variance_standard_error;\n  --sweep: m,mse,bias_sq,variance;\n"
               "  --variance-audit: m,x,variance,threshold,pass;\n  --gap: m,x,mean_squared_gap");
    c_mse->add_option("--config", mse.config_path, "Study config JSON")->required();
    c_mse->add_flag("--sweep", mse.sweep, "Average over x per m and report the argmin");
    c_mse->add_flag("--variance-audit", mse.variance_audit, "Check Var <= 1/(4m) + 4 SE (Poissonized)");
    c_mse->add_flag("--gap", mse.gap, "Mean squared gap between coupled multinomial and Poissonized estimators");
    c_mse->add_option("--threads", mse.threads, "Worker threads (0: hardware concurrency)");
    add_shared(c_mse, flags);

    BoundsArgs bnd;
    double tau = 0, cc = 0;
    auto* c_bnd = app.add_subcommand("bounds", "Bias and MSE bounds and the optimal number of groups.\n"
                                     "CSV columns: m,n,large_m_branch,T,esseen_bias,leading_bias,mse_bound");
    c_bnd->add_option("--n", bnd.n, "Sample size")->required();
    c_bnd->add_option("--m", bnd.m, "Group counts (default: rounded optimal m)")->delimiter(',');
    c_bnd->add_option("--generator", bnd.generator, "Generator supplying tau and c");
    c_bnd->add_option("--lambda", bnd.lambda, "Limit of n/M");
    c_bnd->add_option("--alpha", bnd.alpha, "Rate exponent in (0, 1/6)");
    auto* tau_opt = c_bnd->add_option("--tau", tau, "Override the density bound");
    auto* c_opt = c_bnd->add_option("--c", cc, "Override the L2 constant");
    add_shared(c_bnd, flags);

    LimitArgs lim;
    auto* c_lim = app.add_subcommand("limit", "Poisson mixture limit of the natural estimator.\n"
                                     "CSV columns: x,F_Y_lambda,F");
    c_lim->add_option("--x", lim.x_grid, "Comma list or start:stop:step")->required();
    c_lim->add_option("--lambda", lim.lambda, "Limit of n/M");
    c_lim->add_option("--generator", lim.generator, "example, uniform, power:<a> or table:<path>");
    add_shared(c_lim, flags);

    IngestArgs ing;
    auto* c_ing = app.add_subcommand("ingest", "Grouped estimator from a text corpus (exploratory).\n"
                                     "CSV columns: x,F; diagnostics in the JSON sidecar");
    c_ing->add_option("--text", ing.text, "UTF-8 text file")->required();
    c_ing->add_option("--m", ing.m, "Number of groups")->required();
    c_ing->add_flag("--keep-case", ing.keep_case, "Disable ASCII lowercasing");
    c_ing->add_flag("--no-digits", ing.no_digits, "Treat digits as separators");
    add_shared(c_ing, flags);

    std::string out_dir = ".";
    auto* c_fig = app.add_subcommand("reproduce-figures",
                                     "Write figure1_natural.csv, figure2_m40.csv and "
                                     "figure3_m10.csv (columns x,F,F_limit)");
    c_fig->add_option("--out-dir", out_dir, "Directory for the three figure files");
    add_shared(c_fig, flags);

    std::vector<char const*> argv{"sdfest"};
    for (auto const& a : args)
        argv.push_back(a.c_str());

    try
    {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (CLI::CallForHelp const&)
    {
        out << app.help();
        return exit_success;
    }
    catch (CLI::CallForAllHelp const&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_success;
    }
    catch (CLI::ParseError const& e)
    {
        err << error_json("usage", e.what(), exit_config).dump() << '\n';
        return exit_config;
    }

    auto* sub = app.get_subcommands().front();
    bool const seed_given = sub->count("--seed") > 0;
    try
    {
        Result r;
        if (sub == c_est)
            r = run_estimate(est);
        else if (sub == c_sim)
            r = run_simulate(sim, flags.seed);
        else if (sub == c_mse)
            r = run_mse(mse, flags, seed_given);
        else if (sub == c_bnd)
        {
            if (*tau_opt)
                bnd.tau = tau;
            if (*c_opt)
                bnd.c = cc;
            r = run_bounds(bnd);
        }
        else if (sub == c_lim)
            r = run_limit(lim);
        else if (sub == c_ing)
            r = run_ingest(ing);
        else
        {
            auto files = reproduce_figures(out_dir, flags.seed);
            r.command = "reproduce-figures";
            r.config = {{"out_dir", out_dir}, {"seed", flags.seed},
                        {"num_cells", 1000}, {"n", 3000}, {"generator", "example"}};
            std::vector<std::string> names{files.natural, files.m40, files.m10};
            r.csv = "figure,path\n1," + files.natural + "\n2," + files.m40 + "\n3," + files.m10 + "\n";
            r.data = {{"files", names}};
        }
        emit(r, flags, out);
        return exit_success;
    }
    catch (EncodingError const& e)
    {
        auto j = error_json("encoding", e.what(), exit_config);
        j["error"]["byte_offset"] = e.offset();
        err << j.dump() << '\n';
        return exit_config;
    }
    catch (ConfigError const& e)
    {
        err << error_json("config", e.what(), exit_config).dump() << '\n';
        return exit_config;
    }
    catch (NumericError const& e)
    {
        err << error_json("numeric", e.what(), exit_numeric).dump() << '\n';
        return exit_numeric;
    }
    catch (IoError const& e)
    {
        auto j = error_json("io", e.what(), exit_io);
        j["error"]["path"] = e.path();
        err << j.dump() << '\n';
        return exit_io;
    }
}
}  // namespace sdfest::cli
