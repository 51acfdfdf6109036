#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "sdfest/csv.hpp"
#include "sdfest/error.hpp"

namespace sdfest::cli
{
namespace
{
namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome
{
    int code{};
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> read_csv(std::string const& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

std::string slurp(fs::path const& p)
{
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(std::string const& name)
{
    auto dir = fs::temp_directory_path() / ("sdfest_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

TEST(FormatNumber, Examples)
{
    EXPECT_EQ(format_number(100000000.0), "100000000");
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(-3.0), "-3");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333333333");
    EXPECT_EQ(format_number(NAN), "nan");
    EXPECT_EQ(format_number(1e300), "1e+300");
}

TEST(ParseGrid, Forms)
{
    EXPECT_EQ(parse_grid("0.5,1,1.5"), (std::vector<double>{0.5, 1.0, 1.5}));
    auto g = parse_grid("0.25:1.75:0.25");
    ASSERT_EQ(g.size(), 7u);
    EXPECT_DOUBLE_EQ(g.back(), 1.75);
    EXPECT_THROW(parse_grid("1:0:0.1"), ConfigError);
    EXPECT_THROW(parse_grid("a,b"), ConfigError);
}

TEST(Cli, ExitCodesAndErrorJson)
{
    EXPECT_EQ(call({"--help"}).code, exit_success);
    EXPECT_EQ(call({}).code, exit_config);
    EXPECT_EQ(call({"frobnicate"}).code, exit_config);

    auto bad = call({"limit", "--x", "1", "--lambda", "0"});
    EXPECT_EQ(bad.code, exit_config);
    auto e = json::parse(bad.err);
    EXPECT_EQ(e["error"]["exit_code"], 2);
    EXPECT_FALSE(e["error"]["message"].get<std::string>().empty());

    auto missing = call({"ingest", "--text", "/nonexistent/corpus.txt", "--m", "2"});
    EXPECT_EQ(missing.code, exit_io);
    EXPECT_EQ(json::parse(missing.err)["error"]["path"], "/nonexistent/corpus.txt");

    auto dir = scratch("enc");
    std::ofstream(dir / "bad.txt") << "ok \xff";
    auto enc = call({"ingest", "--text", (dir / "bad.txt").string(), "--m", "1"});
    EXPECT_EQ(enc.code, exit_config);
    EXPECT_EQ(json::parse(enc.err)["error"]["byte_offset"], 3);

    auto nodiv = call({"simulate", "--cells", "1000", "--n", "3000", "--m", "7"});
    EXPECT_EQ(nodiv.code, exit_config);
}

TEST(Cli, LimitValues)
{
    auto r = call({"limit", "--x", "0.3333333333333333", "--lambda", "3", "--generator", "uniform",
                   "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = json::parse(r.out);
    auto row = doc["data"][0];
    EXPECT_NEAR(row["F_Y_lambda"].get<double>(), 4 * std::exp(-3.0), 1e-9);

    auto ex = call({"limit", "--x", "0.5,1,1.5"});
    ASSERT_EQ(ex.code, 0) << ex.err;
    auto rows = read_csv(ex.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "F_Y_lambda", "F"}));
    EXPECT_EQ(rows[2][2], "0.5");
}

TEST(Cli, EstimateFromCounts)
{
    auto dir = scratch("est");
    std::ofstream(dir / "counts.csv") << "0\n1\n2\n3\n";
    auto out = (dir / "est.csv").string();
    auto r = call({"estimate", "--counts", (dir / "counts.csv").string(), "--n", "6", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = read_csv(slurp(out));
    ASSERT_EQ(rows.size(), 6u);  // header, anchor, four jumps
    EXPECT_EQ(rows[2], (std::vector<std::string>{"0", "0.25"}));
    EXPECT_EQ(rows[5], (std::vector<std::string>{"2", "1"}));
    auto side = json::parse(slurp(out + ".json"));
    EXPECT_EQ(side["command"], "estimate");
    EXPECT_EQ(side["schema"], 1);
}

TEST(Cli, Bounds)
{
    auto r = call({"bounds", "--n", "3000", "--m", "40", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = json::parse(r.out);
    auto row = doc["data"][0];
    EXPECT_NEAR(row["T"].get<double>(), 15.3262, 1e-4);
    EXPECT_NEAR(row["mse_bound"].get<double>(), 2.24238, 1e-5);

    auto big = call({"bounds", "--n", "100000000", "--format", "json"});
    ASSERT_EQ(big.code, 0) << big.err;
    auto d = json::parse(big.out)["diagnostics"];
    EXPECT_NEAR(d["optimal_m"].get<double>(), 96.54, 0.01);
    EXPECT_EQ(d["integer_argmin_large_m"], 97);
}

TEST(Cli, StudyConfigJson)
{
    json j = {{"schema", 1},      {"generator", "example"}, {"num_cells", 200}, {"n", 600},
              {"m_values", {8, 40}}, {"x_grid", {0.5, 1.0}}, {"reps", 20},      {"seed", 3},
              {"poissonized", true}};
    auto cfg = study_config_from_json(j);
    EXPECT_EQ(cfg.num_cells, 200u);
    EXPECT_EQ(cfg.m_values, (std::vector<std::uint64_t>{8, 40}));
    EXPECT_TRUE(cfg.poissonized);
    EXPECT_EQ(study_config_from_json(to_json(cfg)).x_grid, cfg.x_grid);

    auto extra = j;
    extra["bogus"] = 1;
    EXPECT_THROW(study_config_from_json(extra), ConfigError);
    auto wrong = j;
    wrong["schema"] = 2;
    EXPECT_THROW(study_config_from_json(wrong), ConfigError);

    auto dir = scratch("mse");
    std::ofstream(dir / "cfg.json") << j.dump();
    auto out = (dir / "mse.csv").string();
    auto r = call({"mse", "--config", (dir / "cfg.json").string(), "--variance-audit", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    auto side = json::parse(slurp(out + ".json"));
    EXPECT_EQ(side["config"]["reps"], 20);
    EXPECT_EQ(read_csv(slurp(out)).size(), 5u);
}

TEST(Cli, ReproduceFigures)
{
    auto dir = scratch("fig");
    auto files = reproduce_figures(dir.string(), 0);
    for (auto const& p : {files.natural, files.m40, files.m10})
        EXPECT_TRUE(fs::exists(p)) << p;

    auto natural = read_csv(slurp(files.natural));
    EXPECT_EQ(natural[0], (std::vector<std::string>{"x", "F", "F_limit"}));
    for (std::size_t i = 2; i < natural.size(); ++i)
    {
        double x = std::stod(natural[i][0]);
        double thirds = std::round(3 * x);
        if (i + 1 < natural.size() || x <= 2.0)
            EXPECT_NEAR(3 * x, thirds, 1e-9) << natural[i][0];
    }

    auto m40 = read_csv(slurp(files.m40));
    double mass_rows = 0;
    for (std::size_t i = 2; i < m40.size(); ++i)
        mass_rows += 1;
    EXPECT_LE(mass_rows, 41);
    EXPECT_EQ(m40.back()[1], "1");
    EXPECT_EQ(m40.back()[2], "1");

    auto r = call({"reproduce-figures", "--out-dir", dir.string(), "--seed", "0"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(files.m10), slurp(dir / "figure3_m10.csv"));
}
}  // namespace
}  // namespace sdfest::cli
