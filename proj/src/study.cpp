#include "sdfest/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <exception>
#include <memory>
#include <numeric>
#include <thread>

#include "sdfest/error.hpp"
#include "sdfest/estimators.hpp"
#include "sdfest/model.hpp"
#include "sdfest/sampling.hpp"

namespace sdfest
{
namespace
{
//---------------------------------------------------------------------------//
// Streaming central moments up to order four, mergeable in a fixed order
// (Chan et al. / Pebay update). Also accumulates squared deviations from a
// fixed reference value.
struct Moments
{
    double reference{0};
    double count{0};
    double mean{0};
    double m2{0};
    double m3{0};
    double m4{0};
    double sq_dev{0};  //!< sum (x - reference)^2

    void push(double x)
    {
        Moments one;
        one.reference = reference;
        one.count = 1;
        one.mean = x;
        double d = x - reference;
        one.sq_dev = d * d;
        merge(one);
    }

    void merge(Moments const& b)
    {
        if (b.count == 0)
            return;
        if (count == 0)
        {
            *this = b;
            return;
        }
        double const na = count;
        double const nb = b.count;
        double const n = na + nb;
        double const delta = b.mean - mean;
        double const d2 = delta * delta;
        double const new_m4 = m4 + b.m4
                              + d2 * d2 * na * nb * (na * na - na * nb + nb * nb)
                                    / (n * n * n)
                              + 6.0 * d2 * (na * na * b.m2 + nb * nb * m2) / (n * n)
                              + 4.0 * delta * (na * b.m3 - nb * m3) / n;
        double const new_m3 = m3 + b.m3 + d2 * delta * na * nb * (na - nb) / (n * n)
                              + 3.0 * delta * (na * b.m2 - nb * m2) / n;
        m2 += b.m2 + d2 * na * nb / n;
        m3 = new_m3;
        m4 = new_m4;
        mean += delta * nb / n;
        count = n;
        sq_dev += b.sq_dev;
    }

    double variance() const { return count > 1 ? m2 / (count - 1) : 0.0; }

    double variance_standard_error() const
    {
        if (count < 2)
            return 0.0;
        double const mu2 = m2 / count;
        double const mu4 = m4 / count;
        double const v = (mu4 - (count - 3) / (count - 1) * mu2 * mu2) / count;
        return std::sqrt(std::max(v, 0.0));
    }
};

constexpr std::uint64_t chunk_size = 32;

unsigned resolve_threads(unsigned requested, std::uint64_t chunks)
{
    unsigned t = requested ? requested : std::thread::hardware_concurrency();
    t = std::max(t, 1u);
    return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(chunks, 1)));
}

//---------------------------------------------------------------------------//
// Runs fn(rep, out) for rep in [0, reps) on worker threads, each worker
// owning its own fn = make(). Replications are accumulated per fixed-size
// chunk in index order and chunks are folded in index order, so the result
// does not depend on the thread count.
template<class Factory>
std::vector<Moments> replicate(std::uint64_t reps,
                               unsigned threads,
                               std::vector<double> const& references,
                               Factory const& make)
{
    std::size_t const width = references.size();
    std::uint64_t const chunks = (reps + chunk_size - 1) / chunk_size;
    std::vector<std::vector<Moments>> partial(chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        auto fn = make();
        std::vector<double> out(width);
        while (!failed.load())
        {
            std::uint64_t chunk = next.fetch_add(1);
            if (chunk >= chunks)
                return;
            std::vector<Moments> acc(width);
            for (std::size_t i = 0; i < width; ++i)
                acc[i].reference = references[i];
            try
            {
                std::uint64_t end = std::min(reps, (chunk + 1) * chunk_size);
                for (std::uint64_t r = chunk * chunk_size; r < end; ++r)
                {
                    fn(r, out);
                    for (std::size_t i = 0; i < width; ++i)
                        acc[i].push(out[i]);
                }
            }
            catch (...)
            {
                if (!failed.exchange(true))
                    failure = std::current_exception();
                return;
            }
            partial[chunk] = std::move(acc);
        }
    };

    unsigned const nthreads = resolve_threads(threads, chunks);
    if (nthreads == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<Moments> total(width);
    for (std::size_t i = 0; i < width; ++i)
        total[i].reference = references[i];
    for (auto const& p : partial)
        for (std::size_t i = 0; i < width; ++i)
            total[i].merge(p[i]);
    return total;
}

// Largest integer c with lattice_location(c, groups, n) <= x, or -1
std::int64_t lattice_threshold(double x, std::uint64_t groups, std::uint64_t n)
{
    if (!(x >= 0))
        return -1;
    constexpr double cap = 0x1.0p62;
    double guess = std::floor(x * static_cast<double>(n) / static_cast<double>(groups));
    auto g = static_cast<std::int64_t>(std::min(guess, cap));
    while (g < static_cast<std::int64_t>(cap)
           && lattice_location(static_cast<std::uint64_t>(g + 1), groups, n) <= x)
        ++g;
    while (g >= 0 && lattice_location(static_cast<std::uint64_t>(g), groups, n) > x)
        --g;
    return g;
}

//---------------------------------------------------------------------------//
// Groups cell counts for every configured m through one prefix-sum pass and
// evaluates the grouped estimators on the x grid with integer thresholds.
class GroupedGridEvaluator
{
  public:
    GroupedGridEvaluator(StudyConfig const& config, CellModel const& cells)
        : n_(config.n), x_grid_(config.x_grid)
    {
        if (config.ordered)
            order_ = ascending_order(cells.probabilities());
        for (auto m : config.m_values)
        {
            std::vector<std::int64_t> thr;
            for (double x : config.x_grid)
                thr.push_back(lattice_threshold(x, m, n_));
            groups_.push_back(m);
            thresholds_.push_back(std::move(thr));
        }
        prefix_.resize(cells.num_cells() + 1);
    }

    std::size_t width() const { return groups_.size() * x_grid_.size(); }

    // Writes F_m(x) for every (m, x) into out, m-major
    void evaluate(std::span<std::uint64_t const> cell_counts, std::span<double> out)
    {
        build_prefix(cell_counts);
        std::size_t const nx = x_grid_.size();
        std::vector<std::uint64_t> below(nx);
        for (std::size_t mi = 0; mi < groups_.size(); ++mi)
        {
            std::uint64_t const m = groups_[mi];
            std::uint64_t const k = (prefix_.size() - 1) / m;
            auto const& thr = thresholds_[mi];
            std::fill(below.begin(), below.end(), 0);
            for (std::uint64_t j = 0; j < m; ++j)
            {
                auto c = static_cast<std::int64_t>(prefix_[(j + 1) * k] - prefix_[j * k]);
                for (std::size_t xi = 0; xi < nx; ++xi)
                    below[xi] += c <= thr[xi];
            }
            for (std::size_t xi = 0; xi < nx; ++xi)
                out[mi * nx + xi] = static_cast<double>(below[xi]) / static_cast<double>(m);
        }
    }

    // Group counts for one m, grouped in the same way as evaluate
    std::vector<std::uint64_t> group(std::span<std::uint64_t const> cell_counts,
                                     std::uint64_t m)
    {
        build_prefix(cell_counts);
        std::uint64_t const k = (prefix_.size() - 1) / m;
        std::vector<std::uint64_t> g(m);
        for (std::uint64_t j = 0; j < m; ++j)
            g[j] = prefix_[(j + 1) * k] - prefix_[j * k];
        return g;
    }

  private:
    std::uint64_t n_;
    std::vector<double> x_grid_;
    std::vector<std::size_t> order_;
    std::vector<std::uint64_t> groups_;
    std::vector<std::vector<std::int64_t>> thresholds_;
    std::vector<std::uint64_t> prefix_;

    void build_prefix(std::span<std::uint64_t const> counts)
    {
        prefix_[0] = 0;
        if (order_.empty())
        {
            for (std::size_t i = 0; i < counts.size(); ++i)
                prefix_[i + 1] = prefix_[i] + counts[i];
        }
        else
        {
            for (std::size_t i = 0; i < counts.size(); ++i)
                prefix_[i + 1] = prefix_[i] + counts[order_[i]];
        }
    }
};

CountsVector wrap_counts(std::vector<std::uint64_t> counts,
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

double elapsed(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}
}  // namespace

//---------------------------------------------------------------------------//
void StudyConfig::validate() const
{
    if (generator.empty())
        throw ConfigError("generator name is empty");
    if (num_cells == 0)
        throw ConfigError("M must be positive");
    if (n == 0)
        throw ConfigError("n must be positive");
    if (reps == 0)
        throw ConfigError("reps must be at least 1");
    if (m_values.empty())
        throw ConfigError("m_values is empty");
    for (auto m : m_values)
    {
        if (m == 0 || num_cells % m != 0)
        {
            throw ConfigError("m = " + std::to_string(m) + " does not divide M = "
                              + std::to_string(num_cells) + "; nearest divisor is "
                              + std::to_string(nearest_divisor(
                                  num_cells, static_cast<double>(m))));
        }
    }
    if (x_grid.empty())
        throw ConfigError("x_grid is empty");
    for (std::size_t i = 0; i < x_grid.size(); ++i)
    {
        if (!std::isfinite(x_grid[i]))
            throw ConfigError("x_grid contains a non-finite value");
        if (i > 0 && !(x_grid[i - 1] < x_grid[i]))
            throw ConfigError("x_grid must be strictly increasing");
    }
}

std::vector<std::uint64_t> divisors(std::uint64_t num_cells)
{
    if (num_cells == 0)
        throw ConfigError("M must be positive");
    std::vector<std::uint64_t> low, high;
    for (std::uint64_t d = 1; d <= num_cells / d; ++d)
    {
        if (num_cells % d == 0)
        {
            low.push_back(d);
            if (d != num_cells / d)
                high.push_back(num_cells / d);
        }
    }
    low.insert(low.end(), high.rbegin(), high.rend());
    return low;
}

std::uint64_t nearest_divisor(std::uint64_t num_cells, double target)
{
    std::uint64_t best = 1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (auto d : divisors(num_cells))
    {
        double dist = std::fabs(static_cast<double>(d) - target);
        if (dist < best_dist)
        {
            best = d;
            best_dist = dist;
        }
    }
    return best;
}

double MseCell::decomposition_residual(std::uint64_t reps) const
{
    double const r = static_cast<double>(reps);
    return mse - bias * bias - variance * (r - 1) / r;
}

MseCell const& MseReport::at(std::uint64_t m, double x) const
{
    for (auto const& c : cells)
        if (c.m == m && c.x == x)
            return c;
    throw ConfigError("no report cell for m = " + std::to_string(m)
                      + ", x = " + std::to_string(x));
}

//---------------------------------------------------------------------------//
MseReport run_mse_study(StudyConfig const& config)
{
    return run_mse_study(config, generator_by_name(config.generator));
}

MseReport run_mse_study(StudyConfig const& config, SmoothGenerator const& gen)
{
    config.validate();
    auto const start = std::chrono::steady_clock::now();

    CellModel const cells = cells_from_generator(gen, config.num_cells);
    MultinomialSampler const sampler(cells);
    LimitSdf const F(gen);

    std::vector<double> targets;
    for (std::size_t mi = 0; mi < config.m_values.size(); ++mi)
        for (double x : config.x_grid)
            targets.push_back(F(x));

    auto moments = replicate(
        config.reps, config.threads, targets,
        [&] {
            auto evaluator = std::make_shared<GroupedGridEvaluator>(config, cells);
            return [&, evaluator](std::uint64_t r, std::vector<double>& out) {
                RngStream stream{config.seed, r};
                std::vector<std::uint64_t> counts;
                if (config.poissonized)
                {
                    counts = draw_poissonized(cells, config.n, stream).counts;
                }
                else
                {
                    Rng rng(stream);
                    counts = sampler.draw(config.n, rng).counts;
                }
                evaluator->evaluate(counts, out);
            };
        });

    MseReport report;
    report.config = config;
    std::size_t i = 0;
    for (auto m : config.m_values)
    {
        for (double x : config.x_grid)
        {
            auto const& mo = moments[i];
            MseCell c;
            c.m = m;
            c.x = x;
            c.target = targets[i];
            c.mean = mo.mean;
            c.bias = mo.mean - c.target;
            c.variance = mo.variance();
            c.mse = mo.sq_dev / mo.count;
            c.mc_standard_error = std::sqrt(c.variance / mo.count);
            c.variance_standard_error = mo.variance_standard_error();
            report.cells.push_back(c);
            ++i;
        }
    }
    report.wall_seconds = elapsed(start);
    return report;
}

//---------------------------------------------------------------------------//
std::vector<VarianceAuditRow> variance_audit(StudyConfig const& config)
{
    if (!config.poissonized)
        throw ConfigError("variance audit applies to Poissonized estimators only");
    return variance_audit(run_mse_study(config));
}

std::vector<VarianceAuditRow> variance_audit(MseReport const& report)
{
    if (!report.config.poissonized)
        throw ConfigError("variance audit applies to Poissonized estimators only");
    std::vector<VarianceAuditRow> rows;
    for (auto const& c : report.cells)
    {
        VarianceAuditRow row;
        row.m = c.m;
        row.x = c.x;
        row.variance = c.variance;
        row.threshold = 1.0 / (4.0 * static_cast<double>(c.m))
                        + 4.0 * c.variance_standard_error;
        row.pass = row.variance <= row.threshold;
        rows.push_back(row);
    }
    return rows;
}

//---------------------------------------------------------------------------//
SweepResult sweep_m(StudyConfig const& config)
{
    return sweep_m(config, generator_by_name(config.generator));
}

SweepResult sweep_m(StudyConfig const& config, SmoothGenerator const& gen)
{
    SweepResult result;
    result.report = run_mse_study(config, gen);
    auto const nx = static_cast<double>(config.x_grid.size());
    double best = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    for (auto m : config.m_values)
    {
        SweepRow row;
        row.m = m;
        for (std::size_t xi = 0; xi < config.x_grid.size(); ++xi, ++i)
        {
            auto const& c = result.report.cells[i];
            row.mse += c.mse;
            row.bias_sq += c.bias * c.bias;
            row.variance += c.variance;
        }
        row.mse /= nx;
        row.bias_sq /= nx;
        row.variance /= nx;
        if (row.mse < best)
        {
            best = row.mse;
            result.argmin_m = m;
        }
        result.rows.push_back(row);
    }
    return result;
}

//---------------------------------------------------------------------------//
double GapResult::mean_gap(std::uint64_t m) const
{
    double sum = 0;
    std::size_t count = 0;
    for (auto const& r : rows)
    {
        if (r.m == m)
        {
            sum += r.mean_squared_gap;
            ++count;
        }
    }
    if (count == 0)
        throw ConfigError("no gap rows for m = " + std::to_string(m));
    return sum / static_cast<double>(count);
}

GapResult poissonization_gap(StudyConfig const& config)
{
    return poissonization_gap(config, generator_by_name(config.generator));
}

GapResult poissonization_gap(StudyConfig const& config, SmoothGenerator const& gen)
{
    config.validate();
    CellModel const cells = cells_from_generator(gen, config.num_cells);
    MultinomialSampler const sampler(cells);
    std::size_t const nm = config.m_values.size();
    std::size_t const nx = config.x_grid.size();

    // Layout: nm * nx squared gaps, nm violation flags, degenerate flag,
    // degenerate-with-gap flag
    std::vector<double> refs(nm * nx + nm + 2, 0.0);
    auto moments = replicate(
        config.reps, config.threads, refs,
        [&] {
            auto evaluator = std::make_shared<GroupedGridEvaluator>(config, cells);
            return [&, evaluator](std::uint64_t r, std::vector<double>& out) {
                Rng rng(RngStream{config.seed, r});
                auto coupled = sampler.draw_coupled(config.n, rng);
                auto const& nu = coupled.multinomial.counts;
                auto const& rho = coupled.poissonized.counts;
                std::uint64_t const N = coupled.poissonized.realized_size;
                std::uint64_t const dn = N > config.n ? N - config.n : config.n - N;

                std::vector<double> a(nm * nx), b(nm * nx);
                evaluator->evaluate(nu, a);
                evaluator->evaluate(rho, b);
                bool any_gap = false;
                for (std::size_t i = 0; i < nm * nx; ++i)
                {
                    double d = a[i] - b[i];
                    out[i] = d * d;
                    any_gap = any_gap || d != 0;
                }
                for (std::size_t mi = 0; mi < nm; ++mi)
                {
                    std::uint64_t m = config.m_values[mi];
                    auto fa = scaled_count_estimator(
                        wrap_counts(evaluator->group(nu, m), CountsKind::multinomial, config.n),
                        config.n, EstimatorKind::grouped);
                    auto fb = scaled_count_estimator(
                        wrap_counts(evaluator->group(rho, m), CountsKind::poissonized, config.n),
                        config.n, EstimatorKind::grouped);
                    double sup = sup_distance(fa.cdf, fb.cdf);
                    any_gap = any_gap || sup != 0;
                    double bound = static_cast<double>(dn) / static_cast<double>(m);
                    out[nm * nx + mi] = sup > bound + 1e-12 ? 1.0 : 0.0;
                }
                out[nm * nx + nm] = dn == 0 ? 1.0 : 0.0;
                out[nm * nx + nm + 1] = (dn == 0 && any_gap) ? 1.0 : 0.0;
            };
        });

    auto as_count = [&](Moments const& mo) {
        return static_cast<std::uint64_t>(std::llround(mo.mean * mo.count));
    };

    GapResult result;
    result.config = config;
    for (std::size_t mi = 0; mi < nm; ++mi)
        for (std::size_t xi = 0; xi < nx; ++xi)
            result.rows.push_back(GapRow{config.m_values[mi], config.x_grid[xi],
                                         moments[mi * nx + xi].mean});
    for (std::size_t mi = 0; mi < nm; ++mi)
        result.coupling_violations.push_back(as_count(moments[nm * nx + mi]));
    result.degenerate_reps = as_count(moments[nm * nx + nm]);
    result.degenerate_nonzero = as_count(moments[nm * nx + nm + 1]);
    return result;
}

GapLadder poissonization_gap_ladder(std::string const& generator,
                                    double lambda,
                                    std::vector<std::uint64_t> const& n_values,
                                    std::vector<double> const& x_grid,
                                    std::uint64_t reps,
                                    std::uint64_t seed)
{
    if (!(lambda > 0))
        throw ConfigError("lambda must be positive");
    if (n_values.size() < 2)
        throw ConfigError("gap ladder needs at least two sample sizes");
    auto gen = generator_by_name(generator);

    GapLadder ladder;
    std::vector<double> lx, ly;
    for (auto n : n_values)
    {
        auto M = static_cast<std::uint64_t>(
            std::llround(static_cast<double>(n) / lambda));
        if (M == 0)
            throw ConfigError("n / lambda rounds to zero cells");
        double target = std::floor(std::pow(static_cast<double>(n), 0.4));
        StudyConfig cfg;
        cfg.generator = generator;
        cfg.num_cells = M;
        cfg.n = n;
        cfg.m_values = {nearest_divisor(M, target)};
        cfg.x_grid = x_grid;
        cfg.reps = reps;
        cfg.seed = seed;
        auto gap = poissonization_gap(cfg, gen);
        GapLadderPoint p{n, M, cfg.m_values.front(), gap.mean_gap(cfg.m_values.front())};
        ladder.points.push_back(p);
        if (p.mean_gap > 0)
        {
            lx.push_back(std::log(static_cast<double>(n)));
            ly.push_back(std::log(p.mean_gap));
        }
    }
    if (lx.size() < 2)
    {
        ladder.decay_exponent = std::numeric_limits<double>::quiet_NaN();
        return ladder;
    }
    double const mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    double const my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    ladder.decay_exponent = -sxy / sxx;
    return ladder;
}

//---------------------------------------------------------------------------//
std::vector<ConcentrationRow> concentration_audit(StudyConfig const& config,
                                                  std::vector<double> const& deltas)
{
    config.validate();
    if (deltas.empty())
        throw ConfigError("deltas is empty");
    for (double d : deltas)
        if (!(d > 0))
            throw ConfigError("every delta must be positive");

    auto gen = generator_by_name(config.generator);
    CellModel const cells = cells_from_generator(gen, config.num_cells);
    MultinomialSampler const sampler(cells);
    std::size_t const nm = config.m_values.size();
    std::size_t const nd = deltas.size();

    std::vector<GroupedModel> grouped;
    for (auto m : config.m_values)
        grouped.push_back(group_model(cells, GroupingScheme::make(config.num_cells, m, config.ordered)));

    std::vector<double> refs(2 * nm * nd, 0.0);
    auto moments = replicate(
        config.reps, config.threads, refs,
        [&] {
            return [&](std::uint64_t r, std::vector<double>& out) {
                Rng rng(RngStream{config.seed, r});
                auto coupled = sampler.draw_coupled(config.n, rng);
                for (std::size_t mi = 0; mi < nm; ++mi)
                {
                    auto const& gm = grouped[mi];
                    auto scheme = GroupingScheme::make(config.num_cells, config.m_values[mi], config.ordered);
                    auto q = gm.probabilities();
                    double const m = static_cast<double>(q.size());
                    double const ratio = m / static_cast<double>(config.n);
                    for (int which = 0; which < 2; ++which)
                    {
                        auto const& counts = which == 0 ? coupled.multinomial : coupled.poissonized;
                        auto g = group_counts(counts, scheme, gm.cell_order());
                        double dev = 0;
                        for (std::size_t j = 0; j < q.size(); ++j)
                            dev = std::max(dev, std::fabs(ratio * static_cast<double>(g.counts[j]) - m * q[j]));
                        for (std::size_t di = 0; di < nd; ++di)
                            out[(mi * nd + di) * 2 + which] = dev >= deltas[di] ? 1.0 : 0.0;
                    }
                }
            };
        });

    std::vector<ConcentrationRow> rows;
    for (std::size_t mi = 0; mi < nm; ++mi)
    {
        for (std::size_t di = 0; di < nd; ++di)
        {
            ConcentrationRow row;
            row.m = config.m_values[mi];
            row.delta = deltas[di];
            row.multinomial_frequency = moments[(mi * nd + di) * 2].mean;
            row.poissonized_frequency = moments[(mi * nd + di) * 2 + 1].mean;
            row.bound = poissonization_union_bound(grouped[mi], config.n, deltas[di]);
            row.consistent = row.bound >= 1
                             || (row.multinomial_frequency <= row.bound
                                 && row.poissonized_frequency <= row.bound);
            rows.push_back(row);
        }
    }
    return rows;
}

//---------------------------------------------------------------------------//
std::vector<SupDistanceRow> sup_distance_study(StudyConfig const& config)
{
    config.validate();
    auto gen = generator_by_name(config.generator);
    CellModel const cells = cells_from_generator(gen, config.num_cells);
    MultinomialSampler const sampler(cells);
    auto F = std::make_shared<LimitSdf const>(gen);
    std::function<double(double)> Ffn = [F](double x) { return (*F)(x); };

    std::vector<GroupedModel> grouped;
    for (auto m : config.m_values)
        grouped.push_back(group_model(cells, GroupingScheme::make(config.num_cells, m, config.ordered)));

    std::vector<double> refs(config.m_values.size(), 0.0);
    auto moments = replicate(
        config.reps, config.threads, refs,
        [&] {
            return [&](std::uint64_t r, std::vector<double>& out) {
                RngStream stream{config.seed, r};
                CountsVector counts;
                if (config.poissonized)
                {
                    counts = draw_poissonized(cells, config.n, stream);
                }
                else
                {
                    Rng rng(stream);
                    counts = sampler.draw(config.n, rng);
                }
                for (std::size_t mi = 0; mi < config.m_values.size(); ++mi)
                {
                    auto scheme = GroupingScheme::make(config.num_cells, config.m_values[mi], config.ordered);
                    auto est = grouped_estimator(counts, scheme, config.n, grouped[mi].cell_order());
                    out[mi] = sup_distance(est.cdf, Ffn);
                }
            };
        });

    std::vector<SupDistanceRow> rows;
    for (std::size_t mi = 0; mi < config.m_values.size(); ++mi)
    {
        rows.push_back(SupDistanceRow{config.m_values[mi], moments[mi].mean,
                                      std::sqrt(moments[mi].variance() / moments[mi].count)});
    }
    return rows;
}
}  // namespace sdfest
