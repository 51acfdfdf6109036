#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdfest/asymptotics.hpp"
#include "sdfest/error.hpp"
#include "sdfest/estimators.hpp"
#include "sdfest/generators.hpp"
#include "sdfest/ingest.hpp"
#include "sdfest/model.hpp"
#include "sdfest/sampling.hpp"
#include "sdfest/step_cdf.hpp"
#include "sdfest/study.hpp"

namespace py = pybind11;
using namespace sdfest;

namespace
{
template<class T>
py::array_t<T> to_array(std::span<T const> values)
{
    return py::array_t<T>(values.size(), values.data());
}

CountsVector make_counts(std::vector<std::uint64_t> counts, std::uint64_t n, bool poissonized)
{
    std::uint64_t total = 0;
    for (auto c : counts)
        total += c;
    return CountsVector{poissonized ? CountsKind::poissonized : CountsKind::multinomial,
                        std::move(counts), n ? n : total, total};
}
}  // namespace

PYBIND11_MODULE(_core, mod)
{
    mod.doc() = "Structural distribution function estimation for large multinomials";

    auto config_error = py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
    py::register_exception<EncodingError>(mod, "EncodingError", config_error.ptr());
    py::register_exception<NumericError>(mod, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(mod, "IoError", PyExc_OSError);

    //// STEP CDF ////
    py::class_<StepCdf>(mod, "StepCdf")
        .def(py::init([](std::vector<double> const& locations, std::vector<double> const& masses) {
                 if (locations.size() != masses.size())
                     throw ConfigError("locations and masses differ in length");
                 std::vector<Jump> jumps;
                 for (std::size_t i = 0; i < locations.size(); ++i)
                     jumps.push_back({locations[i], masses[i]});
                 return StepCdf(std::move(jumps));
             }),
             py::arg("locations"), py::arg("masses"))
        .def_static("from_sample",
                    [](std::vector<double> const& v) { return StepCdf::from_sample(v); })
        .def("__call__", &StepCdf::operator(), py::arg("x"))
        .def("__call__", py::vectorize(&StepCdf::operator()))
        .def("left_limit", &StepCdf::left_limit)
        .def("__len__", &StepCdf::size)
        .def_property_readonly("locations",
                               [](StepCdf const& F) {
                                   std::vector<double> x;
                                   for (auto j : F.jumps())
                                       x.push_back(j.location);
                                   return x;
                               })
        .def_property_readonly("masses",
                               [](StepCdf const& F) {
                                   std::vector<double> w;
                                   for (auto j : F.jumps())
                                       w.push_back(j.mass);
                                   return w;
                               })
        .def_property_readonly("cumulative",
                               [](StepCdf const& F) { return to_array(F.cumulative()); });

    mod.def("sup_distance", py::overload_cast<StepCdf const&, StepCdf const&>(&sup_distance),
            py::arg("a"), py::arg("b"));

    //// MODEL ////
    py::class_<CellModel>(mod, "CellModel")
        .def(py::init<std::vector<double>>(), py::arg("probabilities"))
        .def_property_readonly("num_cells", &CellModel::num_cells)
        .def_property_readonly("probabilities",
                               [](CellModel const& c) { return to_array(c.probabilities()); });

    py::class_<GroupingScheme>(mod, "GroupingScheme")
        .def_static("make", &GroupingScheme::make, py::arg("num_cells"), py::arg("num_groups"),
                    py::arg("ordered") = false)
        .def_readonly("num_cells", &GroupingScheme::num_cells)
        .def_readonly("num_groups", &GroupingScheme::num_groups)
        .def_readonly("group_size", &GroupingScheme::group_size)
        .def_readonly("ordered", &GroupingScheme::ordered);

    py::class_<GroupedModel>(mod, "GroupedModel")
        .def_property_readonly("num_groups", &GroupedModel::num_groups)
        .def_property_readonly("probabilities",
                               [](GroupedModel const& g) { return to_array(g.probabilities()); });

    mod.def("structural_cdf", &structural_cdf, py::arg("cells"));
    mod.def("group_model", &group_model, py::arg("cells"), py::arg("scheme"));
    mod.def("grouped_structural_cdf", &grouped_structural_cdf, py::arg("grouped"));

    //// GENERATORS ////
    py::class_<SmoothGenerator>(mod, "SmoothGenerator")
        .def_readonly("name", &SmoothGenerator::name)
        .def_readonly("density_bound", &SmoothGenerator::density_bound)
        .def_readonly("density_slope_bound", &SmoothGenerator::density_slope_bound)
        .def("cdf", [](SmoothGenerator const& g, double u) { return g.cdf(u); })
        .def("density", [](SmoothGenerator const& g, double u) { return g.density(u); })
        .def("has_bounded_density", &SmoothGenerator::has_bounded_density);

    mod.def("example_generator", &example_generator);
    mod.def("uniform_generator", &uniform_generator);
    mod.def("power_generator", &power_generator, py::arg("exponent"));
    mod.def("generator_by_name", &generator_by_name, py::arg("name"));
    mod.def("cells_from_generator", &cells_from_generator, py::arg("generator"),
            py::arg("num_cells"));
    mod.def(
        "limit_sdf",
        [](SmoothGenerator const& gen, std::vector<double> const& x) {
            LimitSdf F(gen);
            std::vector<double> out;
            for (double v : x)
                out.push_back(F(v));
            return out;
        },
        py::arg("generator"), py::arg("x"));

    //// SAMPLING ////
    py::class_<CountsVector>(mod, "CountsVector")
        .def_property_readonly("counts",
                               [](CountsVector const& c) {
                                   return to_array(std::span<std::uint64_t const>(c.counts));
                               })
        .def_property_readonly("poissonized",
                               [](CountsVector const& c) {
                                   return c.kind == CountsKind::poissonized;
                               })
        .def_readonly("nominal_size", &CountsVector::nominal_size)
        .def_readonly("realized_size", &CountsVector::realized_size);

    mod.def(
        "counts_vector",
        [](std::vector<std::uint64_t> counts, std::uint64_t n, bool poissonized) {
            return make_counts(std::move(counts), n, poissonized);
        },
        py::arg("counts"), py::arg("n") = 0, py::arg("poissonized") = false);
    mod.def(
        "draw_multinomial",
        [](CellModel const& cells, std::uint64_t n, std::uint64_t seed, std::uint64_t stream) {
            return draw_multinomial(cells, n, RngStream{seed, stream});
        },
        py::arg("cells"), py::arg("n"), py::arg("seed") = 0, py::arg("stream") = 0);
    mod.def(
        "draw_poissonized",
        [](CellModel const& cells, std::uint64_t n, std::uint64_t seed, std::uint64_t stream) {
            return draw_poissonized(cells, n, RngStream{seed, stream});
        },
        py::arg("cells"), py::arg("n"), py::arg("seed") = 0, py::arg("stream") = 0);

    //// ESTIMATORS ////
    py::class_<EstimatorOutput>(mod, "EstimatorOutput")
        .def_readonly("cdf", &EstimatorOutput::cdf)
        .def_readonly("scale", &EstimatorOutput::scale)
        .def_readonly("groups", &EstimatorOutput::groups)
        .def_readonly("n", &EstimatorOutput::n)
        .def_readonly("counts", &EstimatorOutput::counts)
        .def_readonly("jump_counts", &EstimatorOutput::jump_counts)
        .def_property_readonly("kind", [](EstimatorOutput const& e) {
            return e.kind == EstimatorKind::natural ? "natural" : "grouped";
        });

    mod.def("natural_estimator", &natural_estimator, py::arg("counts"), py::arg("num_cells"),
            py::arg("n"));
    mod.def(
        "grouped_estimator",
        [](CountsVector const& counts, GroupingScheme const& scheme, std::uint64_t n) {
            return grouped_estimator(counts, scheme, n);
        },
        py::arg("counts"), py::arg("scheme"), py::arg("n"));

    py::class_<RegimeDiagnostics>(mod, "RegimeDiagnostics")
        .def_readonly("lambda_hat", &RegimeDiagnostics::lambda_hat)
        .def_readonly("consistency_ratio", &RegimeDiagnostics::consistency_ratio)
        .def_readonly("rate_ratio", &RegimeDiagnostics::rate_ratio)
        .def_readonly("in_regime", &RegimeDiagnostics::in_regime)
        .def_readonly("in_rate_regime", &RegimeDiagnostics::in_rate_regime)
        .def_readonly("natural_regime", &RegimeDiagnostics::natural_regime)
        .def_readonly("notes", &RegimeDiagnostics::notes);

    mod.def("check_regime", &check_regime, py::arg("num_cells"), py::arg("n"),
            py::arg("num_groups"), py::arg("alpha") = 0.1, py::arg("threshold") = 5.0);

    //// ASYMPTOTICS ////
    py::class_<BoundParams>(mod, "BoundParams")
        .def(py::init([](double lambda, double tau, double c, double alpha) {
                 BoundParams p{lambda, tau, c, alpha};
                 p.validate();
                 return p;
             }),
             py::arg("lambda_") = 3.0, py::arg("tau") = 2.0, py::arg("c") = 1.0 / 3.0,
             py::arg("alpha") = 0.1)
        .def_readonly("lambda_", &BoundParams::lambda)
        .def_readonly("tau", &BoundParams::tau)
        .def_readonly("c", &BoundParams::c)
        .def_readonly("alpha", &BoundParams::alpha);

    py::enum_<MseRegime>(mod, "MseRegime")
        .value("automatic", MseRegime::automatic)
        .value("large_m", MseRegime::large_m)
        .value("small_m", MseRegime::small_m);

    py::class_<OptimalGroups>(mod, "OptimalGroups")
        .def_readonly("m", &OptimalGroups::m)
        .def_readonly("stated_bound", &OptimalGroups::stated_bound)
        .def_readonly("plugged_bound", &OptimalGroups::plugged_bound)
        .def_readonly("below_threshold", &OptimalGroups::below_threshold);

    mod.def("phi_m", py::overload_cast<double, GroupedModel const&, std::uint64_t>(&phi_m),
            py::arg("t"), py::arg("grouped"), py::arg("n"));
    mod.def("limit_char_natural", &limit_char_natural, py::arg("t"), py::arg("generator"),
            py::arg("lambda_"));
    mod.def("limit_char", &limit_char, py::arg("t"), py::arg("generator"));
    mod.def("poisson_mixture_cdf", &poisson_mixture_cdf, py::arg("x"), py::arg("generator"),
            py::arg("lambda_"));
    mod.def("esseen_bias_bound", &esseen_bias_bound, py::arg("m"), py::arg("n"), py::arg("T"),
            py::arg("params") = BoundParams{});
    mod.def("optimal_T", &optimal_T, py::arg("m"), py::arg("n"), py::arg("params") = BoundParams{});
    mod.def("mse_bound", &mse_bound, py::arg("m"), py::arg("n"), py::arg("params") = BoundParams{},
            py::arg("regime") = MseRegime::automatic);
    mod.def("optimal_m", &optimal_m, py::arg("n"), py::arg("params") = BoundParams{});
    mod.def("integer_argmin_mse_bound", &integer_argmin_mse_bound, py::arg("n"),
            py::arg("params") = BoundParams{}, py::arg("regime") = MseRegime::automatic);
    mod.def("bernstein_poisson_tail", &bernstein_poisson_tail, py::arg("mean"),
            py::arg("epsilon"));

    //// STUDY ////
    py::class_<StudyConfig>(mod, "StudyConfig")
        .def(py::init<>())
        .def_readwrite("generator", &StudyConfig::generator)
        .def_readwrite("num_cells", &StudyConfig::num_cells)
        .def_readwrite("n", &StudyConfig::n)
        .def_readwrite("m_values", &StudyConfig::m_values)
        .def_readwrite("x_grid", &StudyConfig::x_grid)
        .def_readwrite("reps", &StudyConfig::reps)
        .def_readwrite("seed", &StudyConfig::seed)
        .def_readwrite("poissonized", &StudyConfig::poissonized)
        .def_readwrite("ordered", &StudyConfig::ordered)
        .def_readwrite("threads", &StudyConfig::threads)
        .def("validate", &StudyConfig::validate);

    py::class_<MseCell>(mod, "MseCell")
        .def_readonly("m", &MseCell::m)
        .def_readonly("x", &MseCell::x)
        .def_readonly("target", &MseCell::target)
        .def_readonly("mean", &MseCell::mean)
        .def_readonly("bias", &MseCell::bias)
        .def_readonly("variance", &MseCell::variance)
        .def_readonly("mse", &MseCell::mse)
        .def_readonly("mc_standard_error", &MseCell::mc_standard_error)
        .def_readonly("variance_standard_error", &MseCell::variance_standard_error);

    py::class_<MseReport>(mod, "MseReport")
        .def_readonly("config", &MseReport::config)
        .def_readonly("cells", &MseReport::cells)
        .def_readonly("wall_seconds", &MseReport::wall_seconds)
        .def("at", &MseReport::at, py::arg("m"), py::arg("x"),
             py::return_value_policy::reference_internal);

    py::class_<SweepRow>(mod, "SweepRow")
        .def_readonly("m", &SweepRow::m)
        .def_readonly("mse", &SweepRow::mse)
        .def_readonly("bias_sq", &SweepRow::bias_sq)
        .def_readonly("variance", &SweepRow::variance);

    py::class_<SweepResult>(mod, "SweepResult")
        .def_readonly("report", &SweepResult::report)
        .def_readonly("rows", &SweepResult::rows)
        .def_readonly("argmin_m", &SweepResult::argmin_m);

    py::class_<VarianceAuditRow>(mod, "VarianceAuditRow")
        .def_readonly("m", &VarianceAuditRow::m)
        .def_readonly("x", &VarianceAuditRow::x)
        .def_readonly("variance", &VarianceAuditRow::variance)
        .def_readonly("threshold", &VarianceAuditRow::threshold)
        .def_readonly("passed", &VarianceAuditRow::pass);

    // Studies release the GIL; they run their own worker threads
    mod.def(
        "run_mse_study",
        [](StudyConfig const& c) {
            py::gil_scoped_release release;
            return run_mse_study(c);
        },
        py::arg("config"));
    mod.def(
        "sweep_m",
        [](StudyConfig const& c) {
            py::gil_scoped_release release;
            return sweep_m(c);
        },
        py::arg("config"));
    mod.def(
        "variance_audit",
        [](StudyConfig const& c) {
            py::gil_scoped_release release;
            return variance_audit(c);
        },
        py::arg("config"));

    //// INGEST ////
    py::class_<Corpus>(mod, "Corpus")
        .def_readonly("tokens", &Corpus::tokens)
        .def_readonly("words", &Corpus::words)
        .def_readonly("counts", &Corpus::counts)
        .def_property_readonly("n", &Corpus::n)
        .def_property_readonly("num_words", &Corpus::num_words);

    py::class_<CorpusEstimate>(mod, "CorpusEstimate")
        .def_readonly("estimate", &CorpusEstimate::estimate)
        .def_readonly("observed_words", &CorpusEstimate::observed_words)
        .def_readonly("phantom_cells", &CorpusEstimate::phantom_cells)
        .def_readonly("lambda_hat", &CorpusEstimate::lambda_hat)
        .def_readonly("regime", &CorpusEstimate::regime)
        .def_readonly("notes", &CorpusEstimate::notes);

    mod.def(
        "tokenize",
        [](py::bytes text, bool lowercase, bool keep_digits) {
            return tokenize(std::string_view(text), TokenizerConfig{lowercase, keep_digits});
        },
        py::arg("text"), py::arg("lowercase") = true, py::arg("keep_digits") = true);
    mod.def(
        "tokenize",
        [](std::string const& text, bool lowercase, bool keep_digits) {
            return tokenize(text, TokenizerConfig{lowercase, keep_digits});
        },
        py::arg("text"), py::arg("lowercase") = true, py::arg("keep_digits") = true);
    mod.def("estimate_from_corpus", &estimate_from_corpus, py::arg("corpus"), py::arg("m"));
}
