#include "epitest/config.hpp"
#include "epitest/errors.hpp"
#include "epitest/ingest.hpp"
#include "epitest/mortality.hpp"
#include "epitest/regression.hpp"
#include "epitest/report.hpp"
#include "epitest/simulator.hpp"
#include "epitest/stats.hpp"
#include "epitest/testing_models.hpp"
#include "epitest/validation.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <sstream>

namespace py = pybind11;
using namespace epitest;

namespace {

const Date kAnchor(2020, 1, 1);

TestingModel make_model(const std::string& kind, std::optional<double> alpha, double kappa)
{
    TestingModel m = TestingModel::make(parse_testing_kind(kind), alpha, kappa);
    m.validate();
    return m;
}

std::vector<double> dense_or_nan(const DailySeries& s)
{
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = s[i] ? *s[i] : std::numeric_limits<double>::quiet_NaN();
    return out;
}

stats::Alternative parse_alternative(const std::string& text)
{
    if (text == "two_sided" || text == "two-sided")
        return stats::Alternative::two_sided;
    if (text == "less")
        return stats::Alternative::less;
    if (text == "greater")
        return stats::Alternative::greater;
    throw ConfigError("alternative must be two_sided, less or greater");
}

std::string dump(const nlohmann::json& j)
{
    return j.dump();
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Testing-regime models for epidemic surveillance data";

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    m.def(
        "testing_function",
        [](const std::string& kind, double tests, std::optional<double> alpha, double kappa) {
            return eval_f(make_model(kind, alpha, kappa), tests);
        },
        py::arg("kind"), py::arg("tests_per_person"), py::arg("alpha") = py::none(), py::arg("kappa") = 1.0,
        "f(T) for a testing regime; T and alpha in tests/person/day.");

    m.def(
        "estimate_prevalence",
        [](const std::vector<double>& cases, const std::vector<double>& tests, const std::string& kind,
           std::optional<double> alpha, double kappa) {
            const DailySeries c = DailySeries::from_values(kAnchor, cases);
            const DailySeries t = tests.empty() ? DailySeries() : DailySeries::from_values(kAnchor, tests);
            return dense_or_nan(estimate_prevalence(c, t, make_model(kind, alpha, kappa)));
        },
        py::arg("cases"), py::arg("tests_per_person"), py::arg("kind"), py::arg("alpha") = py::none(),
        py::arg("kappa") = 1.0, "Day-wise Y / f(T); NaN where f(T) is zero.");

    m.def(
        "onset_to_death_pmf", [](std::size_t horizon) { return build_onset_to_death_pmf(horizon).probs; },
        py::arg("horizon") = kDefaultPmfHorizon);

    m.def(
        "incidence",
        [](const std::vector<double>& prevalence, double gamma) {
            return incidence_from_prevalence(DailySeries::from_values(kAnchor, prevalence), RecoveryRate(gamma))
                .incidence.dense();
        },
        py::arg("prevalence"), py::arg("gamma") = RecoveryRate::kDefault);

    m.def(
        "predict_deaths",
        [](const std::vector<double>& incidence) { return convolve_pmf(incidence, build_onset_to_death_pmf()); },
        py::arg("incidence"), "Incidence convolved with the onset-to-death distribution, up to the ifr.");

    m.def(
        "prediction_error",
        [](const std::vector<double>& observed, const std::vector<double>& predicted) {
            return prediction_error(DailySeries::from_values(kAnchor, observed),
                                    DailySeries::from_values(kAnchor, predicted));
        },
        py::arg("observed"), py::arg("predicted"));

    m.def(
        "poisson_regress_json",
        [](const std::vector<double>& counts, const std::vector<double>& t, std::vector<double> offset) {
            if (offset.empty())
                offset.assign(counts.size(), 0.0);
            return dump(to_json(poisson_regress(counts, t, offset)));
        },
        py::arg("counts"), py::arg("t"), py::arg("offset") = std::vector<double>{});

    m.def(
        "wilcoxon_json",
        [](const std::vector<double>& x, const std::vector<double>& y, const std::string& alternative) {
            return dump(to_json(stats::wilcoxon_signed_rank(x, y, parse_alternative(alternative))));
        },
        py::arg("x"), py::arg("y"), py::arg("alternative") = "two_sided");

    m.def(
        "kruskal_wallis_json",
        [](const std::vector<std::vector<double>>& groups) { return dump(to_json(stats::kruskal_wallis(groups))); },
        py::arg("groups"));

    m.def(
        "median_ci",
        [](const std::vector<double>& values, double confidence) {
            const stats::MedianInterval ci = stats::median_ci(values, confidence);
            return py::make_tuple(ci.median, ci.lower, ci.upper, ci.coverage);
        },
        py::arg("values"), py::arg("confidence") = 0.95);

    m.def(
        "simulate_csv",
        [](const std::string& config_path, std::optional<std::uint64_t> seed, bool noise_free) {
            WorldSpec world = load_world_spec(KeyValueConfig::load(config_path));
            if (seed)
                world.base.seed = *seed;
            std::ostringstream out;
            write_surveillance_csv(out, simulate_world(world, noise_free));
            return out.str();
        },
        py::arg("config_path"), py::arg("seed") = py::none(), py::arg("noise_free") = false);

    m.def(
        "cross_validate_json",
        [](const std::string& path, const std::string& model, std::size_t folds, std::uint64_t seed,
           const std::string& schema, bool covariates) {
            std::vector<PreparedRegion> regions;
            {
                py::gil_scoped_release release;
                for (const auto& r : select_regions_for_validation(parse_surveillance_file(path, parse_schema(schema))))
                    regions.push_back(prepare_region(r));
            }
            if (regions.empty())
                throw DataError("no region passes the validation selection");
            ValidationReport report;
            {
                py::gil_scoped_release release;
                report = cross_validate(regions, parse_testing_kind(model), folds, seed, covariates);
            }
            return dump(to_json(report));
        },
        py::arg("path"), py::arg("model") = "up", py::arg("folds") = 10, py::arg("seed") = 0,
        py::arg("schema") = "world", py::arg("covariates") = false);
}
