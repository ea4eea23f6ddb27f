#include "epitest/config.hpp"
#include "epitest/errors.hpp"
#include "epitest/ingest.hpp"
#include "epitest/regression.hpp"
#include "epitest/report.hpp"
#include "epitest/simulator.hpp"
#include "epitest/stats.hpp"
#include "epitest/testing_models.hpp"
#include "epitest/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace epitest;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct RunConfig {
    std::string input;
    std::string schema = "world";
    std::string model = "all";
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string units = "million";
    std::string lockdown_fixture;
    std::string config;
};

// Values from --config fill in options not given on the command line.
void apply_config_file(CLI::App& cmd, RunConfig& rc)
{
    if (rc.config.empty())
        return;
    const KeyValueConfig cfg = KeyValueConfig::load(rc.config);
    cfg.reject_unknown({"input", "schema", "model", "folds", "seed", "out", "units", "lockdown_fixture"});
    const auto unset = [&](const char* flag) { return cmd.count(flag) == 0; };
    if (unset("--input"))
        rc.input = cfg.get_string("input", rc.input);
    if (unset("--schema"))
        rc.schema = cfg.get_string("schema", rc.schema);
    if (unset("--model"))
        rc.model = cfg.get_string("model", rc.model);
    if (unset("--out"))
        rc.out = cfg.get_string("out", rc.out);
    if (unset("--units"))
        rc.units = cfg.get_string("units", rc.units);
    if (unset("--lockdown-fixture"))
        rc.lockdown_fixture = cfg.get_string("lockdown_fixture", rc.lockdown_fixture);
    const auto integer = [&](const char* key) -> std::optional<std::uint64_t> {
        const auto v = cfg.get_number(key);
        if (!v)
            return std::nullopt;
        if (*v < 0 || *v != std::floor(*v))
            throw ConfigError(std::string("config: ") + key + " must be a non-negative integer");
        return static_cast<std::uint64_t>(*v);
    };
    if (unset("--folds"))
        if (const auto v = integer("folds"))
            rc.folds = static_cast<std::size_t>(*v);
    if (unset("--seed"))
        if (const auto v = integer("seed"))
            rc.seed = *v;
}

double units_scale(const std::string& units)
{
    if (units == "million")
        return 1e6;
    if (units == "person")
        return 1.0;
    throw ConfigError("unknown units: " + units + " (expected million or person)");
}

std::vector<TestingKind> requested_models(const std::string& name)
{
    if (name == "all")
        return {TestingKind::adapted, TestingKind::limiting, TestingKind::up_saturating,
                TestingKind::down_saturating};
    return {parse_testing_kind(name)};
}

std::string short_name(TestingKind kind)
{
    switch (kind) {
    case TestingKind::up_saturating:
        return "up";
    case TestingKind::down_saturating:
        return "down";
    default:
        return std::string(to_string(kind));
    }
}

std::string file_slug(const std::string& name)
{
    std::string slug;
    for (char c : name)
        slug += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return slug;
}

fs::path ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ConfigError("cannot create output directory " + dir.string());
    return dir;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    return out;
}

std::string cell(const std::optional<double>& v)
{
    return v ? format_number(*v) : std::string();
}

void print_warnings(const std::vector<RegionRecord>& records)
{
    for (const auto& r : records)
        for (const auto& w : r.warnings)
            std::cerr << "warning: " << r.name << ": " << w << '\n';
}

json optional_test(const std::function<stats::TestResult()>& run)
{
    try {
        return to_json(run());
    } catch (const DomainError&) {
        return nullptr;
    }
}

// -- validate ---------------------------------------------------------------

// Predicted curve scaled by the geometric-mean ratio to the observations.
std::optional<DailySeries> scaled_prediction(const PreparedRegion& region, const TestingModel& model,
                                             const PipelineOptions& options)
{
    DailySeries predicted = predict_region_deaths(region, model, options);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < region.qualifying.size(); ++k) {
        const Date day = region.start + static_cast<std::int32_t>(region.qualifying[k]);
        const auto v = predicted.contains(day) ? predicted.at(day) : std::nullopt;
        if (v && *v > 0.0) {
            sum += region.log_observed[k] - std::log(*v);
            ++n;
        }
    }
    if (n == 0)
        return std::nullopt;
    const double factor = std::exp(sum / static_cast<double>(n));
    std::vector<std::optional<double>> values = predicted.values();
    for (auto& v : values)
        if (v)
            *v *= factor;
    return DailySeries(predicted.start(), std::move(values), false);
}

int cmd_validate(const RunConfig& rc, bool covariates)
{
    const Schema schema = parse_schema(rc.schema);
    const std::vector<TestingKind> kinds = requested_models(rc.model);
    for (TestingKind k : kinds)
        if (is_saturating(k) && rc.folds < 2)
            throw ConfigError("--folds must be at least 2 for the " + std::string(to_string(k)) + " model");
    if (rc.input.empty())
        throw ConfigError("--input is required");

    const auto records = parse_surveillance_file(rc.input, schema);
    print_warnings(records);
    const auto selected = select_regions_for_validation(records);
    if (selected.empty())
        throw DataError("no region passes the validation selection");
    std::vector<PreparedRegion> regions;
    for (const auto& r : selected)
        regions.push_back(prepare_region(r));

    const FitOptions options;
    const fs::path out = ensure_dir(rc.out);
    std::map<TestingKind, ValidationReport> reports;
    json models = json::object();
    for (TestingKind k : kinds) {
        reports[k] = cross_validate(regions, k, rc.folds, rc.seed, covariates, options);
        models[short_name(k)] = to_json(reports[k]);
        std::cerr << to_string(k) << ": averaged error " << format_number(round_significant(reports[k].averaged_error))
                  << '\n';
    }

    json comparisons = json::array();
    for (std::size_t a = 0; a < kinds.size(); ++a) {
        for (std::size_t b = a + 1; b < kinds.size(); ++b) {
            const auto& ea = reports[kinds[a]].per_region_normalized_error;
            const auto& eb = reports[kinds[b]].per_region_normalized_error;
            std::vector<double> x, y;
            for (const auto& [name, v] : ea)
                if (const auto it = eb.find(name); it != eb.end()) {
                    x.push_back(v);
                    y.push_back(it->second);
                }
            comparisons.push_back({{"first", short_name(kinds[a])},
                                   {"second", short_name(kinds[b])},
                                   {"wilcoxon", optional_test([&] { return stats::wilcoxon_signed_rank(x, y); })}});
        }
    }

    json region_names = json::array();
    for (const auto& r : regions)
        region_names.push_back(r.name);
    json document = {{"input", fs::path(rc.input).filename().string()},
                     {"schema", std::string(to_string(schema))},
                     {"folds", rc.folds},
                     {"seed", rc.seed},
                     {"regions", region_names},
                     {"models", models},
                     {"comparisons", comparisons}};
    auto report_out = open_output(out / "report.json");
    write_json(report_out, document);

    // Plot tables use the median fold alpha; covariate fits have no single alpha.
    std::map<std::string, std::optional<TestingModel>> plot_models;
    for (TestingKind k : {TestingKind::adapted, TestingKind::limiting, TestingKind::up_saturating,
                          TestingKind::down_saturating}) {
        const auto it = reports.find(k);
        if (it == reports.end())
            plot_models[short_name(k)] = std::nullopt;
        else if (!is_saturating(k))
            plot_models[short_name(k)] = TestingModel::make(k, std::nullopt);
        else if (it->second.alpha_median)
            plot_models[short_name(k)] = TestingModel::make(k, *it->second.alpha_median);
        else
            plot_models[short_name(k)] = std::nullopt;
    }
    const fs::path deaths_dir = ensure_dir(out / "deaths");
    const std::vector<std::string> columns = {"adapted", "limiting", "up", "down"};
    for (const auto& region : regions) {
        std::map<std::string, std::optional<DailySeries>> curves;
        for (const auto& c : columns)
            curves[c] = plot_models[c] ? scaled_prediction(region, *plot_models[c], options.pipeline) : std::nullopt;
        auto csv = open_output(deaths_dir / (file_slug(region.name) + ".csv"));
        csv << "date,observed,predicted_adapted,predicted_limiting,predicted_up,predicted_down\n";
        for (std::size_t i = 0; i < region.observed_deaths.size(); ++i) {
            const Date day = region.start + static_cast<std::int32_t>(i);
            csv << day.to_string() << ',' << cell(region.observed_deaths[i]);
            for (const auto& c : columns) {
                const auto& curve = curves[c];
                csv << ',' << (curve && curve->contains(day) ? cell(curve->at(day)) : std::string());
            }
            csv << '\n';
        }
    }
    return 0;
}

// -- adjust -----------------------------------------------------------------

int cmd_adjust(const RunConfig& rc, double alpha_up, double alpha_down)
{
    const Schema schema = parse_schema(rc.schema);
    const double scale = units_scale(rc.units);
    if (rc.input.empty())
        throw ConfigError("--input is required");
    if (!(alpha_up > 0.0) || !(alpha_down > 0.0) || alpha_down >= alpha_up)
        throw ConfigError("thresholds must satisfy 0 < alpha-down < alpha-up");
    const LinearityRange range = linearity_range(TestingModel::up_saturating(alpha_up / scale),
                                                 TestingModel::down_saturating(alpha_down / scale));
    const TestingModel model = TestingModel::up_saturating(alpha_up / scale);

    const auto records = parse_surveillance_file(rc.input, schema, ParseRequirements{true, false, false});
    print_warnings(records);
    bool any_tests = false;
    for (const auto& r : records)
        any_tests = any_tests || r.has_tests();
    if (!any_tests)
        throw DataError("input has no test data");

    const fs::path dir = ensure_dir(fs::path(rc.out) / "adjusted");
    const std::string tests_column = rc.units == "million" ? "tests_per_million" : "tests_per_person";
    for (const auto& r : records) {
        if (!r.has_tests()) {
            std::cerr << "warning: " << r.name << ": no test data, skipped\n";
            continue;
        }
        const DailySeries rate = r.test_rate();
        auto csv = open_output(dir / (file_slug(r.name) + ".csv"));
        csv << "date,cases," << tests_column << ",prevalence_estimate,in_linearity_range\n";
        for (std::size_t i = 0; i < r.days(); ++i) {
            const auto y = r.new_cases[i];
            const auto t = rate[i];
            std::optional<double> prevalence;
            if (y && t && eval_f(model, *t) > 0.0)
                prevalence = estimate_prevalence(*y, *t, model);
            const bool in_range = t && *t > 0.0 && range.contains(*t);
            csv << (r.start() + static_cast<std::int32_t>(i)).to_string() << ',' << cell(y) << ','
                << (t ? format_number(*t * scale) : std::string()) << ',' << cell(prevalence) << ','
                << (in_range ? "true" : "false") << '\n';
        }
    }
    return 0;
}

// -- lockdown ---------------------------------------------------------------

struct RegionDate {
    Date date;
    std::string source;
};

int cmd_lockdown(const RunConfig& rc, double alpha_up, const std::vector<std::string>& overrides)
{
    const Schema schema = parse_schema(rc.schema);
    const double scale = units_scale(rc.units);
    if (rc.input.empty())
        throw ConfigError("--input is required");
    std::string fixture = rc.lockdown_fixture;
    if (fixture.empty())
        fixture = schema == Schema::us_states ? "us_states" : "world_first";
    const bool second = fixture == "world_second" || fixture == "stringency";

    std::map<std::string, RegionDate> dates;
    if (fixture != "stringency")
        for (const auto& [name, date] : load_lockdown_dates(fixture).entries)
            dates[name] = {date, fixture};
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--date expects REGION=YYYY-MM-DD, got " + o);
        try {
            dates[std::string(trim(o.substr(0, eq)))] = {Date::parse(trim(o.substr(eq + 1))), "override"};
        } catch (const DataError& e) {
            throw ConfigError(std::string("--date: ") + e.what());
        }
    }

    const auto records = parse_surveillance_file(rc.input, schema);
    print_warnings(records);
    const std::vector<std::pair<std::string, TestingModel>> models = {
        {"adapted", TestingModel::adapted()}, {"up", TestingModel::up_saturating(alpha_up / scale)}};

    const fs::path out = ensure_dir(rc.out);
    auto csv = open_output(out / "causal_effects.csv");
    csv << "region,lockdown,date_source,pre_first,pre_last,during_first,during_last,model,lambda_pre,se_pre,"
           "lambda_during,se_during,theta\n";
    std::map<std::string, std::map<std::string, CausalEstimate>> estimates;
    json excluded = json::object();
    json sources = json::object();
    const SelectionCriteria criteria;
    for (const auto& record : records) {
        const auto found = dates.find(record.name);
        if (fixture != "stringency" && found == dates.end())
            continue;
        try {
            if (!testing_is_regular(record, criteria.max_testing_gap_days))
                throw ExclusionError("testing is not reported at least weekly");
            LockdownWindows windows;
            std::string source;
            if (found != dates.end()) {
                source = found->second.source;
                windows = second ? second_lockdown_windows(found->second.date)
                                 : build_windows_first_lockdown(record, found->second.date, record.mobility);
            } else {
                source = "stringency";
                windows = build_windows_second_lockdown(record, record.stringency);
            }
            windows.validate();
            std::map<std::string, CausalEstimate> per_model;
            for (const auto& [label, model] : models)
                per_model[label] = estimate_growth_and_effect(record, windows, model);
            for (const auto& [label, e] : per_model) {
                csv << record.name << ',' << windows.lockdown.to_string() << ',' << source << ','
                    << windows.pre.first.to_string() << ',' << windows.pre.last.to_string() << ','
                    << windows.during.first.to_string() << ',' << windows.during.last.to_string() << ',' << label
                    << ',' << format_number(e.lambda_pre) << ',' << format_number(e.se_pre) << ','
                    << format_number(e.lambda_during) << ',' << format_number(e.se_during) << ','
                    << format_number(e.theta) << '\n';
            }
            estimates[record.name] = std::move(per_model);
            sources[record.name] = {{"date", windows.lockdown.to_string()}, {"source", source}};
        } catch (const DataError& e) {
            excluded[record.name] = e.what();
        } catch (const DomainError& e) {
            excluded[record.name] = e.what();
        }
    }
    for (const auto& [name, d] : dates)
        if (!sources.contains(name) && !excluded.contains(name))
            excluded[name] = "region not in input";
    if (estimates.empty())
        throw DataError("no region yields valid lockdown windows");

    const auto column = [&](const std::string& label, double CausalEstimate::*field) {
        std::vector<double> v;
        for (const auto& [name, per_model] : estimates)
            v.push_back(per_model.at(label).*field);
        return v;
    };
    const std::vector<std::pair<std::string, double CausalEstimate::*>> fields = {
        {"lambda_pre", &CausalEstimate::lambda_pre},
        {"lambda_during", &CausalEstimate::lambda_during},
        {"theta", &CausalEstimate::theta}};
    json per_model = json::object();
    for (const auto& [label, model] : models) {
        json m = {{"model", std::string(to_string(model.kind))}};
        if (model.alpha)
            m["alpha"] = json_number(*model.alpha);
        for (const auto& [fname, field] : fields) {
            const auto v = column(label, field);
            m[fname] = {{"median", json_number(stats::median(v))},
                        {"wilcoxon_vs_zero", optional_test([&] { return stats::wilcoxon_signed_rank(v); })}};
        }
        per_model[label] = m;
    }
    json paired = json::object();
    for (const auto& [fname, field] : fields) {
        const auto a = column("adapted", field);
        const auto u = column("up", field);
        paired[fname] = optional_test([&] { return stats::wilcoxon_signed_rank(a, u); });
    }
    json overrides_json = json::array();
    for (const auto& o : overrides)
        overrides_json.push_back(o);
    const json summary = {{"input", fs::path(rc.input).filename().string()},
                          {"lockdown_fixture", fixture},
                          {"date_overrides", overrides_json},
                          {"regions", estimates.size()},
                          {"lockdown_dates", sources},
                          {"excluded", excluded},
                          {"models", per_model},
                          {"paired_adapted_vs_up", paired}};
    auto summary_out = open_output(out / "summary.json");
    write_json(summary_out, summary);
    return 0;
}

// -- simulate ---------------------------------------------------------------

int cmd_simulate(const RunConfig& rc, bool noise_free, bool seed_given)
{
    WorldSpec world;
    if (!rc.config.empty())
        world = load_world_spec(KeyValueConfig::load(rc.config));
    if (seed_given)
        world.base.seed = rc.seed;
    world.validate();
    const auto records = simulate_world(world, noise_free);
    const fs::path out = ensure_dir(rc.out);
    auto data = open_output(out / "data.csv");
    write_surveillance_csv(data, records);
    json params = json::object();
    for (const auto& [key, value] : describe(world))
        params[key] = value;
    json regions = json::array();
    for (const auto& s : world_scenarios(world)) {
        json r = {{"name", s.name},
                  {"initial_prevalence", json_number(s.initial_prevalence)},
                  {"lambda0", json_number(s.lambda0)},
                  {"theta0", json_number(s.theta0)},
                  {"lockdown_day", s.lockdown_day},
                  {"lockdown_date", (s.start + s.lockdown_day).to_string()},
                  {"test_rate0", json_number(s.tests.initial_rate)},
                  {"test_growth_pre", json_number(s.tests.growth_pre)},
                  {"test_growth_post", json_number(s.tests.growth_post)},
                  {"seed", s.seed}};
        if (s.model.alpha)
            r["alpha"] = json_number(*s.model.alpha);
        regions.push_back(r);
    }
    const json meta = {{"parameters", params}, {"noise_free", noise_free}, {"regions", regions}};
    auto meta_out = open_output(out / "data.meta.json");
    write_json(meta_out, meta);
    return 0;
}

void add_common(CLI::App* cmd, RunConfig& rc)
{
    cmd->add_option("--input", rc.input, "Surveillance CSV");
    cmd->add_option("--schema", rc.schema, "Input schema: world or us_states");
    cmd->add_option("--out", rc.out, "Output directory");
    cmd->add_option("--config", rc.config, "key=value configuration file");
    cmd->add_option("--units", rc.units, "Test-rate units for input and output: million or person");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Testing-regime models for surveillance data"};
    app.require_subcommand(1);
    RunConfig rc;
    bool covariates = false;
    bool noise_free = false;
    double alpha_up = 1710.0;
    double alpha_down = 38.0;
    std::vector<std::string> overrides;

    auto* validate = app.add_subcommand("validate", "Cross-validate testing models against deaths");
    add_common(validate, rc);
    validate->add_option("--model", rc.model, "adapted, limiting, up, down or all");
    validate->add_option("--folds", rc.folds, "Cross-validation folds");
    validate->add_option("--seed", rc.seed, "Fold assignment seed");
    validate->add_flag("--covariates", covariates, "Fit alpha as a linear function of region covariates");

    auto* adjust = app.add_subcommand("adjust", "Prevalence estimates from cases and tests");
    add_common(adjust, rc);
    adjust->add_option("--alpha-up", alpha_up, "Up-saturating threshold, in --units");
    adjust->add_option("--alpha-down", alpha_down, "Down-saturating threshold, in --units");

    auto* lockdown = app.add_subcommand("lockdown", "Growth rates around lockdowns");
    add_common(lockdown, rc);
    lockdown->add_option("--lockdown-fixture", rc.lockdown_fixture,
                         "world_first, world_second, us_states or stringency");
    lockdown->add_option("--date", overrides, "REGION=YYYY-MM-DD, overrides the fixture");
    lockdown->add_option("--alpha-up", alpha_up, "Up-saturating threshold, in --units");

    auto* simulate = app.add_subcommand("simulate", "Generate synthetic surveillance data");
    simulate->add_option("--config", rc.config, "Scenario file");
    simulate->add_option("--out", rc.out, "Output directory");
    simulate->add_option("--seed", rc.seed, "Overrides the scenario seed");
    simulate->add_flag("--noise-free", noise_free, "Write expected counts instead of Poisson draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (validate->parsed()) {
            apply_config_file(*validate, rc);
            return cmd_validate(rc, covariates);
        }
        if (adjust->parsed()) {
            apply_config_file(*adjust, rc);
            return cmd_adjust(rc, alpha_up, alpha_down);
        }
        if (lockdown->parsed()) {
            apply_config_file(*lockdown, rc);
            return cmd_lockdown(rc, alpha_up, overrides);
        }
        return cmd_simulate(rc, noise_free, simulate->count("--seed") > 0);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
