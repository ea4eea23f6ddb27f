#include "epitest/simulator.hpp"

#include "epitest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <limits>
#include <optional>
#include <set>
#include <system_error>

namespace epitest {

namespace {

constexpr double kMaxExpectation = 1e12;

double checked_mean(double mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean) || mean > kMaxExpectation)
        throw DomainError("expected count out of range (must be finite and <= 1e12)");
    return mean;
}

double log_prevalence(const ScenarioSpec& spec, double t)
{
    const double after = t > spec.lockdown_day ? t - spec.lockdown_day : 0.0;
    return std::log(spec.initial_prevalence) + spec.lambda0 * t - spec.theta0 * after;
}

double test_rate_at(const ScenarioSpec& spec, double t)
{
    const double before = std::min(t, static_cast<double>(spec.lockdown_day));
    const double after = std::max(t - spec.lockdown_day, 0.0);
    return spec.tests.initial_rate * std::exp(spec.tests.growth_pre * before + spec.tests.growth_post * after);
}

double mobility_at(const ScenarioSpec& spec, std::int32_t t)
{
    constexpr std::int32_t kRamp = 5;
    const std::int32_t since = t - spec.lockdown_day;
    if (since < 0)
        return 0.0;
    if (since < kRamp)
        return -spec.mobility_reduction * static_cast<double>(since + 1) / kRamp;
    const std::int32_t hold_end = kRamp + spec.mobility_hold_days;
    if (since < hold_end)
        return -spec.mobility_reduction;
    if (spec.mobility_recovery_days <= 0)
        return 0.0;
    const double frac = static_cast<double>(since - hold_end + 1) / spec.mobility_recovery_days;
    return -spec.mobility_reduction * std::max(1.0 - frac, 0.0);
}

std::vector<double> evaluate_f(const DailySeries& prevalence, const DailySeries& test_rate, const TestingModel& model)
{
    std::vector<double> f(prevalence.size());
    for (std::size_t i = 0; i < prevalence.size(); ++i) {
        if (model.kind == TestingKind::adapted) {
            f[i] = eval_f(model, 0.0);
            continue;
        }
        const auto rate = test_rate.at(prevalence.start() + static_cast<std::int32_t>(i));
        if (!rate)
            throw DomainError("test rate missing on a simulated day");
        f[i] = eval_f(model, *rate);
    }
    return f;
}

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

void ScenarioSpec::validate() const
{
    if (!(initial_prevalence > 0.0))
        throw ConfigError("scenario: initial prevalence must be positive");
    if (days < lockdown_day + 15)
        throw ConfigError("scenario: days must be at least lockdown_day + 15");
    if (lockdown_day < 0)
        throw ConfigError("scenario: lockdown_day must be non-negative");
    if (!(tests.initial_rate > 0.0))
        throw ConfigError("scenario: initial test rate must be positive");
    if (!(ifr >= 0.0 && ifr <= 1.0))
        throw ConfigError("scenario: ifr must lie in [0, 1]");
    if (population <= 0)
        throw ConfigError("scenario: population must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw ConfigError("scenario: gamma must lie in (0, 1]");
    try {
        model.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
}

DailySeries simulate_prevalence(const ScenarioSpec& spec)
{
    spec.validate();
    std::vector<double> values(static_cast<std::size_t>(spec.days));
    for (std::int32_t t = 0; t < spec.days; ++t)
        values[static_cast<std::size_t>(t)] = std::exp(log_prevalence(spec, t));
    return DailySeries::from_values(spec.start, values);
}

DailySeries simulate_test_rate(const ScenarioSpec& spec)
{
    spec.validate();
    std::vector<double> values(static_cast<std::size_t>(spec.days));
    for (std::int32_t t = 0; t < spec.days; ++t)
        values[static_cast<std::size_t>(t)] = test_rate_at(spec, t);
    return DailySeries::from_values(spec.start, values);
}

Observations expected_observations(const DailySeries& prevalence, const DailySeries& test_rate,
                                   const TestingModel& model, double ifr, const OnsetToDeathPMF& pmf,
                                   RecoveryRate gamma)
{
    const std::vector<double> prev = prevalence.dense();
    const std::vector<double> f = evaluate_f(prevalence, test_rate, model);
    std::vector<double> cases(prev.size());
    for (std::size_t i = 0; i < prev.size(); ++i)
        cases[i] = checked_mean(prev[i] * f[i]);
    const DailySeries incidence = incidence_from_prevalence(prevalence, gamma).incidence;
    std::vector<double> deaths = convolve_pmf(incidence.dense(), pmf);
    for (double& d : deaths)
        d = checked_mean(ifr * d);
    return {DailySeries::from_values(prevalence.start(), cases), DailySeries::from_values(prevalence.start(), deaths)};
}

Observations simulate_observations(const DailySeries& prevalence, const DailySeries& test_rate,
                                   const TestingModel& model, double ifr, std::uint64_t seed,
                                   const OnsetToDeathPMF& pmf, RecoveryRate gamma)
{
    const Observations expected = expected_observations(prevalence, test_rate, model, ifr, pmf, gamma);
    Rng rng(seed);
    const auto sample = [&](const DailySeries& means) {
        std::vector<double> out(means.size());
        for (std::size_t i = 0; i < means.size(); ++i)
            out[i] = static_cast<double>(rng.poisson(*means[i]));
        return DailySeries::from_values(means.start(), out);
    };
    Observations obs;
    obs.cases = sample(expected.cases);
    obs.deaths = sample(expected.deaths);
    return obs;
}

RegionRecord simulate_region(const ScenarioSpec& spec, bool noise_free)
{
    spec.validate();
    const OnsetToDeathPMF pmf = build_onset_to_death_pmf();
    const auto burn_in = static_cast<std::int32_t>(pmf.horizon());
    const Date history_start = spec.start - burn_in;
    const std::size_t total_days = static_cast<std::size_t>(spec.days + burn_in);
    const double pop = static_cast<double>(spec.population);

    std::vector<double> prevalence(total_days), rate(total_days), tests(total_days);
    for (std::size_t i = 0; i < total_days; ++i) {
        const double t = static_cast<double>(static_cast<std::int32_t>(i) - burn_in);
        prevalence[i] = std::exp(log_prevalence(spec, t));
        const double exact = test_rate_at(spec, std::max(t, 0.0));
        tests[i] = noise_free ? exact * pop : std::round(exact * pop);
        rate[i] = tests[i] / pop;
    }
    const DailySeries prev_series = DailySeries::from_values(history_start, prevalence);
    const DailySeries rate_series = DailySeries::from_values(history_start, rate);
    const Observations obs =
        noise_free ? expected_observations(prev_series, rate_series, spec.model, spec.ifr, pmf, RecoveryRate(spec.gamma))
                   : simulate_observations(prev_series, rate_series, spec.model, spec.ifr, spec.seed, pmf,
                                           RecoveryRate(spec.gamma));

    const auto tail = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + burn_in, v.end());
    };
    const Date last = spec.start + (spec.days - 1);
    const std::vector<double> cases = obs.cases.slice(spec.start, last).dense();
    const std::vector<double> deaths = obs.deaths.slice(spec.start, last).dense();
    RegionRecord record = make_record(spec.name, spec.population, spec.start, cases, tail(tests), deaths);

    std::vector<std::optional<double>> stringency(static_cast<std::size_t>(spec.days));
    std::vector<std::optional<double>> mobility(static_cast<std::size_t>(spec.days));
    for (std::int32_t t = 0; t < spec.days; ++t) {
        stringency[static_cast<std::size_t>(t)] = t < spec.lockdown_day ? spec.stringency_before : spec.stringency_after;
        mobility[static_cast<std::size_t>(t)] = mobility_at(spec, t);
    }
    record.stringency = DailySeries(spec.start, std::move(stringency), false);
    record.mobility = DailySeries::signed_values(spec.start, std::move(mobility));
    record.covariates = spec.covariates;
    return record;
}

void WorldSpec::validate() const
{
    if (regions == 0)
        throw ConfigError("world: at least one region required");
    for (const Range* r : {&initial_prevalence, &lambda0, &theta0, &lockdown_day, &test_rate0, &test_growth_pre,
                           &test_growth_post})
        if (!(r->lo <= r->hi))
            throw ConfigError("world: range minimum exceeds maximum");
    if (covariates.size() > kCovariateNames.size())
        throw ConfigError("world: too many covariates");
    if (!covariate_beta.empty() && covariate_beta.size() != covariates.size() + 1)
        throw ConfigError("world: covariate_beta needs one entry more than the covariates");
    ScenarioSpec probe = base;
    probe.lockdown_day = static_cast<std::int32_t>(std::lround(lockdown_day.hi));
    probe.validate();
}

std::vector<ScenarioSpec> world_scenarios(const WorldSpec& world)
{
    world.validate();
    Rng rng(world.base.seed);
    const auto draw = [&](const Range& r) { return r.lo + (r.hi - r.lo) * rng.uniform(); };
    const std::size_t width = std::to_string(world.regions).size();
    std::vector<ScenarioSpec> scenarios;
    for (std::size_t k = 0; k < world.regions; ++k) {
        ScenarioSpec s = world.base;
        std::string index = std::to_string(k + 1);
        s.name = world.name_prefix + " " + std::string(width - index.size(), '0') + index;
        s.initial_prevalence = draw(world.initial_prevalence);
        s.lambda0 = draw(world.lambda0);
        s.theta0 = draw(world.theta0);
        s.lockdown_day = static_cast<std::int32_t>(std::lround(draw(world.lockdown_day)));
        s.tests.initial_rate = draw(world.test_rate0);
        s.tests.growth_pre = draw(world.test_growth_pre);
        s.tests.growth_post = draw(world.test_growth_post);
        s.seed = rng.next();
        scenarios.push_back(std::move(s));
    }
    // Covariates use their own stream so adding them leaves the other draws unchanged.
    if (!world.covariates.empty()) {
        Rng cov_rng(world.base.seed ^ 0xC0FFEEULL);
        for (auto& s : scenarios) {
            std::vector<double> x;
            for (const auto& r : world.covariates)
                x.push_back(r.lo + (r.hi - r.lo) * cov_rng.uniform());
            for (std::size_t i = 0; i < x.size(); ++i)
                s.covariates[kCovariateNames[i]] = x[i];
            if (!world.covariate_beta.empty()) {
                const double alpha = alpha_from_covariates(world.covariate_beta, x);
                if (!(alpha > 0.0))
                    throw ConfigError("world: covariate alpha must be positive for " + s.name);
                s.model.alpha = alpha;
                s.model.beta.clear();
            }
        }
    }
    return scenarios;
}

std::vector<RegionRecord> simulate_world(const WorldSpec& world, bool noise_free)
{
    std::vector<RegionRecord> records;
    for (const auto& s : world_scenarios(world))
        records.push_back(simulate_region(s, noise_free));
    return records;
}

namespace {

const std::vector<std::string> kRangedKeys = {"initial_prevalence", "lambda0",          "theta0",
                                              "lockdown_day",       "test_rate0",       "test_growth_pre",
                                              "test_growth_post"};

Range* ranged_field(WorldSpec& w, std::string_view key)
{
    if (key == "initial_prevalence") return &w.initial_prevalence;
    if (key == "lambda0") return &w.lambda0;
    if (key == "theta0") return &w.theta0;
    if (key == "lockdown_day") return &w.lockdown_day;
    if (key == "test_rate0") return &w.test_rate0;
    if (key == "test_growth_pre") return &w.test_growth_pre;
    if (key == "test_growth_post") return &w.test_growth_post;
    return nullptr;
}

std::optional<Range> read_range(const KeyValueConfig& config, const std::string& key)
{
    const auto single = config.get_number(key);
    const auto lo = config.get_number(key + "_min");
    const auto hi = config.get_number(key + "_max");
    if (single && (lo || hi))
        throw ConfigError("config: give either " + key + " or " + key + "_min/_max, not both");
    if (single)
        return Range{*single, *single};
    if (lo.has_value() != hi.has_value())
        throw ConfigError("config: " + key + "_min and " + key + "_max must be given together");
    if (lo)
        return Range{*lo, *hi};
    return std::nullopt;
}

std::int32_t as_int(double v, const std::string& key)
{
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError("config: " + key + " must be an integer");
    return static_cast<std::int32_t>(v);
}

std::vector<double> parse_number_list(const std::string& text, const std::string& key)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item(trim(std::string_view(text).substr(pos, comma - pos)));
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size())
            throw ConfigError("config: " + key + " must be a comma-separated list of numbers");
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

} // namespace

WorldSpec load_world_spec(const KeyValueConfig& config)
{
    std::set<std::string, std::less<>> known = {
        "regions", "name_prefix", "name",  "seed",  "days", "population", "start", "ifr", "gamma", "model",
        "alpha",   "kappa",       "mobility_reduction", "mobility_hold_days", "mobility_recovery_days",
        "stringency_before", "stringency_after", "covariate_beta"};
    for (const auto& k : kRangedKeys) {
        known.insert(k);
        known.insert(k + "_min");
        known.insert(k + "_max");
    }
    for (const auto& k : kCovariateNames) {
        known.insert(k + "_min");
        known.insert(k + "_max");
        known.insert(k);
    }
    config.reject_unknown(known);

    WorldSpec w;
    ScenarioSpec& b = w.base;
    const double regions = config.get_number("regions", static_cast<double>(w.regions));
    if (regions < 1 || regions != std::floor(regions))
        throw ConfigError("config: regions must be a positive integer");
    w.regions = static_cast<std::size_t>(regions);
    w.name_prefix = config.get_string("name_prefix", w.name_prefix);
    b.name = config.get_string("name", b.name);
    if (const auto seed = config.get("seed")) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(seed->data(), seed->data() + seed->size(), v);
        if (ec != std::errc{} || ptr != seed->data() + seed->size())
            throw ConfigError("config: seed must be a non-negative integer");
        b.seed = v;
    }
    b.days = as_int(config.get_number("days", b.days), "days");
    const double population = config.get_number("population", static_cast<double>(b.population));
    if (population != std::floor(population) || population < 1 || population > 1e13)
        throw ConfigError("config: population must be a positive integer");
    b.population = static_cast<std::int64_t>(population);
    if (const auto start = config.get("start")) {
        try {
            b.start = Date::parse(*start);
        } catch (const DataError& e) {
            throw ConfigError(std::string("config: start: ") + e.what());
        }
    }
    b.ifr = config.get_number("ifr", b.ifr);
    b.gamma = config.get_number("gamma", b.gamma);
    b.mobility_reduction = config.get_number("mobility_reduction", b.mobility_reduction);
    b.mobility_hold_days = as_int(config.get_number("mobility_hold_days", b.mobility_hold_days), "mobility_hold_days");
    b.mobility_recovery_days =
        as_int(config.get_number("mobility_recovery_days", b.mobility_recovery_days), "mobility_recovery_days");
    b.stringency_before = config.get_number("stringency_before", b.stringency_before);
    b.stringency_after = config.get_number("stringency_after", b.stringency_after);

    const TestingKind kind = parse_testing_kind(config.get_string("model", "up_saturating"));
    const double kappa = config.get_number("kappa", 1.0);
    std::optional<double> alpha = config.get_number("alpha");
    if (is_saturating(kind) && !alpha && !config.has("covariate_beta"))
        alpha = kind == TestingKind::up_saturating ? 0.002 : 1e-4;
    if (!is_saturating(kind) && alpha)
        throw ConfigError("config: alpha is only meaningful for saturating models");
    b.model = TestingModel{kind, kappa, is_saturating(kind) ? alpha : std::nullopt, {}};

    for (const auto& key : kRangedKeys)
        if (const auto r = read_range(config, key))
            *ranged_field(w, key) = *r;
    b.initial_prevalence = w.initial_prevalence.lo;
    b.lambda0 = w.lambda0.lo;
    b.theta0 = w.theta0.lo;
    b.lockdown_day = static_cast<std::int32_t>(std::lround(w.lockdown_day.lo));
    b.tests = {w.test_rate0.lo, w.test_growth_pre.lo, w.test_growth_post.lo};

    for (const auto& name : kCovariateNames) {
        const auto r = read_range(config, name);
        if (!r)
            break;
        w.covariates.push_back(*r);
    }
    if (const auto beta = config.get("covariate_beta")) {
        if (!is_saturating(kind))
            throw ConfigError("config: covariate_beta needs a saturating model");
        w.covariate_beta = parse_number_list(*beta, "covariate_beta");
        if (!b.model.alpha)
            b.model.alpha = std::max(w.covariate_beta.front(), 1e-12);
    }
    w.validate();
    return w;
}

std::vector<std::pair<std::string, std::string>> describe(const WorldSpec& world)
{
    std::vector<std::pair<std::string, std::string>> out;
    const auto add = [&](std::string key, double v) { out.emplace_back(std::move(key), format_double(v)); };
    const ScenarioSpec& b = world.base;
    out.emplace_back("regions", std::to_string(world.regions));
    out.emplace_back("name_prefix", world.name_prefix);
    out.emplace_back("seed", std::to_string(b.seed));
    out.emplace_back("days", std::to_string(b.days));
    out.emplace_back("population", std::to_string(b.population));
    out.emplace_back("start", b.start.to_string());
    add("ifr", b.ifr);
    add("gamma", b.gamma);
    out.emplace_back("model", to_string(b.model.kind));
    add("kappa", b.model.kappa);
    if (b.model.alpha)
        add("alpha", *b.model.alpha);
    for (const auto& key : kRangedKeys) {
        const Range& r = *ranged_field(const_cast<WorldSpec&>(world), key);
        add(key + "_min", r.lo);
        add(key + "_max", r.hi);
    }
    add("mobility_reduction", b.mobility_reduction);
    out.emplace_back("mobility_hold_days", std::to_string(b.mobility_hold_days));
    out.emplace_back("mobility_recovery_days", std::to_string(b.mobility_recovery_days));
    add("stringency_before", b.stringency_before);
    add("stringency_after", b.stringency_after);
    for (std::size_t i = 0; i < world.covariates.size(); ++i) {
        add(kCovariateNames[i] + "_min", world.covariates[i].lo);
        add(kCovariateNames[i] + "_max", world.covariates[i].hi);
    }
    if (!world.covariate_beta.empty()) {
        std::string list;
        for (double v : world.covariate_beta)
            list += (list.empty() ? "" : ",") + format_double(v);
        out.emplace_back("covariate_beta", list);
    }
    return out;
}

// -- risk-structured population ---------------------------------------------

void RiskPopulationSpec::validate() const
{
    if (!(non_infectious >= 0.0 && infectious >= 0.0))
        throw DomainError("risk population: population sizes must be non-negative");
    if (!(nu0 >= 0.0 && nu1 >= 0.0 && omega0 > 0.0 && r_max > 0.0))
        throw DomainError("risk population: densities must be non-negative and omega0, r_max positive");
    if (density == RiskDensity::proportional && !(mu0 > 0.0))
        throw DomainError("risk population: mu0 must be positive");
    if (non_infectious_density() * r_max > 1.0)
        throw DomainError("risk population: non-infectious mass exceeds 1");
    if (density == RiskDensity::up_saturating) {
        if (delta != 0.0)
            throw DomainError("risk population: point mass only applies to the down-saturating density");
        if (nu1 * omega0 * r_max / (r_max + omega0) > 1.0)
            throw DomainError("risk population: infectious mass exceeds 1");
    } else if (density == RiskDensity::proportional) {
        if (delta != 0.0)
            throw DomainError("risk population: point mass only applies to the down-saturating density");
        if (nu1 * r_max > 1.0)
            throw DomainError("risk population: infectious mass exceeds 1");
    } else {
        if (!(delta >= 0.0 && delta < 1.0))
            throw DomainError("risk population: delta must lie in [0, 1)");
        if (delta + nu1 * r_max > 1.0)
            throw DomainError("risk population: infectious mass exceeds 1");
    }
}

double RiskPopulationSpec::non_infectious_density() const
{
    return density == RiskDensity::proportional ? mu0 * nu1 : nu0;
}

TestingModel RiskPopulationSpec::implied_model() const
{
    validate();
    const double n_mass = non_infectious * non_infectious_density();
    if (!(n_mass > 0.0))
        throw DomainError("risk population: no testable non-infectious individuals");
    if (density == RiskDensity::up_saturating)
        return TestingModel::up_saturating(n_mass * omega0, nu1 * omega0);
    if (density == RiskDensity::proportional)
        return TestingModel::limiting(1.0 / (mu0 * non_infectious));
    if (!(nu1 > 0.0))
        throw DomainError("risk population: nu1 must be positive for the down-saturating model");
    return TestingModel::down_saturating(delta * n_mass / nu1, nu1 / n_mass);
}

namespace {

// Infectious mass with risk in [r_max - u, r_max], per infectious person.
double infectious_mass(const RiskPopulationSpec& s, double u)
{
    if (s.density == RiskDensity::up_saturating)
        return s.nu1 * s.omega0 * u / (u + s.omega0);
    return s.delta + s.nu1 * u;
}

} // namespace

double RiskPopulationSpec::testable_mass() const
{
    validate();
    return non_infectious * non_infectious_density() * r_max + infectious * infectious_mass(*this, r_max);
}

RiskPopulationResult simulate_risk_population(const RiskPopulationSpec& spec, double tests, std::uint64_t seed,
                                              bool sample)
{
    spec.validate();
    if (!(tests >= 0.0) || !std::isfinite(tests))
        throw DomainError("risk population: tests must be non-negative");
    if (tests > spec.testable_mass() * (1.0 + 1e-12))
        throw DomainError("risk population: tests exceed the testable population");

    RiskPopulationResult result;
    const double n_mass = spec.non_infectious * spec.non_infectious_density();
    const double point = spec.density == RiskDensity::down_saturating ? spec.delta * spec.infectious : 0.0;
    double u = 0.0;
    if (tests == 0.0) {
        result.expected_positives = 0.0;
    } else if (tests <= point) {
        result.expected_positives = tests;
    } else {
        const auto tested = [&](double x) { return n_mass * x + spec.infectious * infectious_mass(spec, x); };
        double lo = 0.0, hi = spec.r_max;
        for (int i = 0; i < 200 && hi - lo > 1e-15 * spec.r_max; ++i) {
            const double mid = 0.5 * (lo + hi);
            (tested(mid) < tests ? lo : hi) = mid;
        }
        u = 0.5 * (lo + hi);
        result.expected_positives = spec.infectious * infectious_mass(spec, u);
    }
    result.threshold = spec.r_max - u;
    result.approx_positives = spec.infectious * eval_f(spec.implied_model(), tests);

    if (!sample)
        return result;

    // Risks are stored as distance below r_max; untestable individuals get +inf.
    constexpr double kUntestable = std::numeric_limits<double>::infinity();
    const auto n0 = static_cast<std::size_t>(std::llround(spec.non_infectious));
    const auto n1 = static_cast<std::size_t>(std::llround(spec.infectious));
    std::vector<std::pair<double, bool>> people;
    people.reserve(n0 + n1);
    Rng rng(seed);
    const double nd = spec.non_infectious_density();
    const double n_testable = nd * spec.r_max;
    for (std::size_t k = 0; k < n0; ++k) {
        const double v = rng.uniform();
        people.emplace_back(v < n_testable ? v / nd : kUntestable, false);
    }
    for (std::size_t k = 0; k < n1; ++k) {
        const double v = rng.uniform();
        double dist = kUntestable;
        if (spec.density == RiskDensity::up_saturating) {
            const double kappa = spec.nu1 * spec.omega0;
            if (v < infectious_mass(spec, spec.r_max))
                dist = spec.omega0 * v / (kappa - v);
        } else if (v < spec.delta) {
            dist = 0.0;
        } else if (v < spec.delta + spec.nu1 * spec.r_max) {
            dist = (v - spec.delta) / spec.nu1;
        }
        people.emplace_back(dist, true);
    }
    const auto take = std::min(static_cast<std::size_t>(std::llround(tests)), people.size());
    if (take > 0 && take < people.size())
        std::nth_element(people.begin(), people.begin() + static_cast<std::ptrdiff_t>(take), people.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
    std::int64_t positives = 0;
    for (std::size_t k = 0; k < take; ++k)
        if (people[k].second && std::isfinite(people[k].first))
            ++positives;
    result.sampled_positives = positives;
    const double p = spec.infectious > 0.0 ? result.expected_positives / spec.infectious : 0.0;
    result.sampled_sd = std::sqrt(spec.infectious * p * (1.0 - p));
    return result;
}

} // namespace epitest
