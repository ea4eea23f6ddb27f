#include "epitest/ingest.hpp"

#include "epitest/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace epitest {

std::string_view trim(std::string_view text)
{
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!text.empty() && is_space(text.front()))
        text.remove_prefix(1);
    while (!text.empty() && is_space(text.back()))
        text.remove_suffix(1);
    return text;
}

DailySeries RegionRecord::test_rate() const
{
    std::vector<std::optional<double>> out(new_tests.size());
    const double pop = static_cast<double>(population);
    for (std::size_t i = 0; i < new_tests.size(); ++i)
        if (new_tests[i])
            out[i] = *new_tests[i] / pop;
    return DailySeries(new_tests.start(), std::move(out), false);
}

std::optional<std::vector<double>> RegionRecord::covariate_vector() const
{
    std::vector<double> out;
    for (const auto& name : kCovariateNames) {
        const auto it = covariates.find(name);
        if (it == covariates.end())
            return std::nullopt;
        out.push_back(it->second);
    }
    return out;
}

RegionRecord RegionRecord::truncated(Date first, Date last) const
{
    RegionRecord out = *this;
    for (DailySeries* s : {&out.new_cases, &out.new_tests, &out.new_deaths, &out.total_cases, &out.total_tests,
                           &out.total_deaths, &out.reported_total_tests, &out.stringency, &out.mobility})
        *s = s->slice(first, last);
    return out;
}

Schema parse_schema(std::string_view name)
{
    if (name == "world")
        return Schema::world;
    if (name == "us_states")
        return Schema::us_states;
    throw ConfigError("unknown schema '" + std::string(name) + "' (expected world or us_states)");
}

std::string_view to_string(Schema schema)
{
    return schema == Schema::world ? "world" : "us_states";
}

namespace {

struct ColumnNames {
    std::string location;
    std::string new_cases, total_cases;
    std::string new_tests, total_tests;
    std::string new_deaths, total_deaths;
};

ColumnNames column_names(Schema schema)
{
    if (schema == Schema::us_states)
        return {"state", "positiveIncrease", "positive", "totalTestResultsIncrease", "totalTestResults",
                "deathIncrease", "death"};
    return {"location", "new_cases", "total_cases", "new_tests", "total_tests", "new_deaths", "total_deaths"};
}

constexpr const char* kGoogleMobility[] = {
    "retail_and_recreation_percent_change_from_baseline",
    "transit_stations_percent_change_from_baseline",
    "workplaces_percent_change_from_baseline",
};

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no)
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted)
        throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

std::optional<double> parse_number(std::string_view text, std::size_t line_no, std::string_view column)
{
    text = trim(text);
    if (text.empty())
        return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        throw DataError("line " + std::to_string(line_no) + ": column " + std::string(column) +
                        ": not a number '" + std::string(text) + "'");
    return value;
}

std::string format_number(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

struct RawRow {
    Date date;
    std::unordered_map<std::string, std::optional<double>> numbers;
};

// Cumulative observations forced monotone; revisions are flattened so their
// daily difference becomes zero.
DailySeries monotone(const DailySeries& raw, RegionRecord& record, std::string_view label)
{
    std::vector<std::optional<double>> values = raw.values();
    double running = -1.0;
    std::size_t revised = 0;
    for (auto& v : values) {
        if (!v)
            continue;
        if (*v < running) {
            v = running;
            ++revised;
        }
        running = *v;
    }
    if (revised > 0)
        record.warnings.push_back(std::string(label) + ": " + std::to_string(revised) +
                                  " downward revision(s) of the cumulative count flattened");
    return DailySeries(raw.start(), std::move(values), true);
}

struct Reconciled {
    DailySeries daily;
    DailySeries total;
    DailySeries reported;
};

Reconciled reconcile(const DailySeries& raw_daily, const DailySeries& raw_total, RegionRecord& record,
                     std::string_view label)
{
    const Date start = raw_daily.start();
    const std::size_t n = raw_daily.size();
    DailySeries reported = raw_total;
    if (raw_total.present_count() == 0) {
        // Only dailies: a report after a gap is taken to cover the gap.
        std::vector<std::optional<double>> cum(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (raw_daily[i]) {
                total += *raw_daily[i];
                cum[i] = total;
            }
        }
        reported = DailySeries(start, std::move(cum), true);
    }
    if (reported.present_count() == 0)
        return {DailySeries::missing(start, n), DailySeries::missing(start, n, true), reported};

    const DailySeries filled = interpolate_missing(monotone(reported, record, label));
    const std::size_t lo = *filled.first_present();
    const std::size_t hi = *filled.last_present();
    const DailySeries span = filled.slice(start + static_cast<std::int32_t>(lo), start + static_cast<std::int32_t>(hi));
    DifferenceResult diff = daily_from_cumulative(span);

    std::vector<std::optional<double>> daily(n);
    for (std::size_t i = lo; i <= hi; ++i)
        daily[i] = diff.daily[i - lo];
    if (lo > 0) {
        // The first cumulative value after unreported days is not a daily count.
        daily[lo] = raw_daily[lo];
    }

    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (raw_daily[i] && daily[i] && std::fabs(*raw_daily[i] - *daily[i]) > 0.5)
            ++mismatches;
    if (mismatches > 0 && raw_total.present_count() > 0)
        record.warnings.push_back(std::string(label) + ": " + std::to_string(mismatches) +
                                  " day(s) where the daily column disagrees with the cumulative column");

    return {DailySeries(start, std::move(daily), false), filled, reported};
}

} // namespace

std::vector<RegionRecord> parse_surveillance_csv(std::istream& in, Schema schema, const ParseRequirements& required)
{
    const ColumnNames names = column_names(schema);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line))
        throw SchemaError("missing header row");
    const std::vector<std::string> header = split_csv_line(line, line_no);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i)
        index.emplace(std::string(trim(header[i])), i);

    const auto has = [&](const std::string& column) { return index.count(column) > 0; };
    for (const std::string& column : {std::string("date"), names.location, std::string("population")})
        if (!has(column))
            throw SchemaError("missing required column: " + column);
    const auto require_group = [&](bool needed, const std::string& daily, const std::string& total) {
        if (needed && !has(daily) && !has(total))
            throw SchemaError("missing required column: " + daily + " or " + total);
    };
    require_group(required.cases, names.new_cases, names.total_cases);
    require_group(required.tests, names.new_tests, names.total_tests);
    require_group(required.deaths, names.new_deaths, names.total_deaths);

    // Numeric columns this schema knows about.
    std::vector<std::string> numeric = {"population",      names.new_cases,  names.total_cases,
                                        names.new_tests,   names.total_tests, names.new_deaths,
                                        names.total_deaths, "stringency_index", "mobility"};
    for (const char* g : kGoogleMobility)
        numeric.emplace_back(g);
    numeric.insert(numeric.end(), kCovariateNames.begin(), kCovariateNames.end());
    const std::set<std::string> signed_columns = {"mobility", kGoogleMobility[0], kGoogleMobility[1],
                                                  kGoogleMobility[2]};

    std::map<std::string, std::vector<RawRow>> by_location;
    std::map<std::string, std::set<std::int32_t>> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const std::vector<std::string> fields = split_csv_line(line, line_no);
        const auto field = [&](const std::string& column) -> std::string_view {
            const std::size_t i = index.at(column);
            return i < fields.size() ? std::string_view(fields[i]) : std::string_view();
        };
        const std::string location(trim(field(names.location)));
        if (location.empty())
            throw DataError("line " + std::to_string(line_no) + ": empty location");
        RawRow row;
        try {
            row.date = Date::parse(trim(field("date")));
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!seen[location].insert(row.date.days_since_epoch()).second)
            throw DataError("line " + std::to_string(line_no) + ": duplicate row for (" + location + ", " +
                            row.date.to_string() + ")");
        for (const auto& column : numeric) {
            if (!has(column))
                continue;
            const auto value = parse_number(field(column), line_no, column);
            if (value && *value < 0.0 && !signed_columns.count(column))
                throw DataError("line " + std::to_string(line_no) + ": negative value in column " + column);
            row.numbers[column] = value;
        }
        by_location[location].push_back(std::move(row));
    }

    std::vector<RegionRecord> records;
    for (auto& [location, rows] : by_location) {
        std::sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) { return a.date < b.date; });
        const Date start = rows.front().date;
        const std::size_t n = static_cast<std::size_t>(rows.back().date - start) + 1;

        const auto column_series = [&](const std::string& column) {
            std::vector<std::optional<double>> values(n);
            for (const auto& row : rows) {
                const auto it = row.numbers.find(column);
                if (it != row.numbers.end())
                    values[static_cast<std::size_t>(row.date - start)] = it->second;
            }
            return values;
        };
        const auto first_value = [&](const std::string& column) -> std::optional<double> {
            for (const auto& row : rows) {
                const auto it = row.numbers.find(column);
                if (it != row.numbers.end() && it->second)
                    return it->second;
            }
            return std::nullopt;
        };

        RegionRecord record;
        record.name = location;
        const auto population = first_value("population");
        if (!population || !(*population >= 1.0))
            throw DataError("region " + location + ": population missing or not positive");
        record.population = std::llround(*population);

        const auto group = [&](const std::string& daily_col, const std::string& total_col, std::string_view label) {
            const DailySeries raw_daily(start, column_series(daily_col), false);
            const DailySeries raw_total(start, column_series(total_col), true);
            try {
                return reconcile(raw_daily, raw_total, record, label);
            } catch (const DataError& e) {
                throw DataError("region " + location + ": " + std::string(label) + ": " + e.what());
            }
        };
        Reconciled cases = group(names.new_cases, names.total_cases, "cases");
        Reconciled tests = group(names.new_tests, names.total_tests, "tests");
        Reconciled deaths = group(names.new_deaths, names.total_deaths, "deaths");
        record.new_cases = std::move(cases.daily);
        record.total_cases = std::move(cases.total);
        record.new_tests = std::move(tests.daily);
        record.total_tests = std::move(tests.total);
        record.reported_total_tests = std::move(tests.reported);
        record.new_deaths = std::move(deaths.daily);
        record.total_deaths = std::move(deaths.total);

        const auto stringency = column_series("stringency_index");
        for (const auto& v : stringency)
            if (v && *v > 100.0)
                throw DataError("region " + location + ": stringency index above 100");
        record.stringency = DailySeries(start, stringency, false);

        std::vector<std::optional<double>> mobility = column_series("mobility");
        const bool google = std::all_of(std::begin(kGoogleMobility), std::end(kGoogleMobility),
                                        [&](const char* c) { return has(c); });
        if (google) {
            const auto a = column_series(kGoogleMobility[0]);
            const auto b = column_series(kGoogleMobility[1]);
            const auto c = column_series(kGoogleMobility[2]);
            for (std::size_t i = 0; i < n; ++i)
                if (!mobility[i] && a[i] && b[i] && c[i])
                    mobility[i] = *a[i] + *b[i] + *c[i];
        }
        record.mobility = DailySeries::signed_values(start, std::move(mobility));

        for (const auto& name : kCovariateNames)
            if (const auto v = first_value(name))
                record.covariates[name] = *v;
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<RegionRecord> parse_surveillance_file(const std::string& path, Schema schema,
                                                  const ParseRequirements& required)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open input file " + path);
    return parse_surveillance_csv(in, schema, required);
}

void write_surveillance_csv(std::ostream& out, const std::vector<RegionRecord>& records)
{
    out << "date,location,population,new_cases,total_cases,new_tests,total_tests,new_deaths,total_deaths,"
           "stringency_index,mobility";
    for (const auto& name : kCovariateNames)
        out << ',' << name;
    out << '\n';
    const auto cell = [&](const DailySeries& s, Date d) {
        out << ',';
        if (const auto v = s.at(d))
            out << format_number(*v);
    };
    for (const auto& r : records) {
        for (Date d = r.start(); d <= r.end(); d = d + 1) {
            const bool quote = r.name.find(',') != std::string::npos || r.name.find('"') != std::string::npos;
            out << d.to_string() << ',';
            if (quote) {
                out << '"';
                for (char c : r.name)
                    out << (c == '"' ? "\"\"" : std::string(1, c));
                out << '"';
            } else {
                out << r.name;
            }
            out << ',' << r.population;
            cell(r.new_cases, d);
            cell(r.total_cases, d);
            cell(r.new_tests, d);
            cell(r.total_tests, d);
            cell(r.new_deaths, d);
            cell(r.total_deaths, d);
            cell(r.stringency, d);
            cell(r.mobility, d);
            for (const auto& name : kCovariateNames) {
                out << ',';
                if (const auto it = r.covariates.find(name); it != r.covariates.end())
                    out << format_number(it->second);
            }
            out << '\n';
        }
    }
}

RegionRecord make_record(std::string name, std::int64_t population, Date start, std::span<const double> new_cases,
                         std::span<const double> new_tests, std::span<const double> new_deaths)
{
    if (population <= 0)
        throw DomainError("population must be positive");
    if (new_cases.size() != new_tests.size() || new_cases.size() != new_deaths.size())
        throw DomainError("make_record needs equally long series");
    RegionRecord r;
    r.name = std::move(name);
    r.population = population;
    r.new_cases = DailySeries::from_values(start, new_cases);
    r.new_tests = DailySeries::from_values(start, new_tests);
    r.new_deaths = DailySeries::from_values(start, new_deaths);
    r.total_cases = cumulative_sum(r.new_cases);
    r.total_tests = cumulative_sum(r.new_tests);
    r.total_deaths = cumulative_sum(r.new_deaths);
    r.reported_total_tests = r.total_tests;
    r.stringency = DailySeries::missing(start, new_cases.size());
    r.mobility = DailySeries::signed_values(start, std::vector<std::optional<double>>(new_cases.size()));
    return r;
}

bool testing_is_regular(const RegionRecord& record, std::int32_t max_gap)
{
    const DailySeries& reported = record.reported_total_tests;
    std::optional<std::size_t> previous;
    std::size_t present = 0;
    for (std::size_t i = 0; i < reported.size(); ++i) {
        if (!reported[i])
            continue;
        ++present;
        if (previous && static_cast<std::int32_t>(i - *previous) > max_gap)
            return false;
        previous = i;
    }
    return present >= 2;
}

std::vector<RegionRecord> select_regions_for_validation(const std::vector<RegionRecord>& records,
                                                        const SelectionCriteria& criteria)
{
    std::vector<RegionRecord> selected;
    for (const auto& record : records) {
        const auto excluded = std::find(criteria.excluded_names.begin(), criteria.excluded_names.end(),
                                        std::string(trim(record.name)));
        if (excluded != criteria.excluded_names.end())
            continue;
        const auto last_deaths = record.total_deaths.last_present();
        if (!last_deaths || *record.total_deaths[*last_deaths] < criteria.min_total_deaths)
            continue;
        std::optional<Date> first_day;
        for (std::size_t i = 0; i < record.total_cases.size(); ++i) {
            if (record.total_cases[i] && *record.total_cases[i] >= criteria.min_cumulative_cases) {
                first_day = record.start() + static_cast<std::int32_t>(i);
                break;
            }
        }
        if (!first_day)
            continue;
        RegionRecord truncated = record.truncated(*first_day, record.end());
        if (!testing_is_regular(truncated, criteria.max_testing_gap_days))
            continue;
        selected.push_back(std::move(truncated));
    }
    return selected;
}

std::optional<Date> LockdownTable::find(std::string_view region) const
{
    region = trim(region);
    for (const auto& [name, date] : entries)
        if (name == region)
            return date;
    return std::nullopt;
}

LockdownTable parse_lockdown_csv(std::istream& in, std::string name)
{
    LockdownTable table;
    table.name = std::move(name);
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto fields = split_csv_line(line, line_no);
        if (header) {
            header = false;
            if (fields.size() < 2 || trim(fields[0]) != "region" || trim(fields[1]) != "date")
                throw SchemaError("lockdown table needs a 'region,date' header");
            continue;
        }
        if (fields.size() < 2)
            throw DataError("lockdown table line " + std::to_string(line_no) + ": expected region,date");
        std::string region(trim(fields[0]));
        const Date date = Date::parse(trim(fields[1]));
        if (date.year() != 2020)
            throw DataError("lockdown date for " + region + " is outside 2020");
        if (!seen.insert(region).second)
            throw DataError("lockdown table lists " + region + " twice");
        table.entries.emplace_back(std::move(region), date);
    }
    if (header)
        throw SchemaError("lockdown table is empty");
    return table;
}

} // namespace epitest
