#pragma once

#include "epitest/date.hpp"
#include "epitest/timeseries.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epitest {

/// Covariate names, in the order used for covariate-linear alpha.
inline const std::vector<std::string> kCovariateNames = {"gdp_per_capita", "population_density",
                                                          "urban_population_percent"};

/// One geographic unit's surveillance series on a shared daily grid.
///
/// Cumulative series are the source of truth: they are gap-filled by
/// log-interpolation and the daily series are their first differences.
/// The `reported_*` series keep the raw cumulative observations (missing
/// where nothing was reported) for data-quality checks.
struct RegionRecord {
    std::string name;
    std::int64_t population = 0;

    DailySeries new_cases;
    DailySeries new_tests;
    DailySeries new_deaths;
    DailySeries total_cases;
    DailySeries total_tests;
    DailySeries total_deaths;
    DailySeries reported_total_tests;

    /// Stringency index 0-100; all missing when not supplied.
    DailySeries stringency;
    /// Sum of retail, transit-station and workplace percent changes (signed); all
    /// missing when not supplied.
    DailySeries mobility;

    std::map<std::string, double> covariates;
    std::vector<std::string> warnings;

    [[nodiscard]] Date start() const { return new_cases.start(); }
    [[nodiscard]] Date end() const { return new_cases.end(); }
    [[nodiscard]] std::size_t days() const { return new_cases.size(); }

    [[nodiscard]] bool has_tests() const { return total_tests.present_count() > 0; }
    [[nodiscard]] bool has_mobility() const { return mobility.present_count() > 0; }
    [[nodiscard]] bool has_stringency() const { return stringency.present_count() > 0; }
    /// Daily tests per person.
    [[nodiscard]] DailySeries test_rate() const;
    /// Covariates in kCovariateNames order; nullopt if any is missing.
    [[nodiscard]] std::optional<std::vector<double>> covariate_vector() const;

    /// All series restricted to [first, last].
    [[nodiscard]] RegionRecord truncated(Date first, Date last) const;
};

enum class Schema { world, us_states };

Schema parse_schema(std::string_view name);
std::string_view to_string(Schema schema);

/// Which measurement groups must have a column in the file.
struct ParseRequirements {
    bool cases = true;
    bool tests = true;
    bool deaths = true;
};

/// Reads a surveillance CSV into one record per location, sorted by name.
///
/// world columns: date, location, population, new_cases/total_cases,
/// new_tests/total_tests, new_deaths/total_deaths, optional stringency_index,
/// mobility (or the three Google mobility columns), covariates.
/// us_states uses `state` for the location and the COVID Tracking names
/// positive/positiveIncrease, totalTestResults/totalTestResultsIncrease,
/// death/deathIncrease.
///
/// Throws SchemaError for missing columns and DataError for duplicate
/// (location, date) rows, bad dates, or negative counts.
std::vector<RegionRecord> parse_surveillance_csv(std::istream& in, Schema schema,
                                                 const ParseRequirements& required = {});

std::vector<RegionRecord> parse_surveillance_file(const std::string& path, Schema schema,
                                                  const ParseRequirements& required = {});

/// Writes records in the world schema; numbers use the shortest round-trip form.
void write_surveillance_csv(std::ostream& out, const std::vector<RegionRecord>& records);

/// Builds a record from daily counts (cumulatives are running sums).
RegionRecord make_record(std::string name, std::int64_t population, Date start, std::span<const double> new_cases,
                         std::span<const double> new_tests, std::span<const double> new_deaths);

struct SelectionCriteria {
    double min_total_deaths = 1000.0;
    std::int32_t max_testing_gap_days = 7;
    double min_cumulative_cases = 20.0;
    std::vector<std::string> excluded_names = {"China"};
};

/// True when consecutive reported test values are never more than `max_gap` days apart.
bool testing_is_regular(const RegionRecord& record, std::int32_t max_gap);

/// Regions fit for death-based validation, truncated to start at the first day
/// with at least 20 cumulative cases.
std::vector<RegionRecord> select_regions_for_validation(const std::vector<RegionRecord>& records,
                                                        const SelectionCriteria& criteria = {});

/// Region name -> lockdown date, in source order.
struct LockdownTable {
    std::string name;
    std::vector<std::pair<std::string, Date>> entries;

    [[nodiscard]] std::optional<Date> find(std::string_view region) const;
    [[nodiscard]] std::size_t size() const { return entries.size(); }
};

/// Bundled tables: "world_first", "world_second", "us_states".
LockdownTable load_lockdown_dates(std::string_view fixture_name);

/// Parses a (region,date) CSV; every date must fall in 2020, regions must be unique.
LockdownTable parse_lockdown_csv(std::istream& in, std::string name);

/// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view text);

} // namespace epitest
