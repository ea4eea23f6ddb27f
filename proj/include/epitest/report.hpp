#pragma once

#include "epitest/regression.hpp"
#include "epitest/stats.hpp"
#include "epitest/validation.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace epitest {

/// Rounds to `digits` significant decimal digits.
double round_significant(double value, int digits = 9);

/// Rounded number, or null when not finite.
nlohmann::json json_number(double value);

nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const stats::TestResult& result);
nlohmann::json to_json(const PoissonFit& fit);

/// Pretty-printed with a trailing newline.
void write_json(std::ostream& out, const nlohmann::json& document);

/// Shortest round-trip decimal form.
std::string format_number(double value);

} // namespace epitest
