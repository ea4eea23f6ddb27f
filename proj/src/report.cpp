#include "epitest/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace epitest {

double round_significant(double value, int digits)
{
    if (!std::isfinite(value) || value == 0.0)
        return value;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
    return std::strtod(buf, nullptr);
}

nlohmann::json json_number(double value)
{
    if (!std::isfinite(value))
        return nullptr;
    return round_significant(value);
}

nlohmann::json to_json(const ValidationReport& report)
{
    nlohmann::json j;
    j["model"] = to_string(report.kind);
    j["folds"] = report.folds;
    j["seed"] = report.seed;
    j["covariates"] = report.covariates;
    j["regions"] = report.per_region_error.size();
    j["averaged_error"] = json_number(report.averaged_error);
    nlohmann::json per_region = nlohmann::json::object();
    for (const auto& [name, value] : report.per_region_error)
        per_region[name] = json_number(value);
    j["per_region_error"] = per_region;
    nlohmann::json normalized = nlohmann::json::object();
    for (const auto& [name, value] : report.per_region_normalized_error)
        normalized[name] = json_number(value);
    j["per_region_normalized_error"] = normalized;
    if (is_saturating(report.kind)) {
        if (report.covariates) {
            nlohmann::json folds = nlohmann::json::array();
            for (const auto& beta : report.per_fold_beta) {
                nlohmann::json row = nlohmann::json::array();
                for (double b : beta)
                    row.push_back(json_number(b));
                folds.push_back(row);
            }
            j["per_fold_beta"] = folds;
        } else {
            nlohmann::json folds = nlohmann::json::array();
            for (double a : report.per_fold_alpha)
                folds.push_back(json_number(a));
            j["per_fold_alpha"] = folds;
            j["alpha_median"] = report.alpha_median ? json_number(*report.alpha_median) : nlohmann::json(nullptr);
            if (report.alpha_ci)
                j["alpha_ci"] = {json_number(report.alpha_ci->first), json_number(report.alpha_ci->second)};
            else
                j["alpha_ci"] = nullptr;
        }
    }
    return j;
}

nlohmann::json to_json(const stats::TestResult& result)
{
    return {
        {"statistic", json_number(result.statistic)},
        {"p_value", json_number(result.p_value)},
        {"n", result.n_effective},
        {"method", std::string(stats::to_string(result.method))},
        {"degenerate", result.degenerate},
    };
}

nlohmann::json to_json(const PoissonFit& fit)
{
    return {
        {"intercept", json_number(fit.intercept)},
        {"slope", json_number(fit.slope)},
        {"se_intercept", json_number(fit.se_intercept)},
        {"se_slope", json_number(fit.se_slope)},
        {"log_likelihood", json_number(fit.log_likelihood)},
        {"converged", fit.converged},
        {"iterations", fit.iterations},
    };
}

void write_json(std::ostream& out, const nlohmann::json& document)
{
    out << document.dump(2) << '\n';
}

std::string format_number(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

} // namespace epitest
