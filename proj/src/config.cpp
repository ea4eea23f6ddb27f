#include "epitest/config.hpp"

#include "epitest/errors.hpp"
#include "epitest/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace epitest {

KeyValueConfig KeyValueConfig::parse(std::istream& in)
{
    KeyValueConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = trim(view);
        if (view.empty())
            continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(view.substr(0, eq)));
        const std::string value(trim(view.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (config.values_.count(key))
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key " + key);
        config.values_[key] = value;
    }
    return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    return parse(in);
}

bool KeyValueConfig::has(std::string_view key) const
{
    return values_.find(key) != values_.end();
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_string(std::string_view key, std::string fallback) const
{
    return get(key).value_or(std::move(fallback));
}

std::optional<double> KeyValueConfig::get_number(std::string_view key) const
{
    const auto text = get(key);
    if (!text)
        return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
    if (ec != std::errc{} || ptr != text->data() + text->size() || !std::isfinite(value))
        throw ConfigError("config key " + std::string(key) + ": not a number '" + *text + "'");
    return value;
}

double KeyValueConfig::get_number(std::string_view key, double fallback) const
{
    return get_number(key).value_or(fallback);
}

void KeyValueConfig::reject_unknown(const std::set<std::string, std::less<>>& known) const
{
    for (const auto& [key, value] : values_)
        if (!known.count(key))
            throw ConfigError("unknown config key '" + key + "'");
}

} // namespace epitest
