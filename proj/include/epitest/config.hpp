#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace epitest {

/// Plain-text `key = value` lines; `#` starts a comment.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig load(const std::string& path);

    [[nodiscard]] bool has(std::string_view key) const;
    [[nodiscard]] std::optional<std::string> get(std::string_view key) const;
    [[nodiscard]] std::string get_string(std::string_view key, std::string fallback) const;
    /// Throws ConfigError when present but not a number.
    [[nodiscard]] std::optional<double> get_number(std::string_view key) const;
    [[nodiscard]] double get_number(std::string_view key, double fallback) const;

    void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
    [[nodiscard]] const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

    /// Throws ConfigError naming the first key not in `known`.
    void reject_unknown(const std::set<std::string, std::less<>>& known) const;

private:
    std::map<std::string, std::string, std::less<>> values_;
};

} // namespace epitest
