#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace epitest {

/// Calendar day, stored as days since 1970-01-01.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses YYYY-MM-DD; throws DataError on anything else.
    static Date parse(std::string_view text);

    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] constexpr std::int32_t days_since_epoch() const { return days_; }
    [[nodiscard]] int year() const;

    constexpr Date operator+(std::int32_t days) const { return Date(days_ + days); }
    constexpr Date operator-(std::int32_t days) const { return Date(days_ - days); }
    constexpr std::int32_t operator-(Date other) const { return days_ - other.days_; }
    constexpr auto operator<=>(const Date&) const = default;

private:
    std::int32_t days_ = 0;
};

} // namespace epitest
