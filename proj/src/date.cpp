#include "epitest/date.hpp"

#include "epitest/errors.hpp"

#include <charconv>
#include <cstdio>

namespace epitest {

namespace {

using std::chrono::day;
using std::chrono::month;
using std::chrono::sys_days;
using std::chrono::year;
using std::chrono::year_month_day;

int parse_field(std::string_view text, std::string_view whole)
{
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError("unparseable date '" + std::string(whole) + "'");
    return value;
}

} // namespace

Date::Date(int y, unsigned m, unsigned d)
{
    const year_month_day ymd{std::chrono::year{y}, month{m}, day{d}};
    if (!ymd.ok())
        throw DataError("invalid calendar date " + std::to_string(y) + "-" + std::to_string(m) + "-" +
                        std::to_string(d));
    days_ = static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count());
}

Date Date::parse(std::string_view text)
{
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw DataError("unparseable date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    const int y = parse_field(text.substr(0, 4), text);
    const int m = parse_field(text.substr(5, 2), text);
    const int d = parse_field(text.substr(8, 2), text);
    if (m < 1 || d < 1)
        throw DataError("unparseable date '" + std::string(text) + "'");
    return Date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::to_string() const
{
    const year_month_day ymd{sys_days{std::chrono::days{days_}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int Date::year() const
{
    const year_month_day ymd{sys_days{std::chrono::days{days_}}};
    return static_cast<int>(ymd.year());
}

} // namespace epitest
