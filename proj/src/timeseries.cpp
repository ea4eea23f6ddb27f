#include "epitest/timeseries.hpp"

#include "epitest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epitest {

DailySeries::DailySeries(Date start, std::vector<std::optional<double>> values, bool cumulative)
    : start_(start), values_(std::move(values)), cumulative_(cumulative)
{
    for (const auto& v : values_) {
        if (v && (!std::isfinite(*v) || *v < 0.0))
            throw DataError("daily series values must be finite and non-negative");
    }
}

DailySeries DailySeries::from_values(Date start, std::span<const double> values, bool cumulative)
{
    return DailySeries(start, std::vector<std::optional<double>>(values.begin(), values.end()), cumulative);
}

DailySeries DailySeries::signed_values(Date start, std::vector<std::optional<double>> values)
{
    DailySeries series;
    series.start_ = start;
    series.signed_ = true;
    for (const auto& v : values)
        if (v && !std::isfinite(*v))
            throw DataError("daily series values must be finite");
    series.values_ = std::move(values);
    return series;
}

DailySeries DailySeries::missing(Date start, std::size_t length, bool cumulative)
{
    return DailySeries(start, std::vector<std::optional<double>>(length), cumulative);
}

std::optional<double> DailySeries::at(Date d) const
{
    if (!contains(d))
        return std::nullopt;
    return values_[static_cast<std::size_t>(d - start_)];
}

bool DailySeries::complete() const
{
    return std::all_of(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); });
}

std::size_t DailySeries::present_count() const
{
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); }));
}

std::optional<std::size_t> DailySeries::first_present() const
{
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i])
            return i;
    return std::nullopt;
}

std::optional<std::size_t> DailySeries::last_present() const
{
    for (std::size_t i = values_.size(); i-- > 0;)
        if (values_[i])
            return i;
    return std::nullopt;
}

std::vector<double> DailySeries::dense() const
{
    std::vector<double> out;
    out.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!values_[i])
            throw DataError("missing value on " + (start_ + static_cast<std::int32_t>(i)).to_string());
        out.push_back(*values_[i]);
    }
    return out;
}

DailySeries DailySeries::slice(Date first, Date last) const
{
    if (empty() || last < start_ || first > end()) {
        DailySeries out = *this;
        out.start_ = first;
        out.values_.clear();
        return out;
    }
    first = std::max(first, start_);
    last = std::min(last, end());
    const auto b = values_.begin() + (first - start_);
    const auto e = values_.begin() + (last - start_) + 1;
    DailySeries out = *this;
    out.start_ = first;
    out.values_.assign(b, e);
    return out;
}

DailySeries DailySeries::present_span() const
{
    const auto lo = first_present();
    if (!lo)
        return slice(start_, start_ - 1);
    const auto hi = *last_present();
    return slice(start_ + static_cast<std::int32_t>(*lo), start_ + static_cast<std::int32_t>(hi));
}

DailySeries DailySeries::reindex(Date first, Date last) const
{
    std::vector<std::optional<double>> out;
    if (last >= first) {
        out.reserve(static_cast<std::size_t>(last - first) + 1);
        for (Date d = first; d <= last; d = d + 1)
            out.push_back(at(d));
    }
    DailySeries copy = *this;
    copy.start_ = first;
    copy.values_ = std::move(out);
    return copy;
}

DailySeries DailySeries::with_cumulative(bool flag) const
{
    DailySeries copy = *this;
    copy.cumulative_ = flag;
    return copy;
}

DailySeries interpolate_missing(const DailySeries& cumulative)
{
    if (!cumulative.cumulative())
        throw DomainError("interpolate_missing requires a cumulative series");
    const auto first = cumulative.first_present();
    if (!first)
        throw DataError("interpolate_missing: series has no present values");
    const auto last = *cumulative.last_present();

    std::vector<std::optional<double>> out = cumulative.values();
    double previous = *out[*first];
    for (std::size_t i = *first + 1; i <= last; ++i) {
        if (out[i] && *out[i] < previous)
            throw DataError("cumulative series decreases on " +
                            (cumulative.start() + static_cast<std::int32_t>(i)).to_string());
        if (out[i])
            previous = *out[i];
    }

    std::size_t left = *first;
    while (left < last) {
        std::size_t right = left + 1;
        while (!out[right])
            ++right;
        const double lv = *out[left];
        const double rv = *out[right];
        const double span = static_cast<double>(right - left);
        for (std::size_t i = left + 1; i < right; ++i) {
            const double frac = static_cast<double>(i - left) / span;
            // Before the first strictly positive value the log is undefined; hold flat.
            out[i] = lv > 0.0 ? std::exp(std::log(lv) + frac * (std::log(rv) - std::log(lv))) : lv;
        }
        left = right;
    }
    return DailySeries(cumulative.start(), std::move(out), true);
}

DifferenceResult daily_from_cumulative(const DailySeries& cumulative)
{
    const std::vector<double> values = cumulative.dense();
    DifferenceResult result;
    result.raw.resize(values.size());
    std::vector<std::optional<double>> daily(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double diff = i == 0 ? values[0] : values[i] - values[i - 1];
        result.raw[i] = diff;
        if (diff < 0.0)
            result.clamped.push_back(i);
        daily[i] = std::max(diff, 0.0);
    }
    result.daily = DailySeries(cumulative.start(), std::move(daily), false);
    return result;
}

DailySeries cumulative_sum(const DailySeries& daily)
{
    const std::vector<double> values = daily.dense();
    std::vector<std::optional<double>> out(values.size());
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        total += values[i];
        out[i] = total;
    }
    return DailySeries(daily.start(), std::move(out), true);
}

DailySeries rolling_mean(const DailySeries& series, std::size_t window)
{
    if (window == 0)
        throw DomainError("rolling_mean window must be at least 1");
    std::vector<std::optional<double>> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::size_t n = std::min(i + 1, window);
        double sum = 0.0;
        std::size_t present = 0;
        for (std::size_t j = i + 1 - n; j <= i; ++j) {
            if (series[j]) {
                sum += *series[j];
                ++present;
            }
        }
        if (present > 0)
            out[i] = sum / static_cast<double>(present);
    }
    if (series.is_signed())
        return DailySeries::signed_values(series.start(), std::move(out));
    return DailySeries(series.start(), std::move(out), false);
}

} // namespace epitest
