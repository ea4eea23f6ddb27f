#pragma once

#include "epitest/date.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace epitest {

/// Contiguous daily grid of optional values.
///
/// Index i corresponds to start() + i days. Missing days are explicit
/// std::nullopt entries and are never treated as zero. Values are
/// non-negative unless the series was built with signed_values() (mobility
/// percent changes).
class DailySeries {
public:
    DailySeries() = default;
    DailySeries(Date start, std::vector<std::optional<double>> values, bool cumulative = false);

    /// Builds a complete series from plain values.
    static DailySeries from_values(Date start, std::span<const double> values, bool cumulative = false);
    /// Series of `length` missing days.
    static DailySeries missing(Date start, std::size_t length, bool cumulative = false);
    /// Series whose values may be negative.
    static DailySeries signed_values(Date start, std::vector<std::optional<double>> values);

    [[nodiscard]] Date start() const { return start_; }
    /// Last day on the grid; only meaningful when !empty().
    [[nodiscard]] Date end() const { return start_ + static_cast<std::int32_t>(values_.size()) - 1; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] bool empty() const { return values_.empty(); }
    [[nodiscard]] bool cumulative() const { return cumulative_; }
    [[nodiscard]] bool is_signed() const { return signed_; }

    [[nodiscard]] const std::optional<double>& operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::optional<double> at(Date d) const;
    [[nodiscard]] bool contains(Date d) const { return !empty() && d >= start_ && d <= end(); }
    [[nodiscard]] const std::vector<std::optional<double>>& values() const { return values_; }

    [[nodiscard]] bool complete() const;
    [[nodiscard]] std::size_t present_count() const;
    [[nodiscard]] std::optional<std::size_t> first_present() const;
    [[nodiscard]] std::optional<std::size_t> last_present() const;

    /// Values as doubles; throws DataError when any value is missing.
    [[nodiscard]] std::vector<double> dense() const;

    /// Sub-series on [first, last] (inclusive, clipped to the grid).
    [[nodiscard]] DailySeries slice(Date first, Date last) const;
    /// Sub-series spanning the first to the last present value (empty if none).
    [[nodiscard]] DailySeries present_span() const;
    /// Same values re-anchored on [first, last]; days outside the grid become missing.
    [[nodiscard]] DailySeries reindex(Date first, Date last) const;

    [[nodiscard]] DailySeries with_cumulative(bool flag) const;

private:
    Date start_{};
    std::vector<std::optional<double>> values_;
    bool cumulative_ = false;
    bool signed_ = false;
};

/// Fills gaps of a cumulative series by linear interpolation of its logarithm.
///
/// Days before the first strictly positive value are filled with the first
/// present value; leading and trailing missing days stay missing.
/// Throws DomainError for non-cumulative input and DataError for decreasing
/// or all-missing input.
DailySeries interpolate_missing(const DailySeries& cumulative);

struct DifferenceResult {
    /// Differences with negative entries clamped to zero.
    DailySeries daily;
    /// Unclamped differences.
    std::vector<double> raw;
    /// Indices whose negative difference was clamped (data revisions).
    std::vector<std::size_t> clamped;
};

/// First differences of a complete cumulative series, output[0] = input[0].
DifferenceResult daily_from_cumulative(const DailySeries& cumulative);

/// Running total of a complete daily series.
DailySeries cumulative_sum(const DailySeries& daily);

/// Trailing mean over up to `window` days ending at each index. Missing days
/// are left out of the mean; the result is missing when the whole window is.
DailySeries rolling_mean(const DailySeries& series, std::size_t window);

} // namespace epitest
