#pragma once

#include "epfbench/calendar.hpp"

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace epf {

/// Point forecast for the 24 delivery hours of one market day.
using DayForecast = std::array<double, kHoursPerDay>;

} // namespace epf

namespace epf::data {

/// One hourly price as published, before DST normalization.
struct RawObservation {
    std::chrono::sys_seconds instant;  // UTC start of the delivery hour
    std::chrono::minutes offset{0};    // local market offset from UTC
    double price = 0.0;                // EUR/MWh, may be negative
    std::string zone;

    Date local_date() const;
    int local_hour() const;
};

/// Timezone rule used to interpret naive (offset-less) timestamps.
struct ZoneRule {
    std::chrono::minutes standard_offset{60};
    bool eu_summer_time = true;

    /// "CET" (default), "EET", "WET", "UTC" or a fixed offset such as "+01:00".
    static ZoneRule parse(std::string_view name);
};

struct CsvOptions {
    std::string ts_col = "MTU (CET/CEST)";
    std::string price_col = "Day-ahead Price [EUR/MWh]";
    char delimiter = ',';
    ZoneRule zone_rule{};
};

struct ParseResult {
    std::vector<RawObservation> observations;
    std::size_t dropped_empty = 0;
};

/// Reads a day-ahead price export. Accepted timestamp forms: ISO-8601 with
/// offset ("2024-03-31T03:00+02:00", "...Z"), naive "yyyy-MM-dd HH:mm"
/// interpreted with `options.zone_rule`, and the transparency platform MTU
/// interval "dd.MM.yyyy HH:mm - dd.MM.yyyy HH:mm" (start of interval used).
/// Output is sorted by instant; duplicate instants keep the last row.
ParseResult parse_entsoe_csv(const std::filesystem::path& path, const std::string& zone,
                             const CsvOptions& options = {});

/// Gap-free hourly series on a 24-per-day grid in local market time.
class HourlySeries {
public:
    HourlySeries(std::string zone, Date start_day, std::vector<double> values);

    const std::string& zone() const noexcept { return zone_; }
    Date start_day() const noexcept { return start_day_; }
    Date end_day() const;
    std::size_t days() const noexcept { return values_.size() / kHoursPerDay; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool covers(const Date& day) const;
    /// Index of hour 0 of `day`; `day` must be covered.
    std::size_t hour_index(const Date& day) const;
    std::span<const double> day_values(const Date& day) const;

    bool operator==(const HourlySeries&) const = default;

private:
    std::string zone_;
    Date start_day_;
    std::vector<double> values_;
};

struct MarketDay {
    Date date;
    std::array<double, kHoursPerDay> hours{};
};

MarketDay market_day(const HourlySeries& series, const Date& day);

/// Turns 23- and 25-hour clock-change days into 24-hour days: the skipped
/// spring hour is the mean of its temporal neighbours, the repeated autumn
/// hour is the mean of its two observations.
HourlySeries normalize_dst(const std::vector<RawObservation>& observations);

/// Canonical "date,hour,price" file. Prices use the shortest decimal form
/// that parses back to the same double.
void write_canonical(const HourlySeries& series, const std::filesystem::path& path);
HourlySeries read_canonical(const std::filesystem::path& path, const std::string& zone);

/// The `n_days` whole days ending with `end_day`.
HourlySeries slice_window(const HourlySeries& series, const Date& end_day, std::size_t n_days);

} // namespace epf::data
