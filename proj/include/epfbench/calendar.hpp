#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace epf {

using Date = std::chrono::year_month_day;

inline constexpr int kHoursPerDay = 24;
inline constexpr int kHoursPerWeek = 168;

/// Parses "yyyy-MM-dd". Throws epf::Error(InvalidArgument) on anything else.
Date parse_date(std::string_view text);

std::string format_date(const Date& date);

Date add_days(const Date& date, long days);

/// Signed day count `to - from`.
long days_between(const Date& from, const Date& to);

} // namespace epf
