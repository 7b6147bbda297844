#pragma once

#include "epfbench/data.hpp"

#include <span>

namespace epf::classical {

/// Last observed value repeated for all 24 hours.
DayForecast naive_forecast(std::span<const double> context);

/// Copy of the context at lag `period` (24: previous day, 168: same weekday
/// one week earlier).
DayForecast seasonal_naive_forecast(std::span<const double> context, std::size_t period);

} // namespace epf::classical
