#pragma once

#include "epfbench/data.hpp"
#include "epfbench/forecaster.hpp"
#include "epfbench/metrics.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace epf::eval {

struct BacktestOptions {
    Date test_start;
    Date test_end;
    std::size_t train_days = 84;
    std::size_t input_hours = kHoursPerWeek;
    std::size_t jobs = 1;
};

struct ForecastFailure {
    std::string model;
    std::string zone;
    Date target_date;
    std::string message;
};

struct BacktestResult {
    std::vector<ForecastRecord> records;  // model-major, date-ordered
    std::vector<ForecastFailure> failures;
    std::size_t test_days = 0;
};

/// Training window for day D: the `train_days` days ending at D - 1.
data::HourlySeries training_window(const data::HourlySeries& series, const Date& target, std::size_t train_days);

/// For each day in [test_start, test_end] and each model: refit on the
/// trailing window, forecast the next 24 hours from its last `input_hours`
/// values and pair the result with that day's actuals. A model that throws
/// for one day gets a failure entry for that day only. Throws OutOfRange when
/// the series does not cover the span.
BacktestResult rolling_backtest(const data::HourlySeries& series, const std::vector<Forecaster*>& models,
                                const BacktestOptions& options);

} // namespace epf::eval
