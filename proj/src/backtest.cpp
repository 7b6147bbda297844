#include "epfbench/backtest.hpp"

#include "epfbench/error.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <optional>
#include <thread>

namespace epf::eval {

data::HourlySeries training_window(const data::HourlySeries& series, const Date& target, std::size_t train_days) {
    return data::slice_window(series, add_days(target, -1), train_days);
}

BacktestResult rolling_backtest(const data::HourlySeries& series, const std::vector<Forecaster*>& models,
                                const BacktestOptions& options) {
    const long span = days_between(options.test_start, options.test_end) + 1;
    if (span <= 0) {
        throw Error(Errc::InvalidArgument, "test span " + format_date(options.test_start) + ".." +
                                               format_date(options.test_end) + " is empty");
    }
    if (options.input_hours == 0 || options.input_hours % kHoursPerDay != 0 ||
        options.input_hours > options.train_days * kHoursPerDay) {
        throw Error(Errc::InvalidArgument, "input_hours must be a positive multiple of 24 within the training window");
    }
    const Date first_train = add_days(options.test_start, -static_cast<long>(options.train_days));
    if (!series.covers(first_train) || !series.covers(options.test_end)) {
        throw Error(Errc::OutOfRange, series.zone() + ": data " + format_date(series.start_day()) + ".." +
                                          format_date(series.end_day()) + " does not cover " +
                                          format_date(first_train) + ".." + format_date(options.test_end));
    }
    const auto days = static_cast<std::size_t>(span);

    struct Slot {
        std::optional<DayForecast> forecast;
        std::string error;
    };
    std::vector<std::vector<Slot>> slots(models.size(), std::vector<Slot>(days));

    auto run_one = [&](std::size_t m, std::size_t d) {
        const Date target = add_days(options.test_start, static_cast<long>(d));
        const auto training = training_window(series, target, options.train_days);
        assert(days_between(training.end_day(), target) == 1);
        const auto values = training.values();
        const ForecastInput input{training, values.subspan(values.size() - options.input_hours), target};
        try {
            const auto f = models[m]->forecast(input);
            for (double v : f) {
                if (!std::isfinite(v)) {
                    throw Error(Errc::OutOfRange, "non-finite forecast value");
                }
            }
            slots[m][d].forecast = f;
        } catch (const std::exception& e) {
            slots[m][d].error = e.what();
        }
    };

    // A unit is one (model, day) for concurrent models, or all days of a
    // model that must stay on one worker.
    struct Unit {
        std::size_t model;
        std::optional<std::size_t> day;
    };
    std::vector<Unit> units;
    for (std::size_t m = 0; m < models.size(); ++m) {
        if (!models[m]->concurrent()) {
            units.push_back({m, std::nullopt});
        }
    }
    for (std::size_t m = 0; m < models.size(); ++m) {
        if (models[m]->concurrent()) {
            for (std::size_t d = 0; d < days; ++d) {
                units.push_back({m, d});
            }
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t u = next++; u < units.size(); u = next++) {
            const auto& unit = units[u];
            if (unit.day) {
                run_one(unit.model, *unit.day);
            } else {
                for (std::size_t d = 0; d < days; ++d) {
                    run_one(unit.model, d);
                }
            }
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, units.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
    }
    for (auto* model : models) {
        model->finish();
    }

    BacktestResult result;
    result.test_days = days;
    for (std::size_t m = 0; m < models.size(); ++m) {
        for (std::size_t d = 0; d < days; ++d) {
            const Date target = add_days(options.test_start, static_cast<long>(d));
            auto& slot = slots[m][d];
            if (slot.forecast) {
                ForecastRecord rec;
                rec.model = models[m]->name();
                rec.zone = series.zone();
                rec.target_date = target;
                rec.predictions = *slot.forecast;
                const auto actual = series.day_values(target);
                std::copy(actual.begin(), actual.end(), rec.actuals.begin());
                result.records.push_back(std::move(rec));
            } else {
                result.failures.push_back({models[m]->name(), series.zone(), target, std::move(slot.error)});
            }
        }
    }
    return result;
}

} // namespace epf::eval
