#pragma once

#include "epfbench/data.hpp"
#include "epfbench/ml_pipeline.hpp"
#include "epfbench/mstl_forecaster.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epf::eval {

/// What a forecaster may see for one target day: the trailing training
/// window and the context at its end. Nothing from the target day onward.
struct ForecastInput {
    const data::HourlySeries& training;
    std::span<const double> context;
    Date target_date;
};

class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual const std::string& name() const = 0;
    virtual DayForecast forecast(const ForecastInput& input) = 0;
    /// Whether forecast() may run for several days at once.
    virtual bool concurrent() const { return true; }
    /// Called once after the last day of a backtest.
    virtual void finish() {}
};

struct NativeOptions {
    classical::MstlForecastOptions mstl{};
    ml::MlPipelineOptions ml{};
};

/// Naive, SeasonalNaiveDay, SeasonalNaiveWeek, MSTL, ElasticNet, KNNRegressor, SVR.
const std::vector<std::string>& native_model_names();

std::unique_ptr<Forecaster> make_native_forecaster(std::string_view name, const NativeOptions& options = {});

} // namespace epf::eval
