#include "epfbench/forecaster.hpp"

#include "epfbench/baselines.hpp"
#include "epfbench/error.hpp"

#include <functional>

namespace epf::eval {

namespace {

class FunctionForecaster : public Forecaster {
public:
    using Fn = std::function<DayForecast(const ForecastInput&)>;

    FunctionForecaster(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

    const std::string& name() const override { return name_; }
    DayForecast forecast(const ForecastInput& input) override { return fn_(input); }

private:
    std::string name_;
    Fn fn_;
};

} // namespace

const std::vector<std::string>& native_model_names() {
    static const std::vector<std::string> names{"Naive",        "SeasonalNaiveDay", "SeasonalNaiveWeek", "MSTL",
                                                "ElasticNet",   "KNNRegressor",     "SVR"};
    return names;
}

std::unique_ptr<Forecaster> make_native_forecaster(std::string_view name, const NativeOptions& options) {
    const std::string key{name};
    FunctionForecaster::Fn fn;
    if (key == "Naive") {
        fn = [](const ForecastInput& in) { return classical::naive_forecast(in.context); };
    } else if (key == "SeasonalNaiveDay") {
        fn = [](const ForecastInput& in) { return classical::seasonal_naive_forecast(in.context, kHoursPerDay); };
    } else if (key == "SeasonalNaiveWeek") {
        fn = [](const ForecastInput& in) { return classical::seasonal_naive_forecast(in.context, kHoursPerWeek); };
    } else if (key == "MSTL") {
        fn = [opts = options.mstl](const ForecastInput& in) {
            return classical::mstl_forecast(in.training.values(), opts);
        };
    } else if (key == "ElasticNet" || key == "KNNRegressor" || key == "SVR") {
        const auto kind = key == "ElasticNet" ? ml::MlKind::ElasticNet
                          : key == "SVR"      ? ml::MlKind::Svr
                                              : ml::MlKind::Knn;
        fn = [kind, opts = options.ml](const ForecastInput& in) {
            return ml::ml_forecast_pipeline(kind, in.training, in.context, opts);
        };
    } else {
        throw Error(Errc::InvalidArgument, "unknown native model '" + key + "'");
    }
    return std::make_unique<FunctionForecaster>(key, std::move(fn));
}

} // namespace epf::eval
