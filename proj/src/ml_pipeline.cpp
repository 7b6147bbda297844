#include "epfbench/ml_pipeline.hpp"

#include "epfbench/error.hpp"
#include "epfbench/knn.hpp"
#include "epfbench/transforms.hpp"

namespace epf::ml {

std::string_view to_string(MlKind kind) noexcept {
    switch (kind) {
    case MlKind::ElasticNet: return "ElasticNet";
    case MlKind::Knn: return "KNNRegressor";
    case MlKind::Svr: return "SVR";
    }
    return "?";
}

DayForecast ml_forecast_pipeline(MlKind kind, const data::HourlySeries& training, std::span<const double> context,
                                 const MlPipelineOptions& options) {
    const std::size_t input_hours = options.input_days * kHoursPerDay;
    if (context.size() != input_hours) {
        throw Error(Errc::LengthMismatch, "context has " + std::to_string(context.size()) + " hours, expected " +
                                              std::to_string(input_hours));
    }
    const auto map = transforms::QuantileMap::fit(training.values(), options.n_quantiles);
    const data::HourlySeries transformed(training.zone(), training.start_day(), map.transform(training.values()));
    WindowDataset windows = build_windows(transformed, options.input_days);
    if (!options.transform_targets) {
        windows.targets = build_windows(training, options.input_days).targets;
    }
    const auto query = map.transform(context);

    Eigen::VectorXd prediction;
    switch (kind) {
    case MlKind::ElasticNet:
        prediction = elasticnet_cv_select(windows, options.elastic_net).model.predict(query);
        break;
    case MlKind::Knn:
        prediction = knn_forecast(knn_fit(windows, options.knn_k), query);
        break;
    case MlKind::Svr: {
        const double gamma = options.svr_gamma.value_or(default_gamma(windows.inputs));
        prediction = svr_fit(windows, options.svr_c, options.svr_epsilon, gamma, options.svr).predict(query);
        break;
    }
    }

    DayForecast out;
    for (std::size_t h = 0; h < out.size(); ++h) {
        const double v = prediction[static_cast<Eigen::Index>(h)];
        out[h] = options.transform_targets ? map.inverse(v) : v;
    }
    return out;
}

} // namespace epf::ml
