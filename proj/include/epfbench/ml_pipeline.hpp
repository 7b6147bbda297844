#pragma once

#include "epfbench/data.hpp"
#include "epfbench/elastic_net.hpp"
#include "epfbench/svr.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace epf::ml {

enum class MlKind { ElasticNet, Knn, Svr };

std::string_view to_string(MlKind kind) noexcept;

struct MlPipelineOptions {
    std::size_t n_quantiles = 1000;
    bool transform_targets = true;
    std::size_t input_days = kInputDays;
    std::size_t knn_k = 5;
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
    std::optional<double> svr_gamma;  // default: 1 / (features * input variance)
    ElasticNetCvOptions elastic_net{};
    SvrOptions svr{};
};

/// Fit the quantile map on the training window, fit the model on daily
/// windows in transformed space, forecast from the transformed context and
/// map the 24 values back to EUR/MWh.
DayForecast ml_forecast_pipeline(MlKind kind, const data::HourlySeries& training, std::span<const double> context,
                                 const MlPipelineOptions& options = {});

} // namespace epf::ml
