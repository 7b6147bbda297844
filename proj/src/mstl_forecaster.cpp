#include "epfbench/mstl_forecaster.hpp"

#include "epfbench/error.hpp"
#include "epfbench/ets.hpp"

namespace epf::classical {

DayForecast mstl_forecast(std::span<const double> context, const MstlForecastOptions& options) {
    const auto decomposition = mstl_decompose(context, options.periods, options.decomposition);
    const std::size_t n = context.size();

    std::vector<double> deseason(context.begin(), context.end());
    for (const auto& s : decomposition.seasonal) {
        for (std::size_t t = 0; t < n; ++t) {
            deseason[t] -= s[t];
        }
    }
    const auto level = ets_select_fit(deseason).forecast(kHoursPerDay);

    DayForecast out;
    for (std::size_t h = 0; h < out.size(); ++h) {
        double value = level[h];
        for (std::size_t i = 0; i < decomposition.periods.size(); ++i) {
            const std::size_t p = decomposition.periods[i];
            value += decomposition.seasonal[i][n - p + h % p];
        }
        out[h] = value;
    }
    return out;
}

} // namespace epf::classical
