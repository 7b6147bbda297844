#include "epfbench/baselines.hpp"

#include "epfbench/error.hpp"

namespace epf::classical {

DayForecast naive_forecast(std::span<const double> context) {
    if (context.empty()) {
        throw Error(Errc::EmptyContext, "naive forecast needs at least one value");
    }
    DayForecast out;
    out.fill(context.back());
    return out;
}

DayForecast seasonal_naive_forecast(std::span<const double> context, std::size_t period) {
    if (period < static_cast<std::size_t>(kHoursPerDay)) {
        throw Error(Errc::InvalidArgument, "seasonal period must be at least 24");
    }
    if (context.size() < period) {
        throw Error(Errc::ContextTooShort, "context of " + std::to_string(context.size()) +
                                               " hours is shorter than period " + std::to_string(period));
    }
    DayForecast out;
    const std::size_t base = context.size() - period;
    for (std::size_t h = 0; h < out.size(); ++h) {
        out[h] = context[base + h];
    }
    return out;
}

} // namespace epf::classical
