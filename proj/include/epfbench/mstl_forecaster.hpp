#pragma once

#include "epfbench/data.hpp"
#include "epfbench/stl.hpp"

#include <span>
#include <vector>

namespace epf::classical {

struct MstlForecastOptions {
    std::vector<std::size_t> periods{24, 168};
    MstlOptions decomposition{};
};

/// MSTL decomposition; each seasonal repeats its final cycle and the
/// deseasonalized series is forecast by the AICc-selected ETS model.
DayForecast mstl_forecast(std::span<const double> context, const MstlForecastOptions& options = {});

} // namespace epf::classical
