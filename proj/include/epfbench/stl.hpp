#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace epf::classical {

struct StlOptions {
    std::size_t seasonal_window = 13;
    std::size_t trend_window = 0;    // 0: smallest odd >= 1.5 p / (1 - 1.5 / seasonal_window)
    std::size_t lowpass_window = 0;  // 0: smallest odd >= p
    std::size_t inner_iters = 2;
    std::size_t robust_iters = 0;
};

/// Additive decomposition. `seasonal[i]` belongs to `periods[i]`; the
/// remainder is defined so that the components sum back to the input.
struct StlDecomposition {
    std::vector<double> trend;
    std::vector<std::vector<double>> seasonal;
    std::vector<double> remainder;
    std::vector<std::size_t> periods;

    const std::vector<double>& seasonal_for(std::size_t period) const;
};

std::size_t default_trend_window(std::size_t period, std::size_t seasonal_window);

/// Classic loess-based STL (degree-1 cycle-subseries and trend smoothers,
/// low-pass filter of moving averages p, p, 3 followed by loess).
StlDecomposition stl_decompose(std::span<const double> series, std::size_t period,
                               const StlOptions& options = {});

struct MstlOptions {
    StlOptions stl{};
    std::size_t sweeps = 2;
};

/// Multiple seasonal decomposition: one STL pass per period in ascending
/// order, repeated `sweeps` times, each pass re-adding the period's previous
/// estimate before extracting it again.
StlDecomposition mstl_decompose(std::span<const double> series, const std::vector<std::size_t>& periods,
                                const MstlOptions& options = {});

} // namespace epf::classical
