#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace epf::classical {

enum class EtsKind { Ses, Holt, DampedHolt };

std::string_view to_string(EtsKind kind) noexcept;

/// Additive-error exponential smoothing without seasonality. States are the
/// ones after the last observation, in the units of the fitted series.
struct EtsModel {
    EtsKind kind = EtsKind::Ses;
    double alpha = 0.5;
    std::optional<double> beta;
    std::optional<double> phi;
    double level = 0.0;
    std::optional<double> trend_state;
    double aicc = 0.0;
    double sse = 0.0;
    std::size_t n_obs = 0;

    /// Number of estimated quantities: smoothing weights plus initial states.
    std::size_t n_params() const noexcept;
    std::vector<double> forecast(std::size_t horizon) const;
};

inline constexpr double kPhiLower = 0.8;
inline constexpr double kPhiUpper = 0.99;

double aicc(double sse, std::size_t n, std::size_t k);

/// Fits one family member by minimizing one-step-ahead SSE over the
/// smoothing weights and initial states.
EtsModel ets_fit(std::span<const double> series, EtsKind kind);

/// Fits SES, Holt and damped Holt and keeps the smallest AICc. Ties go to the
/// model with fewer parameters.
EtsModel ets_select_fit(std::span<const double> series);

} // namespace epf::classical
