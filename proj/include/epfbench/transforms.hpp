#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace epf::transforms {

/// Empirical-quantile to standard-normal mapping fitted on a training sample.
///
/// The forward map is x -> Phi^-1(clamp(F(x), eps, 1 - eps)) where F is the
/// piecewise-linear CDF through the reference grid (reference[j], j / (m - 1)).
/// Ties in the grid resolve to the midpoint of the tied CDF range, which keeps
/// the map monotone.
class QuantileMap {
public:
    static constexpr std::size_t kDefaultQuantiles = 1000;
    static constexpr double kDefaultClip = 1e-7;

    static QuantileMap fit(std::span<const double> training, std::size_t n_quantiles = kDefaultQuantiles,
                           double clip_eps = kDefaultClip);

    double transform(double x) const;
    double inverse(double z) const;

    std::vector<double> transform(std::span<const double> xs) const;
    std::vector<double> inverse(std::span<const double> zs) const;

    const std::vector<double>& reference() const noexcept { return reference_; }
    std::size_t n_quantiles() const noexcept { return reference_.size(); }
    double clip_eps() const noexcept { return clip_eps_; }

private:
    QuantileMap(std::vector<double> reference, double clip_eps);

    double cdf(double x) const;

    std::vector<double> reference_;
    std::vector<double> levels_;
    double clip_eps_;
};

} // namespace epf::transforms
