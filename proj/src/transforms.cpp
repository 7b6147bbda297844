#include "epfbench/transforms.hpp"

#include "epfbench/error.hpp"
#include "epfbench/stats.hpp"

#include <algorithm>
#include <cmath>

namespace epf::transforms {

namespace {

// Linear interpolation of y over strictly-increasing-or-tied xs, taking the
// right-most knot among ties.
double interp_right(double x, const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) {
        return ys.front();
    }
    const auto j = static_cast<std::size_t>(it - xs.begin()) - 1;
    if (j + 1 == xs.size()) {
        return ys.back();
    }
    const double t = (x - xs[j]) / (xs[j + 1] - xs[j]);
    return ys[j] + t * (ys[j + 1] - ys[j]);
}

// Same, taking the left-most knot among ties.
double interp_left(double x, const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) {
        return ys.back();
    }
    const auto i = static_cast<std::size_t>(it - xs.begin());
    if (xs[i] == x || i == 0) {
        return ys[i];
    }
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

} // namespace

QuantileMap::QuantileMap(std::vector<double> reference, double clip_eps)
    : reference_(std::move(reference)), levels_(reference_.size()), clip_eps_(clip_eps) {
    const double denom = static_cast<double>(reference_.size() - 1);
    for (std::size_t j = 0; j < levels_.size(); ++j) {
        levels_[j] = static_cast<double>(j) / denom;
    }
}

QuantileMap QuantileMap::fit(std::span<const double> training, std::size_t n_quantiles, double clip_eps) {
    if (!(clip_eps > 0.0 && clip_eps < 0.5)) {
        throw Error(Errc::InvalidArgument, "clip_eps must lie in (0, 0.5)");
    }
    std::vector<double> sorted;
    sorted.reserve(training.size());
    for (double v : training) {
        if (std::isfinite(v)) {
            sorted.push_back(v);
        }
    }
    if (sorted.size() < 2 || n_quantiles < 2) {
        throw Error(Errc::TooFewSamples, "quantile map needs at least 2 finite values");
    }
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) {
        throw Error(Errc::DegenerateDistribution, "training data is constant");
    }
    const std::size_t m = std::min(n_quantiles, sorted.size());
    const double last = static_cast<double>(sorted.size() - 1);
    std::vector<double> reference(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double pos = last * static_cast<double>(j) / static_cast<double>(m - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        reference[j] = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    }
    // Interpolation can break ties by an ulp the wrong way round.
    for (std::size_t j = 1; j < m; ++j) {
        reference[j] = std::max(reference[j], reference[j - 1]);
    }
    return QuantileMap(std::move(reference), clip_eps);
}

double QuantileMap::cdf(double x) const {
    if (x <= reference_.front()) {
        return 0.0;
    }
    if (x >= reference_.back()) {
        return 1.0;
    }
    return 0.5 * (interp_right(x, reference_, levels_) + interp_left(x, reference_, levels_));
}

double QuantileMap::transform(double x) const {
    const double p = std::clamp(cdf(x), clip_eps_, 1.0 - clip_eps_);
    return stats::normal_quantile(p);
}

double QuantileMap::inverse(double z) const {
    const double p = stats::normal_cdf(z);
    if (p <= clip_eps_) {
        return reference_.front();
    }
    if (p >= 1.0 - clip_eps_) {
        return reference_.back();
    }
    return 0.5 * (interp_right(p, levels_, reference_) + interp_left(p, levels_, reference_));
}

std::vector<double> QuantileMap::transform(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return transform(x); });
    return out;
}

std::vector<double> QuantileMap::inverse(std::span<const double> zs) const {
    std::vector<double> out(zs.size());
    std::transform(zs.begin(), zs.end(), out.begin(), [this](double z) { return inverse(z); });
    return out;
}

} // namespace epf::transforms
