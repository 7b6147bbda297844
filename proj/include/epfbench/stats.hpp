#pragma once

namespace epf::stats {

/// Standard normal CDF, computed from the complementary error function so
/// that both tails keep full relative precision.
double normal_cdf(double z) noexcept;

/// Inverse of normal_cdf for p in (0, 1). Returns -inf/+inf at 0/1.
double normal_quantile(double p) noexcept;

} // namespace epf::stats
