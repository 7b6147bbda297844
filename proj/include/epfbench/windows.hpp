#pragma once

#include "epfbench/data.hpp"

#include <Eigen/Dense>

#include <vector>

namespace epf::ml {

/// Supervised samples at daily stride: each row of `inputs` holds the
/// `input_days` * 24 hours immediately preceding the day whose 24 hours form
/// the matching row of `targets`.
struct WindowDataset {
    Eigen::MatrixXd inputs;
    Eigen::MatrixXd targets;
    std::vector<Date> sample_days;

    Eigen::Index samples() const noexcept { return inputs.rows(); }
    Eigen::Index features() const noexcept { return inputs.cols(); }
};

inline constexpr std::size_t kInputDays = 7;

WindowDataset build_windows(const data::HourlySeries& training, std::size_t input_days = kInputDays);

/// First `count` samples (temporal order).
WindowDataset head(const WindowDataset& data, Eigen::Index count);

} // namespace epf::ml
