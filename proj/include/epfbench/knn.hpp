#pragma once

#include "epfbench/windows.hpp"

#include <Eigen/Dense>

#include <span>

namespace epf::ml {

struct KnnModel {
    WindowDataset stored;
    std::size_t k = 5;
};

KnnModel knn_fit(WindowDataset data, std::size_t k);

/// Unweighted mean of the targets of the k nearest stored inputs (Euclidean).
/// Equal distances are ordered by sample index.
Eigen::VectorXd knn_forecast(const KnnModel& model, std::span<const double> input);

} // namespace epf::ml
