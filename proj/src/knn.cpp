#include "epfbench/knn.hpp"

#include "epfbench/error.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace epf::ml {

KnnModel knn_fit(WindowDataset data, std::size_t k) {
    if (k == 0 || static_cast<Eigen::Index>(k) > data.samples()) {
        throw Error(Errc::InvalidArgument, "k = " + std::to_string(k) + " must lie in [1, " +
                                               std::to_string(data.samples()) + "]");
    }
    return KnnModel{std::move(data), k};
}

Eigen::VectorXd knn_forecast(const KnnModel& model, std::span<const double> input) {
    const auto& x = model.stored.inputs;
    if (static_cast<Eigen::Index>(input.size()) != x.cols()) {
        throw Error(Errc::LengthMismatch, "query has " + std::to_string(input.size()) + " values, expected " +
                                              std::to_string(x.cols()));
    }
    const Eigen::Map<const Eigen::RowVectorXd> q(input.data(), x.cols());
    const Eigen::VectorXd dist = (x.rowwise() - q).rowwise().squaredNorm();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
    std::iota(order.begin(), order.end(), 0);
    const auto k = static_cast<std::ptrdiff_t>(model.k);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });
    Eigen::VectorXd out = Eigen::VectorXd::Zero(model.stored.targets.cols());
    for (std::ptrdiff_t i = 0; i < k; ++i) {
        out += model.stored.targets.row(order[static_cast<std::size_t>(i)]).transpose();
    }
    return out / static_cast<double>(model.k);
}

} // namespace epf::ml
