#pragma once

#include "epfbench/data.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epf::eval {

struct ForecastRecord {
    std::string model;
    std::string zone;
    Date target_date;
    DayForecast predictions{};
    DayForecast actuals{};
};

double compute_mae(const std::vector<ForecastRecord>& records);
double compute_rmse(const std::vector<ForecastRecord>& records);
/// Percent; |y - yhat| / (|y| + |yhat|) with no factor 2, 0/0 taken as 0.
double compute_smape(const std::vector<ForecastRecord>& records);

struct LossSeries {
    std::string model;
    std::string zone;
    std::vector<Date> dates;
    std::vector<double> losses;  // sum over hours of |y - yhat|
};

/// Records of a single model and zone, any order, one per contiguous day.
LossSeries daily_l1_losses(const std::vector<ForecastRecord>& records);

struct DmResult {
    std::string model_x;
    std::string model_y;
    std::size_t n_days = 0;
    double statistic = 0.0;
    double p_value = 0.0;
};

/// One-sided: small p means x is more accurate than y.
DmResult dm_test(const LossSeries& loss_x, const LossSeries& loss_y);

struct MetricRow {
    std::string model;
    std::string zone;
    double mae = 0.0;
    double rmse = 0.0;
    double smape = 0.0;
    int mae_rank = 0;
    int rmse_rank = 0;
    int smape_rank = 0;
    std::size_t days = 0;
    double completeness = 1.0;
};

/// Rank annotation used in tables: 1 -> "*", 2 -> "+", 3 -> "~", otherwise "".
std::string rank_marker(int rank);

/// One row per (model, zone) in first-seen order. Ranks are 1-based within a
/// zone per metric; equal values share the lower rank. `expected_days`
/// (when given) sets completeness = days / expected_days.
std::vector<MetricRow> metric_table(const std::vector<ForecastRecord>& records,
                                    std::optional<std::size_t> expected_days = std::nullopt);

inline constexpr double kSignificance = 0.1;

struct DmMatrix {
    std::string zone;
    std::vector<std::string> models;
    /// p[x][y] = dm_test(x, y).p_value; absent on the diagonal and for degenerate pairs.
    std::vector<std::vector<std::optional<double>>> p;

    bool significant(std::size_t x, std::size_t y, double threshold = kSignificance) const;
};

DmMatrix dm_matrix(const std::vector<LossSeries>& series);

} // namespace epf::eval
