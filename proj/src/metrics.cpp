#include "epfbench/metrics.hpp"

#include "epfbench/error.hpp"
#include "epfbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace epf::eval {

namespace {

void require_records(const std::vector<ForecastRecord>& records) {
    if (records.empty()) {
        throw Error(Errc::EmptyInput, "no forecast records");
    }
}

template <typename F>
double mean_over_pairs(const std::vector<ForecastRecord>& records, F term) {
    require_records(records);
    double sum = 0.0;
    for (const auto& r : records) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            sum += term(r.actuals[h], r.predictions[h]);
        }
    }
    return sum / (static_cast<double>(records.size()) * kHoursPerDay);
}

std::vector<int> ranks_of(const std::vector<double>& values) {
    std::vector<int> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        int better = 0;
        for (double v : values) {
            if (v < values[i]) {
                ++better;
            }
        }
        out[i] = better + 1;
    }
    return out;
}

} // namespace

double compute_mae(const std::vector<ForecastRecord>& records) {
    return mean_over_pairs(records, [](double y, double f) { return std::abs(y - f); });
}

double compute_rmse(const std::vector<ForecastRecord>& records) {
    return std::sqrt(mean_over_pairs(records, [](double y, double f) { return (y - f) * (y - f); }));
}

double compute_smape(const std::vector<ForecastRecord>& records) {
    return 100.0 * mean_over_pairs(records, [](double y, double f) {
        const double denom = std::abs(y) + std::abs(f);
        return denom == 0.0 ? 0.0 : std::abs(y - f) / denom;
    });
}

LossSeries daily_l1_losses(const std::vector<ForecastRecord>& records) {
    require_records(records);
    std::vector<const ForecastRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& r : records) {
        sorted.push_back(&r);
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
        return std::chrono::sys_days{a->target_date} < std::chrono::sys_days{b->target_date};
    });
    LossSeries out;
    out.model = sorted.front()->model;
    out.zone = sorted.front()->zone;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& r = *sorted[i];
        if (i > 0) {
            const auto gap = days_between(sorted[i - 1]->target_date, r.target_date);
            if (gap == 0) {
                throw Error(Errc::DuplicateDay, out.model + "/" + out.zone + ": two records for " +
                                                    format_date(r.target_date));
            }
            if (gap > 1) {
                throw Error(Errc::MissingDay, out.model + "/" + out.zone + ": no record for " +
                                                  format_date(add_days(sorted[i - 1]->target_date, 1)));
            }
        }
        double loss = 0.0;
        for (int h = 0; h < kHoursPerDay; ++h) {
            loss += std::abs(r.actuals[h] - r.predictions[h]);
        }
        out.dates.push_back(r.target_date);
        out.losses.push_back(loss);
    }
    return out;
}

DmResult dm_test(const LossSeries& loss_x, const LossSeries& loss_y) {
    const std::size_t n = loss_x.losses.size();
    if (n != loss_y.losses.size() || loss_x.dates.size() != n || loss_y.dates.size() != n) {
        throw Error(Errc::LengthMismatch, loss_x.model + " has " + std::to_string(n) + " days, " + loss_y.model +
                                              " has " + std::to_string(loss_y.losses.size()));
    }
    if (n < 2) {
        throw Error(Errc::TooFewSamples, "DM test needs at least 2 days");
    }
    for (std::size_t t = 0; t < n; ++t) {
        if (loss_x.dates[t] != loss_y.dates[t]) {
            throw Error(Errc::DateMisaligned, "day " + std::to_string(t) + ": " + format_date(loss_x.dates[t]) +
                                                  " vs " + format_date(loss_y.dates[t]));
        }
    }
    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        mean += loss_x.losses[t] - loss_y.losses[t];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double d = (loss_x.losses[t] - loss_y.losses[t]) - mean;
        ss += d * d;
    }
    const double s = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(s > 0.0)) {
        throw Error(Errc::DegenerateLosses, loss_x.model + " vs " + loss_y.model + ": loss differential is constant");
    }
    DmResult out;
    out.model_x = loss_x.model;
    out.model_y = loss_y.model;
    out.n_days = n;
    out.statistic = std::sqrt(static_cast<double>(n)) * mean / s;
    out.p_value = stats::normal_cdf(out.statistic);
    return out;
}

std::string rank_marker(int rank) {
    switch (rank) {
    case 1: return "*";
    case 2: return "+";
    case 3: return "~";
    default: return "";
    }
}

std::vector<MetricRow> metric_table(const std::vector<ForecastRecord>& records,
                                    std::optional<std::size_t> expected_days) {
    std::vector<std::pair<std::string, std::string>> keys;
    std::map<std::pair<std::string, std::string>, std::vector<ForecastRecord>> groups;
    for (const auto& r : records) {
        auto key = std::make_pair(r.model, r.zone);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) {
            keys.push_back(key);
        }
        it->second.push_back(r);
    }
    std::vector<MetricRow> rows;
    for (const auto& key : keys) {
        const auto& group = groups.at(key);
        MetricRow row;
        row.model = key.first;
        row.zone = key.second;
        row.mae = compute_mae(group);
        row.rmse = compute_rmse(group);
        row.smape = compute_smape(group);
        row.days = group.size();
        if (expected_days && *expected_days > 0) {
            row.completeness = static_cast<double>(row.days) / static_cast<double>(*expected_days);
        }
        rows.push_back(row);
    }
    std::vector<std::string> zones;
    for (const auto& row : rows) {
        if (std::find(zones.begin(), zones.end(), row.zone) == zones.end()) {
            zones.push_back(row.zone);
        }
    }
    for (const auto& zone : zones) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].zone == zone) {
                idx.push_back(i);
            }
        }
        auto assign = [&](double MetricRow::*value, int MetricRow::*rank) {
            std::vector<double> v;
            for (auto i : idx) {
                v.push_back(rows[i].*value);
            }
            const auto r = ranks_of(v);
            for (std::size_t k = 0; k < idx.size(); ++k) {
                rows[idx[k]].*rank = r[k];
            }
        };
        assign(&MetricRow::mae, &MetricRow::mae_rank);
        assign(&MetricRow::rmse, &MetricRow::rmse_rank);
        assign(&MetricRow::smape, &MetricRow::smape_rank);
    }
    return rows;
}

bool DmMatrix::significant(std::size_t x, std::size_t y, double threshold) const {
    const auto& v = p.at(x).at(y);
    return v.has_value() && *v <= threshold;
}

DmMatrix dm_matrix(const std::vector<LossSeries>& series) {
    DmMatrix out;
    if (!series.empty()) {
        out.zone = series.front().zone;
    }
    const std::size_t m = series.size();
    out.p.assign(m, std::vector<std::optional<double>>(m));
    for (const auto& s : series) {
        out.models.push_back(s.model);
    }
    for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = x + 1; y < m; ++y) {
            try {
                const auto r = dm_test(series[x], series[y]);
                out.p[x][y] = r.p_value;
                out.p[y][x] = stats::normal_cdf(-r.statistic);
            } catch (const Error& e) {
                if (e.code() != Errc::DegenerateLosses) {
                    throw;
                }
            }
        }
    }
    return out;
}

} // namespace epf::eval
