#pragma once

#include "epfbench/metrics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace epf::report {

/// Shortest decimal that parses back to the same double.
std::string format_number(double value);

/// model,zone,date,y_00..y_23,yhat_00..yhat_23
void write_records_csv(const std::vector<eval::ForecastRecord>& records, const std::filesystem::path& path);
std::vector<eval::ForecastRecord> read_records_csv(const std::filesystem::path& path);

void write_metrics_csv(const std::vector<eval::MetricRow>& rows, const std::filesystem::path& path);

/// Rows are model_x, columns model_y; absent entries are empty cells.
void write_dm_csv(const eval::DmMatrix& matrix, const std::filesystem::path& path);

/// Standalone SVG heatmap. Column = model x, row = model y, cell = p(x, y).
/// p above `threshold` is black; lower p runs light (p = 0) to dark
/// (p = threshold). Absent cells are left white.
std::string render_dm_svg(const eval::DmMatrix& matrix, double threshold = eval::kSignificance);
void write_dm_svg(const eval::DmMatrix& matrix, const std::filesystem::path& path,
                  double threshold = eval::kSignificance);

/// Loss series of every model in `zone` that has one record per day over the
/// zone's full date set, in first-seen model order.
std::vector<eval::LossSeries> complete_loss_series(const std::vector<eval::ForecastRecord>& records,
                                                   const std::string& zone);

/// Zones in first-seen order.
std::vector<std::string> zones_of(const std::vector<eval::ForecastRecord>& records);

/// Writes dm_<zone>.csv and dm_<zone>.svg for every zone in `records`.
void emit_dm_reports(const std::vector<eval::ForecastRecord>& records, const std::filesystem::path& out_dir,
                     double threshold = eval::kSignificance);

/// metrics.csv plus the DM files. Completeness is measured against the
/// number of distinct dates per zone unless `expected_days` is given.
void emit_reports(const std::vector<eval::ForecastRecord>& records, const std::filesystem::path& out_dir,
                  double threshold = eval::kSignificance, std::optional<std::size_t> expected_days = std::nullopt);

} // namespace epf::report
