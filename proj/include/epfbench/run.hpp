#pragma once

#include "epfbench/backtest.hpp"
#include "epfbench/calendar.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace epf::run {

struct RunConfig {
    std::vector<std::string> zones;
    /// Native model name, or "ext:NAME=COMMAND ARG..." for an external child.
    std::vector<std::string> models;
    std::string test_start = "2024-01-01";
    std::string test_end = "2024-12-31";
    std::size_t train_days = 84;
    std::size_t input_hours = kHoursPerWeek;
    std::string data_dir;
    std::string out_dir = "out";
    std::int64_t seed = 0;
    bool transform_targets = true;
    std::size_t n_quantiles = 1000;
    double significance = 0.1;
    double timeout_s = 60.0;
    double startup_timeout_s = 300.0;
    std::size_t jobs = 1;  // not part of the run identity
};

struct ModelSpec {
    std::string name;
    std::vector<std::string> command;  // empty for native models

    bool external() const noexcept { return !command.empty(); }
};

ModelSpec parse_model_spec(const std::string& spec);

/// Throws Error(InvalidArgument) naming the offending field.
void validate(const RunConfig& config);

/// INI text with a [run] section; comment lines carry `comments`.
std::string to_ini(const RunConfig& config, const std::vector<std::string>& comments = {});

/// Path of the canonical file for `zone`: <data_dir>/<zone>.csv
std::filesystem::path zone_file(const RunConfig& config, const std::string& zone);

/// Builds forecasters for one zone (external children are per zone).
std::vector<std::unique_ptr<eval::Forecaster>> make_forecasters(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;

/// Ingest check, backtest, metrics, DM and reports. Diagnostics go to `log`.
int execute_run(const RunConfig& config, std::ostream& log);

} // namespace epf::run
