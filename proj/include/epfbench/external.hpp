#pragma once

#include "epfbench/data.hpp"
#include "epfbench/error.hpp"
#include "epfbench/forecaster.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace epf::external {

struct ForecastRequest {
    std::int64_t request_id = 0;
    std::string zone;
    std::vector<double> context;
    Date context_end_day;
    int context_end_hour = 23;
    int horizon = kHoursPerDay;
};

struct ForecastResponse {
    std::int64_t request_id = 0;
    DayForecast forecast{};
};

struct AdapterOptions {
    std::chrono::milliseconds timeout{std::chrono::seconds{60}};
    std::chrono::milliseconds startup_timeout{std::chrono::seconds{300}};
    std::size_t input_size = kHoursPerWeek;
};

/// Host side of the newline-delimited JSON protocol. Owns one child process:
/// hello on startup, one request in flight at a time, shutdown on close.
/// After a protocol error, timeout or crash the adapter is dead and every
/// further call fails without touching the child.
class ExternalProcess {
public:
    ExternalProcess(std::vector<std::string> command, AdapterOptions options = {});
    ~ExternalProcess();

    ExternalProcess(const ExternalProcess&) = delete;
    ExternalProcess& operator=(const ExternalProcess&) = delete;

    /// Spawns the child and validates its hello record. Idempotent.
    void start();
    ForecastResponse request(const ForecastRequest& req);
    /// Sends shutdown and reaps the child. Returns its exit code.
    std::optional<int> close();

    const std::string& child_name() const noexcept { return child_name_; }
    bool running() const noexcept { return pid_ > 0; }
    long pid() const noexcept { return pid_; }

private:
    std::string read_line(std::chrono::milliseconds timeout, std::int64_t request_id);
    void write_line(const std::string& line);
    [[noreturn]] void fail(Errc code, const std::string& message);
    void kill_child();
    int reap();

    std::vector<std::string> command_;
    AdapterOptions options_;
    long pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::string child_name_;
    std::optional<std::string> dead_reason_;
    bool started_ = false;
};

/// Spawn, handshake, send every request in order, shut down.
std::vector<ForecastResponse> run_external_forecaster(const std::vector<std::string>& command,
                                                      const std::vector<ForecastRequest>& requests,
                                                      AdapterOptions options = {});

std::string encode_request(const ForecastRequest& req);

/// Backtest handle for an external child; serialized on the single child.
class ExternalForecaster : public eval::Forecaster {
public:
    ExternalForecaster(std::string name, std::vector<std::string> command, AdapterOptions options = {});

    const std::string& name() const override { return name_; }
    DayForecast forecast(const eval::ForecastInput& input) override;
    bool concurrent() const override { return false; }
    void finish() override;

private:
    std::string name_;
    ExternalProcess process_;
    std::mutex mutex_;
    std::int64_t next_id_ = 1;
};

} // namespace epf::external
