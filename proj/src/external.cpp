#include "epfbench/external.hpp"

#include "epfbench/error.hpp"

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace epf::external {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

void ignore_sigpipe() {
    static const bool done = [] {
        struct sigaction sa {};
        sa.sa_handler = SIG_IGN;
        sigemptyset(&sa.sa_mask);
        sigaction(SIGPIPE, &sa, nullptr);
        return true;
    }();
    (void)done;
}

std::string stamp(const Date& day, int hour) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "T%02d", hour);
    return format_date(day) + buf;
}

} // namespace

std::string encode_request(const ForecastRequest& req) {
    json j;
    j["type"] = "forecast";
    j["request_id"] = req.request_id;
    j["zone"] = req.zone;
    j["context"] = req.context;
    j["context_end"] = stamp(req.context_end_day, req.context_end_hour);
    return j.dump();
}

ExternalProcess::ExternalProcess(std::vector<std::string> command, AdapterOptions options)
    : command_(std::move(command)), options_(options) {
    if (command_.empty()) {
        throw Error(Errc::SpawnFailed, "empty command");
    }
}

ExternalProcess::~ExternalProcess() {
    try {
        close();
    } catch (...) {
        kill_child();
    }
}

void ExternalProcess::fail(Errc code, const std::string& message) {
    dead_reason_ = std::string(to_string(code)) + ": " + message;
    if (code != Errc::ChildCrashed) {
        kill_child();
    }
    throw Error(code, message);
}

void ExternalProcess::kill_child() {
    if (pid_ > 0) {
        ::kill(static_cast<pid_t>(pid_), SIGKILL);
        reap();
    }
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        ::close(from_child_);
        from_child_ = -1;
    }
}

int ExternalProcess::reap() {
    int status = 0;
    int code = -1;
    if (pid_ > 0) {
        while (::waitpid(static_cast<pid_t>(pid_), &status, 0) < 0 && errno == EINTR) {
        }
        if (WIFEXITED(status)) {
            code = WEXITSTATUS(status);
        } else if (WIFSIGNALED(status)) {
            code = 128 + WTERMSIG(status);
        }
        pid_ = -1;
    }
    return code;
}

void ExternalProcess::start() {
    if (started_) {
        if (dead_reason_) {
            throw Error(Errc::ProtocolError, "adapter is dead after " + *dead_reason_);
        }
        return;
    }
    started_ = true;
    ignore_sigpipe();

    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0) {
        dead_reason_ = "pipe creation failed";
        throw Error(Errc::SpawnFailed, std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

    std::vector<char*> argv;
    for (auto& arg : command_) {
        argv.push_back(arg.data());
    }
    argv.push_back(nullptr);
    pid_t pid = 0;
    const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        dead_reason_ = "spawn failed";
        throw Error(Errc::SpawnFailed, "cannot spawn '" + command_.front() + "': " + std::strerror(rc));
    }
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];

    std::string line;
    try {
        line = read_line(options_.startup_timeout, -1);
    } catch (const Error& e) {
        if (e.code() == Errc::ChildCrashed) {
            fail(Errc::HandshakeFailed, std::string("child exited before hello: ") + e.what());
        }
        throw;
    }
    json hello;
    try {
        hello = json::parse(line);
    } catch (const json::exception&) {
        fail(Errc::HandshakeFailed, "first line is not a JSON record: " + line.substr(0, 200));
    }
    if (!hello.is_object() || hello.value("type", "") != "hello" || !hello.contains("input_size") ||
        !hello.contains("horizon") || !hello["input_size"].is_number_integer() ||
        !hello["horizon"].is_number_integer()) {
        fail(Errc::HandshakeFailed, "missing or malformed hello record: " + line.substr(0, 200));
    }
    if (hello["input_size"].get<long long>() != static_cast<long long>(options_.input_size) ||
        hello["horizon"].get<long long>() != kHoursPerDay) {
        fail(Errc::HandshakeFailed, "child announces input_size " + hello["input_size"].dump() + ", horizon " +
                                        hello["horizon"].dump() + "; host needs " +
                                        std::to_string(options_.input_size) + ", 24");
    }
    if (hello.contains("name") && hello["name"].is_string()) {
        child_name_ = hello["name"].get<std::string>();
    }
}

void ExternalProcess::write_line(const std::string& line) {
    std::string data = line + '\n';
    const char* p = data.data();
    std::size_t left = data.size();
    while (left > 0) {
        const ssize_t n = ::write(to_child_, p, left);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            const int code = reap();
            fail(Errc::ChildCrashed, "child closed its input (exit code " + std::to_string(code) + ")");
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
}

std::string ExternalProcess::read_line(std::chrono::milliseconds timeout, std::int64_t request_id) {
    const auto deadline = Clock::now() + timeout;
    const std::string what = request_id >= 0 ? "request " + std::to_string(request_id) : std::string("hello");
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.find_first_not_of(" \t") == std::string::npos) {
                continue;
            }
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        if (left.count() <= 0) {
            fail(Errc::Timeout, "no answer to " + what + " within " + std::to_string(timeout.count()) + " ms");
        }
        pollfd pfd{from_child_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
        if (rc < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail(Errc::ChildCrashed, std::string("poll failed: ") + std::strerror(errno));
        }
        if (rc == 0) {
            continue;
        }
        char chunk[65536];
        const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) {
                continue;
            }
            fail(Errc::ChildCrashed, std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            const int code = reap();
            kill_child();
            fail(Errc::ChildCrashed, "child exited with code " + std::to_string(code) + " while awaiting " + what);
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

ForecastResponse ExternalProcess::request(const ForecastRequest& req) {
    start();
    if (dead_reason_) {
        throw Error(Errc::ProtocolError, "adapter is dead after " + *dead_reason_);
    }
    if (req.context.size() != options_.input_size || req.horizon != kHoursPerDay) {
        throw Error(Errc::InvalidArgument, "request " + std::to_string(req.request_id) + " has context length " +
                                               std::to_string(req.context.size()) + ", expected " +
                                               std::to_string(options_.input_size));
    }
    write_line(encode_request(req));
    const std::string id = std::to_string(req.request_id);
    const std::string line = read_line(options_.timeout, req.request_id);

    json msg;
    try {
        msg = json::parse(line);
    } catch (const json::exception&) {
        fail(Errc::ProtocolError, "request " + id + ": unparseable line: " + line.substr(0, 200));
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
        fail(Errc::ProtocolError, "request " + id + ": record without type");
    }
    if (!msg.contains("request_id") || !msg["request_id"].is_number_integer() ||
        msg["request_id"].get<std::int64_t>() != req.request_id) {
        fail(Errc::ProtocolError, "request " + id + ": response carries request_id " +
                                      (msg.contains("request_id") ? msg["request_id"].dump() : std::string("<none>")));
    }
    const auto type = msg["type"].get<std::string>();
    if (type == "error") {
        // Well-formed per-request failure; the child stays usable.
        throw Error(Errc::ProtocolError, "request " + id + ": child reported error: " + msg.value("message", ""));
    }
    if (type != "forecast_result") {
        fail(Errc::ProtocolError, "request " + id + ": unexpected record type '" + type + "'");
    }
    if (!msg.contains("forecast") || !msg["forecast"].is_array()) {
        fail(Errc::ProtocolError, "request " + id + ": forecast missing");
    }
    const auto& values = msg["forecast"];
    if (values.size() != static_cast<std::size_t>(kHoursPerDay)) {
        fail(Errc::ProtocolError, "request " + id + ": forecast has " + std::to_string(values.size()) +
                                      " values, expected 24");
    }
    ForecastResponse out;
    out.request_id = req.request_id;
    for (std::size_t h = 0; h < values.size(); ++h) {
        if (!values[h].is_number() || !std::isfinite(values[h].get<double>())) {
            fail(Errc::ProtocolError, "request " + id + ": non-finite value at hour " + std::to_string(h));
        }
        out.forecast[h] = values[h].get<double>();
    }
    return out;
}

std::optional<int> ExternalProcess::close() {
    if (pid_ <= 0) {
        kill_child();
        return std::nullopt;
    }
    if (!dead_reason_ && to_child_ >= 0) {
        const std::string msg = json{{"type", "shutdown"}}.dump() + '\n';
        [[maybe_unused]] const ssize_t n = ::write(to_child_, msg.data(), msg.size());
    }
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = -1;
    }
    // Grace period, then force.
    const auto deadline = Clock::now() + std::chrono::seconds{10};
    while (Clock::now() < deadline) {
        int status = 0;
        const pid_t r = ::waitpid(static_cast<pid_t>(pid_), &status, WNOHANG);
        if (r == static_cast<pid_t>(pid_)) {
            pid_ = -1;
            kill_child();
            if (WIFEXITED(status)) {
                return WEXITSTATUS(status);
            }
            return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds{5});
    }
    kill_child();
    return std::nullopt;
}

std::vector<ForecastResponse> run_external_forecaster(const std::vector<std::string>& command,
                                                      const std::vector<ForecastRequest>& requests,
                                                      AdapterOptions options) {
    ExternalProcess process(command, options);
    process.start();
    std::vector<ForecastResponse> out;
    out.reserve(requests.size());
    for (const auto& req : requests) {
        out.push_back(process.request(req));
    }
    process.close();
    return out;
}

ExternalForecaster::ExternalForecaster(std::string name, std::vector<std::string> command, AdapterOptions options)
    : name_(std::move(name)), process_(std::move(command), options) {}

DayForecast ExternalForecaster::forecast(const eval::ForecastInput& input) {
    std::lock_guard lock(mutex_);
    ForecastRequest req;
    req.request_id = next_id_++;
    req.zone = input.training.zone();
    req.context.assign(input.context.begin(), input.context.end());
    req.context_end_day = add_days(input.target_date, -1);
    req.context_end_hour = kHoursPerDay - 1;
    return process_.request(req).forecast;
}

void ExternalForecaster::finish() {
    std::lock_guard lock(mutex_);
    process_.close();
}

} // namespace epf::external
