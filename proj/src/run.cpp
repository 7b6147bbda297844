#include "epfbench/run.hpp"

#include "epfbench/error.hpp"
#include "epfbench/external.hpp"
#include "epfbench/report.hpp"
#include "epfbench/version.hpp"

#include <Eigen/Core>

#include <chrono>
#include <ctime>
#include <cmath>
#include <fstream>
#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

namespace epf::run {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    std::string word;
    while (in >> word) {
        out.push_back(word);
    }
    return out;
}

std::string quoted(const std::string& s) {
    return "\"" + s + "\"";
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> metadata_comments() {
    return {
        "epfbench run metadata; replay with: epfbench run --config <this file>",
        "created " + utc_now(),
        std::string("epfbench ") + kVersion + ", compiler " + __VERSION__ + ", Eigen " +
            std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
            std::to_string(EIGEN_MINOR_VERSION),
        "decision: DM variance is the plain sample variance of the daily 1-norm loss differential (no HAC)",
        "decision: DM p-value is one-sided, Phi(statistic); small p favours model x",
        "decision: sMAPE has no factor 2 and a 0/0 term counts as 0",
        "decision: a model with any failed day is excluded from that zone's DM matrix",
        "decision: ML models quantile-transform inputs and, if transform_targets, targets",
    };
}

std::chrono::milliseconds to_ms(double seconds) {
    return std::chrono::milliseconds{static_cast<long long>(std::llround(seconds * 1000.0))};
}

} // namespace

ModelSpec parse_model_spec(const std::string& spec) {
    ModelSpec out;
    if (spec.rfind("ext:", 0) == 0) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 4) {
            throw Error(Errc::InvalidArgument, "external model spec must look like ext:NAME=COMMAND: '" + spec + "'");
        }
        out.name = spec.substr(4, eq - 4);
        out.command = split_words(spec.substr(eq + 1));
        if (out.command.empty()) {
            throw Error(Errc::InvalidArgument, "external model '" + out.name + "' has no command");
        }
    } else {
        const auto& names = eval::native_model_names();
        if (std::find(names.begin(), names.end(), spec) == names.end()) {
            throw Error(Errc::InvalidArgument, "unknown model '" + spec + "'");
        }
        out.name = spec;
    }
    if (out.name.find_first_of(",\"\n ") != std::string::npos) {
        throw Error(Errc::InvalidArgument, "model name '" + out.name + "' contains a separator");
    }
    return out;
}

void validate(const RunConfig& config) {
    if (config.zones.empty()) {
        throw Error(Errc::InvalidArgument, "zones: at least one zone is required");
    }
    std::set<std::string> seen_zones;
    for (const auto& z : config.zones) {
        if (z.empty() || z.find_first_of(",/\\\" ") != std::string::npos) {
            throw Error(Errc::InvalidArgument, "zones: invalid zone code '" + z + "'");
        }
        if (!seen_zones.insert(z).second) {
            throw Error(Errc::InvalidArgument, "zones: duplicate zone '" + z + "'");
        }
    }
    if (config.models.empty()) {
        throw Error(Errc::InvalidArgument, "models: at least one model is required");
    }
    std::set<std::string> names;
    for (const auto& m : config.models) {
        const auto spec = parse_model_spec(m);
        if (!names.insert(spec.name).second) {
            throw Error(Errc::InvalidArgument, "models: duplicate model name '" + spec.name + "'");
        }
    }
    const Date start = parse_date(config.test_start);
    const Date end = parse_date(config.test_end);
    if (days_between(start, end) < 0) {
        throw Error(Errc::InvalidArgument, "test span " + config.test_start + ".." + config.test_end + " is empty");
    }
    if (config.train_days < 8) {
        throw Error(Errc::InvalidArgument, "train_days must be at least 8");
    }
    if (config.input_hours == 0 || config.input_hours % kHoursPerDay != 0) {
        throw Error(Errc::InvalidArgument, "input_hours must be a positive multiple of 24");
    }
    if (config.input_hours > config.train_days * kHoursPerDay) {
        throw Error(Errc::InvalidArgument, "input_hours exceeds the training window");
    }
    if (config.n_quantiles < 2) {
        throw Error(Errc::InvalidArgument, "n_quantiles must be at least 2");
    }
    if (!(config.significance > 0.0 && config.significance < 1.0)) {
        throw Error(Errc::InvalidArgument, "significance must lie in (0, 1)");
    }
    if (!(config.timeout_s > 0.0) || !(config.startup_timeout_s > 0.0)) {
        throw Error(Errc::InvalidArgument, "timeouts must be positive");
    }
    if (config.out_dir.empty()) {
        throw Error(Errc::InvalidArgument, "out_dir is required");
    }
}

std::string to_ini(const RunConfig& config, const std::vector<std::string>& comments) {
    std::ostringstream s;
    for (const auto& c : comments) {
        s << "# " << c << '\n';
    }
    auto list = [](const std::vector<std::string>& items) {
        std::string out = "[";
        for (std::size_t i = 0; i < items.size(); ++i) {
            out += (i ? ", " : "") + quoted(items[i]);
        }
        return out + "]";
    };
    s << "[run]\n";
    s << "zones=" << list(config.zones) << '\n';
    s << "models=" << list(config.models) << '\n';
    s << "test_start=" << config.test_start << '\n';
    s << "test_end=" << config.test_end << '\n';
    s << "train_days=" << config.train_days << '\n';
    s << "input_hours=" << config.input_hours << '\n';
    s << "data_dir=" << quoted(config.data_dir) << '\n';
    s << "out_dir=" << quoted(config.out_dir) << '\n';
    s << "seed=" << config.seed << '\n';
    s << "transform_targets=" << (config.transform_targets ? "true" : "false") << '\n';
    s << "n_quantiles=" << config.n_quantiles << '\n';
    s << "significance=" << report::format_number(config.significance) << '\n';
    s << "timeout_s=" << report::format_number(config.timeout_s) << '\n';
    s << "startup_timeout_s=" << report::format_number(config.startup_timeout_s) << '\n';
    return s.str();
}

fs::path zone_file(const RunConfig& config, const std::string& zone) {
    return fs::path(config.data_dir) / (zone + ".csv");
}

std::vector<std::unique_ptr<eval::Forecaster>> make_forecasters(const RunConfig& config) {
    eval::NativeOptions native;
    native.ml.transform_targets = config.transform_targets;
    native.ml.n_quantiles = config.n_quantiles;
    native.ml.input_days = config.input_hours / kHoursPerDay;
    external::AdapterOptions adapter;
    adapter.timeout = to_ms(config.timeout_s);
    adapter.startup_timeout = to_ms(config.startup_timeout_s);
    adapter.input_size = config.input_hours;

    std::vector<std::unique_ptr<eval::Forecaster>> out;
    for (const auto& m : config.models) {
        auto spec = parse_model_spec(m);
        if (spec.external()) {
            out.push_back(std::make_unique<external::ExternalForecaster>(spec.name, spec.command, adapter));
        } else {
            out.push_back(eval::make_native_forecaster(spec.name, native));
        }
    }
    return out;
}

int execute_run(const RunConfig& config, std::ostream& log) {
    Date start;
    Date end;
    std::vector<data::HourlySeries> series;
    try {
        validate(config);
        start = parse_date(config.test_start);
        end = parse_date(config.test_end);
        const Date first_train = add_days(start, -static_cast<long>(config.train_days));
        for (const auto& zone : config.zones) {
            const auto path = zone_file(config, zone);
            try {
                series.push_back(data::read_canonical(path, zone));
            } catch (const Error& e) {
                throw Error(e.code(), "zone " + zone + ": " + path.string() + ": " + e.what());
            }
            const auto& s = series.back();
            if (!s.covers(first_train) || !s.covers(end)) {
                throw Error(Errc::OutOfRange, "zone " + zone + ": data " + format_date(s.start_day()) + ".." +
                                                  format_date(s.end_day()) + " does not cover " +
                                                  format_date(first_train) + ".." + format_date(end));
            }
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    eval::BacktestOptions options;
    options.test_start = start;
    options.test_end = end;
    options.train_days = config.train_days;
    options.input_hours = config.input_hours;
    options.jobs = config.jobs;

    std::vector<eval::ForecastRecord> records;
    std::vector<eval::ForecastFailure> failures;
    std::size_t test_days = 0;
    for (const auto& s : series) {
        auto models = make_forecasters(config);
        std::vector<eval::Forecaster*> handles;
        for (auto& m : models) {
            handles.push_back(m.get());
        }
        auto result = eval::rolling_backtest(s, handles, options);
        test_days = result.test_days;
        log << "zone " << s.zone() << ": " << result.records.size() << " forecasts, " << result.failures.size()
            << " failures\n";
        for (auto& r : result.records) {
            records.push_back(std::move(r));
        }
        for (auto& f : result.failures) {
            log << "failure: zone " << f.zone << ", model " << f.model << ", day " << format_date(f.target_date)
                << ": " << f.message << '\n';
            failures.push_back(std::move(f));
        }
    }

    // Models with any failed day leave the DM comparison of that zone.
    std::set<std::pair<std::string, std::string>> failed;
    for (const auto& f : failures) {
        failed.insert({f.model, f.zone});
    }
    const fs::path out_dir = config.out_dir;
    try {
        fs::create_directories(out_dir);
        report::write_records_csv(records, out_dir / "records.csv");
        report::write_metrics_csv(eval::metric_table(records, test_days), out_dir / "metrics.csv");
        std::vector<eval::ForecastRecord> dm_records;
        for (const auto& r : records) {
            if (!failed.contains({r.model, r.zone})) {
                dm_records.push_back(r);
            }
        }
        for (const auto& zone : config.zones) {
            auto matrix = eval::dm_matrix(report::complete_loss_series(dm_records, zone));
            matrix.zone = zone;
            report::write_dm_csv(matrix, out_dir / ("dm_" + zone + ".csv"));
            report::write_dm_svg(matrix, out_dir / ("dm_" + zone + ".svg"), config.significance);
        }
        {
            std::ofstream f(out_dir / "failures.csv", std::ios::binary | std::ios::trunc);
            f << "model,zone,date,message\n";
            for (const auto& x : failures) {
                std::string msg = x.message;
                std::replace(msg.begin(), msg.end(), ',', ';');
                std::replace(msg.begin(), msg.end(), '\n', ' ');
                f << x.model << ',' << x.zone << ',' << format_date(x.target_date) << ',' << msg << '\n';
            }
        }
        std::ofstream meta(out_dir / "run_meta.ini", std::ios::binary | std::ios::trunc);
        meta << to_ini(config, metadata_comments());
        if (!meta) {
            throw Error(Errc::Io, "cannot write run_meta.ini");
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return failures.empty() ? kExitOk : kExitPartial;
}

} // namespace epf::run
