// epfbench: ingest raw exports, run the rolling benchmark, recompute DM tests
// and re-emit reports.
#include "epfbench/data.hpp"
#include "epfbench/error.hpp"
#include "epfbench/report.hpp"
#include "epfbench/run.hpp"
#include "epfbench/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace {

// A run config file is read at the top level, where CLI11 maps its [run]
// section onto the run subcommand; accept `run --config FILE` as well.
std::vector<std::string> hoist_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> hoisted;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            hoisted.push_back(args[i]);
            hoisted.push_back(args[++i]);
        } else if (args[i].rfind("--config=", 0) == 0) {
            hoisted.push_back(args[i]);
        } else {
            rest.push_back(args[i]);
        }
    }
    hoisted.insert(hoisted.end(), rest.begin(), rest.end());
    std::reverse(hoisted.begin(), hoisted.end());  // CLI11 consumes from the back
    return hoisted;
}

int do_ingest(const std::string& input, const std::string& zone, const std::string& output,
              const epf::data::CsvOptions& options) {
    const auto parsed = epf::data::parse_entsoe_csv(input, zone, options);
    const auto series = epf::data::normalize_dst(parsed.observations);
    epf::data::write_canonical(series, output);
    std::cerr << "ingest " << zone << ": " << parsed.observations.size() << " observations, " << parsed.dropped_empty
              << " empty rows dropped, " << series.days() << " days " << epf::format_date(series.start_day()) << ".."
              << epf::format_date(series.end_day()) << " -> " << output << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Day-ahead electricity price forecasting benchmark", "epfbench"};
    app.set_version_flag("--version", epf::kVersion);
    app.set_config("--config", "", "Run configuration file with a [run] section");
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Convert a raw price export to the canonical hourly file");
    std::string in_path;
    std::string in_zone;
    std::string out_path;
    std::string tz = "CET";
    std::string delimiter = ",";
    epf::data::CsvOptions csv;
    ingest->add_option("--input,-i", in_path, "Raw CSV export")->required()->check(CLI::ExistingFile);
    ingest->add_option("--zone,-z", in_zone, "Zone code, e.g. DE_LU")->required();
    ingest->add_option("--output,-o", out_path, "Canonical CSV to write")->required();
    ingest->add_option("--ts-col", csv.ts_col, "Timestamp column")->capture_default_str();
    ingest->add_option("--price-col", csv.price_col, "Price column")->capture_default_str();
    ingest->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
    ingest->add_option("--tz", tz, "Zone rule for naive timestamps (CET, EET, WET, UTC, +HH:MM)")
        ->capture_default_str();

    // run
    auto* run = app.add_subcommand("run", "Rolling daily backtest, metrics, DM matrices and reports");
    epf::run::RunConfig config;
    config.jobs = std::max(1u, std::thread::hardware_concurrency());
    config.data_dir = "data";
    run->add_option("--zones", config.zones, "Zone codes")->delimiter(',');
    run->add_option("--models", config.models, "Native model names or ext:NAME=COMMAND");
    run->add_option("--test-start,--test_start", config.test_start, "First target day")->capture_default_str();
    run->add_option("--test-end,--test_end", config.test_end, "Last target day")->capture_default_str();
    run->add_option("--train-days,--train_days", config.train_days, "Training window in days")
        ->capture_default_str();
    run->add_option("--input-hours,--input_hours", config.input_hours, "Context length in hours")
        ->capture_default_str();
    run->add_option("--data-dir,--data_dir", config.data_dir, "Directory of <zone>.csv canonical files")
        ->envname("EPFBENCH_DATA_DIR")
        ->capture_default_str();
    run->add_option("--out-dir,--out_dir", config.out_dir, "Output directory")->capture_default_str();
    run->add_option("--seed", config.seed, "Recorded seed (all models are deterministic)")->capture_default_str();
    run->add_option("--transform-targets,--transform_targets", config.transform_targets,
                    "Quantile-transform ML targets")
        ->capture_default_str();
    run->add_option("--n-quantiles,--n_quantiles", config.n_quantiles, "Quantile map resolution")
        ->capture_default_str();
    run->add_option("--significance", config.significance, "DM significance threshold")->capture_default_str();
    run->add_option("--timeout,--timeout_s", config.timeout_s, "External request timeout in seconds")
        ->capture_default_str();
    run->add_option("--startup-timeout,--startup_timeout_s", config.startup_timeout_s,
                    "External handshake timeout in seconds")
        ->capture_default_str();
    run->add_option("--jobs,-j", config.jobs, "Worker threads")->capture_default_str()->configurable(false);

    // dm and report
    auto* dm = app.add_subcommand("dm", "Recompute DM matrices from records.csv");
    auto* rep = app.add_subcommand("report", "Re-emit metrics.csv and DM files from records.csv");
    std::string records_path;
    std::string report_dir;
    double threshold = epf::eval::kSignificance;
    std::size_t expected_days = 0;
    for (auto* sub : {dm, rep}) {
        sub->add_option("--records", records_path, "records.csv of a run")->required()->check(CLI::ExistingFile);
        sub->add_option("--out-dir", report_dir, "Output directory")->required();
        sub->add_option("--significance", threshold, "DM significance threshold")->capture_default_str();
    }
    rep->add_option("--expected-days", expected_days, "Days per model for completeness (default: distinct dates)");

    const auto args = hoist_config(argc, argv);
    try {
        app.parse(std::vector<std::string>(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : epf::run::kExitConfig;
    }

    try {
        if (*ingest) {
            if (delimiter.size() != 1) {
                throw epf::Error(epf::Errc::InvalidArgument, "--delimiter must be one character");
            }
            csv.delimiter = delimiter.front();
            csv.zone_rule = epf::data::ZoneRule::parse(tz);
            return do_ingest(in_path, in_zone, out_path, csv);
        }
        if (*run) {
            return epf::run::execute_run(config, std::cerr);
        }
        const auto records = epf::report::read_records_csv(records_path);
        if (*dm) {
            epf::report::emit_dm_reports(records, report_dir, threshold);
        } else {
            epf::report::emit_reports(records, report_dir, threshold,
                                      expected_days > 0 ? std::optional<std::size_t>(expected_days) : std::nullopt);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
