#include "epfbench/data.hpp"
#include "epfbench/error.hpp"
#include "epfbench/report.hpp"
#include "epfbench/run.hpp"

#include "test_util.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

using namespace epf;
using namespace epf::eval;
using testutil::read_file;
using testutil::TempDir;
using testutil::write_file;

namespace {

ForecastRecord record(const std::string& model, const std::string& zone, const std::string& day, double pred,
                      double actual) {
    ForecastRecord r{model, zone, parse_date(day), {}, {}};
    r.predictions.fill(pred);
    r.actuals.fill(actual);
    return r;
}

std::size_t count_lines(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

void write_zone(const std::filesystem::path& dir, const std::string& zone, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 6.0);
    std::vector<double> v(100 * 24);
    for (std::size_t t = 0; t < v.size(); ++t) {
        v[t] = 70.0 + 25.0 * std::sin(2.0 * 3.141592653589793 * static_cast<double>(t % 24) / 24.0) + n(rng);
    }
    std::filesystem::create_directories(dir);
    data::write_canonical({zone, parse_date("2023-10-01"), v}, dir / (zone + ".csv"));
}

int cli(const std::string& args) {
    const std::string cmd = std::string("\"") + EPFBENCH_CLI + "\" " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("format_number round trips") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1e4, 1e4);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        CHECK(std::stod(report::format_number(x)) == x);
    }
    CHECK(report::format_number(0.1) == "0.1");
    CHECK(report::format_number(-3.0) == "-3");
}

TEST_CASE("records csv round trip and violations") {
    TempDir tmp("records");
    std::vector<ForecastRecord> recs{record("A", "DE_LU", "2024-01-01", 0.1, -3.25),
                                     record("B", "AT", "2024-02-29", 1e-9, 12345.678)};
    recs[0].predictions[5] = 1.0 / 3.0;
    report::write_records_csv(recs, tmp / "r.csv");
    const auto back = report::read_records_csv(tmp / "r.csv");
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back[i].model == recs[i].model);
        CHECK(back[i].zone == recs[i].zone);
        CHECK(back[i].target_date == recs[i].target_date);
        CHECK(back[i].predictions == recs[i].predictions);
        CHECK(back[i].actuals == recs[i].actuals);
    }
    const auto text = read_file(tmp / "r.csv");
    CHECK(text.rfind("model,zone,date,y_00,", 0) == 0);

    write_file(tmp / "bad.csv", text.substr(0, text.find('\n') + 1) + "A,DE_LU,2024-01-01,1,2\n");
    try {
        report::read_records_csv(tmp / "bad.csv");
        FAIL("expected FormatViolation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::FormatViolation);
        CHECK(e.line() == 2);
    }
}

TEST_CASE("metrics csv carries rank markers") {
    TempDir tmp("metrics");
    std::vector<ForecastRecord> recs{record("A", "DE_LU", "2024-01-01", 1, 2), record("B", "DE_LU", "2024-01-01", 1, 4),
                                     record("C", "DE_LU", "2024-01-01", 1, 7)};
    report::write_metrics_csv(metric_table(recs), tmp / "m.csv");
    const auto text = read_file(tmp / "m.csv");
    CHECK(count_lines(text) == 4);
    CHECK(count_of(text, ",*,*,*,") == 1);
    CHECK(count_of(text, ",+,+,+,") == 1);
    CHECK(count_of(text, ",~,~,~,") == 1);
}

TEST_CASE("dm heatmap colouring") {
    DmMatrix m;
    m.zone = "DE_LU";
    m.models = {"A", "B"};
    m.p = {{std::nullopt, 0.05}, {0.95, std::nullopt}};
    const auto svg = report::render_dm_svg(m);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(count_of(svg, "fill=\"#000000\" stroke") == 1);
    CHECK(svg.find(">A<") != std::string::npos);
    CHECK(svg.find(">B<") != std::string::npos);
    CHECK(svg.find("0.050") != std::string::npos);

    m.p = {{std::nullopt, 0.5}, {0.5, std::nullopt}};
    CHECK(count_of(report::render_dm_svg(m), "fill=\"#000000\" stroke") == 2);
}

TEST_CASE("dm csv layout") {
    TempDir tmp("dmcsv");
    DmMatrix m;
    m.zone = "AT";
    m.models = {"A", "B"};
    m.p = {{std::nullopt, 0.25}, {0.75, std::nullopt}};
    report::write_dm_csv(m, tmp / "dm.csv");
    CHECK(read_file(tmp / "dm.csv") == "model_x,A,B\nA,,0.25\nB,0.75,\n");
}

TEST_CASE("complete loss series drops partial models") {
    std::vector<ForecastRecord> recs;
    for (const char* day : {"2024-01-01", "2024-01-02", "2024-01-03"}) {
        recs.push_back(record("full", "DE_LU", day, 1, 2));
    }
    recs.push_back(record("part", "DE_LU", "2024-01-02", 1, 2));
    const auto s = report::complete_loss_series(recs, "DE_LU");
    REQUIRE(s.size() == 1);
    CHECK(s[0].model == "full");
    CHECK(report::zones_of(recs) == std::vector<std::string>{"DE_LU"});
}

TEST_CASE("run config validation") {
    run::RunConfig c;
    c.zones = {"DE_LU"};
    c.models = {"Naive"};
    c.data_dir = "/tmp";
    CHECK_NOTHROW(run::validate(c));
    auto bad = c;
    bad.train_days = 7;
    CHECK_THROWS_AS(run::validate(bad), Error);
    bad = c;
    bad.input_hours = 100;
    CHECK_THROWS_AS(run::validate(bad), Error);
    bad = c;
    bad.test_end = "2023-12-31";
    CHECK_THROWS_AS(run::validate(bad), Error);
    bad = c;
    bad.models = {"Naive", "Naive"};
    CHECK_THROWS_AS(run::validate(bad), Error);
    bad = c;
    bad.models = {"Prophet"};
    CHECK_THROWS_AS(run::validate(bad), Error);

    const auto spec = run::parse_model_spec("ext:Echo=/bin/child --mode fast");
    CHECK(spec.name == "Echo");
    CHECK(spec.command == std::vector<std::string>{"/bin/child", "--mode", "fast"});
    CHECK_FALSE(run::parse_model_spec("MSTL").external());
}

TEST_CASE("cli: desk run, replay and report") {
    TempDir tmp("cli");
    write_zone(tmp / "data", "DE_LU", 1);
    const auto out = tmp / "out";
    const std::string base = "run --zones DE_LU --models Naive SeasonalNaiveDay --test-start 2024-01-01 "
                             "--test-end 2024-01-07 --data-dir \"" +
                             (tmp / "data").string() + "\" --jobs 2";
    REQUIRE(cli(base + " --out-dir \"" + out.string() + "\"") == 0);
    CHECK(count_lines(read_file(out / "records.csv")) == 1 + 14);
    CHECK(count_lines(read_file(out / "metrics.csv")) == 1 + 2);
    const auto dm = read_file(out / "dm_DE_LU.csv");
    CHECK(count_lines(dm) == 3);
    CHECK(dm.find("Naive,,") != std::string::npos);
    CHECK(std::filesystem::exists(out / "dm_DE_LU.svg"));
    const auto meta = read_file(out / "run_meta.ini");
    CHECK(meta.find("[run]") != std::string::npos);

    const auto replay = tmp / "replay";
    REQUIRE(cli("run --config \"" + (out / "run_meta.ini").string() + "\" --out-dir \"" + replay.string() + "\"") ==
            0);
    for (const char* f : {"records.csv", "metrics.csv", "dm_DE_LU.csv", "dm_DE_LU.svg"}) {
        CHECK(read_file(out / f) == read_file(replay / f));
    }

    const auto again = tmp / "again";
    REQUIRE(cli("report --records \"" + (out / "records.csv").string() + "\" --out-dir \"" + again.string() +
                "\"") == 0);
    CHECK(read_file(out / "metrics.csv") == read_file(again / "metrics.csv"));
    CHECK(read_file(out / "dm_DE_LU.svg") == read_file(again / "dm_DE_LU.svg"));
    const auto dm_only = tmp / "dm_only";
    REQUIRE(cli("dm --records \"" + (out / "records.csv").string() + "\" --out-dir \"" + dm_only.string() + "\"") ==
            0);
    CHECK(read_file(out / "dm_DE_LU.csv") == read_file(dm_only / "dm_DE_LU.csv"));
}

TEST_CASE("cli: missing zone data is a configuration error") {
    TempDir tmp("cli_missing");
    write_zone(tmp / "data", "DE_LU", 2);
    const auto out = tmp / "out";
    CHECK(cli("run --zones DE_LU,AT --models Naive --test-start 2024-01-01 --test-end 2024-01-03 --data-dir \"" +
              (tmp / "data").string() + "\" --out-dir \"" + out.string() + "\"") == 1);
    CHECK_FALSE(std::filesystem::exists(out / "records.csv"));
    CHECK_FALSE(std::filesystem::exists(out / "dm_AT.csv"));
    CHECK(cli("run --zones DE_LU --models Nope --data-dir \"" + (tmp / "data").string() + "\"") == 1);
}

TEST_CASE("cli: crashing external model gives a partial run") {
    TempDir tmp("cli_crash");
    write_zone(tmp / "data", "DE_LU", 3);
    const auto out = tmp / "out";
    const int rc = cli("run --zones DE_LU --models Naive SeasonalNaiveWeek \"ext:Crashy=" + std::string(ECHO_CHILD) +
                       " crash\" --test-start 2024-01-01 --test-end 2024-01-05 --data-dir \"" +
                       (tmp / "data").string() + "\" --out-dir \"" + out.string() + "\"");
    CHECK(rc == 2);
    const auto metrics = read_file(out / "metrics.csv");
    CHECK(metrics.find("\nNaive,DE_LU,") != std::string::npos);
    CHECK(metrics.find("\nSeasonalNaiveWeek,DE_LU,") != std::string::npos);
    CHECK(metrics.find("\nCrashy,DE_LU,") != std::string::npos);
    CHECK(metrics.find(",0.4\n") != std::string::npos);
    const auto dm = read_file(out / "dm_DE_LU.csv");
    CHECK(dm.find("Crashy") == std::string::npos);
    CHECK(count_lines(read_file(out / "failures.csv")) == 1 + 3);
}
