// Acceptance runner: one PASS/FAIL/SKIP line per criterion.
//   epfbench_acceptance              synthetic and oracle criteria
//   epfbench_acceptance --real-data  published-table criteria on
//                                    $EPFBENCH_DATA_DIR/{DE_LU,AT}.csv
// Exit 0 when nothing failed, 1 on any failure, 77 when --real-data finds no data.
#include "epfbench/backtest.hpp"
#include "epfbench/elastic_net.hpp"
#include "epfbench/external.hpp"
#include "epfbench/forecaster.hpp"
#include "epfbench/metrics.hpp"
#include "epfbench/stats.hpp"
#include "epfbench/stl.hpp"
#include "epfbench/svr.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

using namespace epf;
using namespace epf::eval;

namespace {

constexpr double kTwoPi = 6.283185307179586;

int failures = 0;

struct Verdict {
    bool pass = true;
    std::string detail;
};

void report(const std::string& name, const Verdict& v, double seconds) {
    if (!v.pass) {
        ++failures;
    }
    std::printf("%s  %-44s %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), seconds);
    std::fflush(stdout);
}

void criterion(const std::string& name, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("threw: ") + e.what()};
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    report(name, v, dt.count());
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = n(rng);
        }
    }
    return m;
}

LossSeries loss_series(const std::string& model, std::vector<double> values) {
    LossSeries s{model, "DE_LU", {}, std::move(values)};
    for (std::size_t i = 0; i < s.losses.size(); ++i) {
        s.dates.push_back(add_days(parse_date("2024-01-01"), static_cast<long>(i)));
    }
    return s;
}

data::HourlySeries synthetic_prices(const std::string& zone, const std::string& start, std::size_t days,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 8.0);
    std::vector<double> v(days * 24);
    double level = 80.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (t % 24 == 0) {
            level += 0.2 * n(rng);
        }
        const double hour = static_cast<double>(t % 24);
        const double weekday = static_cast<double>((t / 24) % 7);
        v[t] = level + 30.0 * std::sin(kTwoPi * hour / 24.0) - (weekday >= 5 ? 15.0 : 0.0) + n(rng);
    }
    return {zone, parse_date(start), v};
}

// ---- synthetic and oracle criteria ----------------------------------------

Verdict dm_size() {
    std::mt19937_64 rng(20240101);
    std::normal_distribution<double> n(0.0, 1.0);
    constexpr int trials = 5000;
    int rejected = 0;
    const auto zeros = loss_series("Y", std::vector<double>(366, 0.0));
    for (int t = 0; t < trials; ++t) {
        std::vector<double> d(366);
        for (auto& x : d) {
            x = n(rng);
        }
        if (dm_test(loss_series("X", d), zeros).p_value < 0.1) {
            ++rejected;
        }
    }
    const double rate = static_cast<double>(rejected) / trials;
    return {rate >= 0.08 && rate <= 0.12, fmt("rejection rate %.4f, required [0.08, 0.12]", rate)};
}

Verdict metric_oracles() {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> price(70.0, 60.0);
    std::uniform_int_distribution<int> count(1, 30);
    double worst = 0.0;
    for (int set = 0; set < 1000; ++set) {
        std::vector<ForecastRecord> recs(static_cast<std::size_t>(count(rng)));
        std::vector<double> ys;
        std::vector<double> fs;
        for (auto& r : recs) {
            for (int h = 0; h < 24; ++h) {
                r.actuals[h] = price(rng);
                r.predictions[h] = price(rng);
                ys.push_back(r.actuals[h]);
                fs.push_back(r.predictions[h]);
            }
        }
        const auto ref = oracle::brute_metrics(ys, fs);
        worst = std::max({worst, std::abs(compute_mae(recs) - ref.mae) / ref.mae,
                          std::abs(compute_rmse(recs) - ref.rmse) / ref.rmse,
                          std::abs(compute_smape(recs) - ref.smape) / ref.smape});
    }
    return {worst <= 1e-12, fmt("max relative deviation %.2e over 1000 sets, required 1e-12", worst)};
}

Verdict elastic_net_oracle() {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> rows(3, 10);
    std::uniform_int_distribution<int> cols(1, 8);
    std::uniform_real_distribution<double> log_alpha(-3.0, 0.0);
    std::uniform_real_distribution<double> mix(0.05, 1.0);
    double worst = 0.0;
    for (int problem = 0; problem < 50; ++problem) {
        const Eigen::MatrixXd x = gaussian(rows(rng), cols(rng), rng);
        const Eigen::VectorXd y = gaussian(x.rows(), 1, rng).col(0) * 2.0;
        const double alpha = std::pow(10.0, log_alpha(rng));
        const double l1 = mix(rng);
        const auto sol = ml::solve_elastic_net(x, y, alpha, l1);
        const double ours = ml::elastic_net_objective(x, y, sol.weights, sol.intercept, alpha, l1);
        const double ref = oracle::projected_gradient_elastic_net(x, y, alpha, l1);
        worst = std::max(worst, (ours - ref) / std::abs(ref));
    }

    double ls_worst = 0.0;
    for (int problem = 0; problem < 50; ++problem) {
        const Eigen::Index p = cols(rng);
        const Eigen::MatrixXd x = gaussian(std::min<Eigen::Index>(10, p + 2 + problem % 3), p, rng);
        const Eigen::VectorXd y = gaussian(x.rows(), 1, rng).col(0);
        const auto sol = ml::solve_elastic_net(x, y, 0.0, 0.5);
        const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
        const Eigen::VectorXd yc = y.array() - y.mean();
        const Eigen::VectorXd w = xc.colPivHouseholderQr().solve(yc);
        ls_worst = std::max(ls_worst, (sol.weights - w).cwiseAbs().maxCoeff() / std::max(1.0, w.cwiseAbs().maxCoeff()));
    }
    return {worst <= 1e-5 && ls_worst <= 1e-6,
            fmt("objective excess %.2e (required 1e-5), alpha=0 weight error %.2e (required 1e-6)", worst, ls_worst)};
}

Verdict svr_oracle() {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> log_gamma(-1.0, 0.5);
    double worst = 0.0;
    for (int problem = 0; problem < 20; ++problem) {
        const Eigen::MatrixXd x = gaussian(3, 2, rng);
        const Eigen::MatrixXd k = ml::rbf_kernel(x, x, std::pow(10.0, log_gamma(rng)));
        const Eigen::Vector3d z(u(rng), u(rng), u(rng));
        const auto sol = ml::solve_svr_dual(k, z, 1.0, 0.1);
        const double ours = ml::svr_dual_objective(k, z, sol.coef, 0.1);
        const double ref = oracle::grid_svr_dual(k, z, 1.0, 0.1);
        worst = std::max(worst, std::abs(ours - ref));
    }
    return {worst <= 1e-4, fmt("max |objective - grid| %.2e over 20 problems, required 1e-4", worst)};
}

Verdict decomposition() {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> weeks(3, 12);
    std::normal_distribution<double> n(0.0, 10.0);
    double worst = 0.0;
    auto check = [&](const std::vector<double>& y, const classical::StlDecomposition& d) {
        for (std::size_t t = 0; t < y.size(); ++t) {
            double sum = d.trend[t] + d.remainder[t];
            for (const auto& s : d.seasonal) {
                sum += s[t];
            }
            worst = std::max(worst, std::abs(sum - y[t]) / std::max(1.0, std::abs(y[t])));
        }
    };
    for (int series = 0; series < 200; ++series) {
        std::vector<double> y(static_cast<std::size_t>(weeks(rng)) * 168 + static_cast<std::size_t>(series % 24));
        double level = 50.0;
        for (auto& v : y) {
            level += 0.1 * n(rng);
            v = level + n(rng);
        }
        classical::StlOptions o;
        o.robust_iters = static_cast<std::size_t>(series % 2);
        check(y, classical::stl_decompose(y, 24, o));
        check(y, classical::mstl_decompose(y, {24, 168}));
    }

    const std::size_t len = 24 * 7 * 12;
    std::vector<double> y(len);
    std::vector<double> daily(len);
    std::vector<double> weekly(len);
    for (std::size_t t = 0; t < len; ++t) {
        daily[t] = 10.0 * std::sin(kTwoPi * static_cast<double>(t) / 24.0);
        weekly[t] = 5.0 * std::sin(kTwoPi * static_cast<double>(t) / 168.0);
        y[t] = 50.0 + daily[t] + weekly[t];
    }
    const auto d = classical::mstl_decompose(y, {24, 168});
    const double c24 = oracle::pearson(d.seasonal_for(24), daily);
    const double c168 = oracle::pearson(d.seasonal_for(168), weekly);
    return {worst <= 1e-9 && c24 > 0.98 && c168 > 0.98,
            fmt("reconstruction %.2e over 200 series, separation corr %.4f / %.4f", worst, c24, c168)};
}

Verdict lookahead() {
    const auto series = synthetic_prices("DE_LU", "2023-09-01", 150, 19);
    const std::vector<std::string> targets{"2024-01-01", "2024-01-15", "2024-01-28"};
    NativeOptions options;
    std::size_t checked = 0;
    for (const auto& name : native_model_names()) {
        auto model = make_native_forecaster(name, options);
        // ElasticNet CV costs about 100 s per day, so it is checked on one day.
        const std::size_t n_days = name == "ElasticNet" ? 1 : targets.size();
        for (const auto& day : std::span(targets).first(n_days)) {
            const Date target = parse_date(day);
            std::vector<double> poisoned(series.values().begin(), series.values().end());
            std::mt19937_64 rng(23);
            std::uniform_real_distribution<double> junk(-1e4, 1e4);
            for (std::size_t i = series.hour_index(target); i < poisoned.size(); ++i) {
                poisoned[i] = junk(rng);
            }
            const data::HourlySeries bad(series.zone(), series.start_day(), poisoned);
            BacktestOptions b;
            b.test_start = target;
            b.test_end = target;
            const auto clean = rolling_backtest(series, {model.get()}, b);
            const auto dirty = rolling_backtest(bad, {model.get()}, b);
            if (clean.records.size() != 1 || dirty.records.size() != 1 ||
                clean.records[0].predictions != dirty.records[0].predictions) {
                return {false, name + " on " + day + " changed under poisoning"};
            }
            ++checked;
        }
    }
    return {true, std::to_string(checked) + " (model, day) forecasts bit-identical under poisoning"};
}

Verdict adapter() {
    const auto series = synthetic_prices("DE_LU", "2023-09-01", 140, 29);
    external::ExternalForecaster echo("Echo", {ECHO_CHILD});
    auto native = make_native_forecaster("SeasonalNaiveDay");
    BacktestOptions b;
    b.test_start = parse_date("2024-01-01");
    b.test_end = parse_date("2024-01-14");
    const auto r = rolling_backtest(series, {&echo, native.get()}, b);
    if (!r.failures.empty() || r.records.size() != 28) {
        return {false, "backtest incomplete"};
    }
    const std::vector<ForecastRecord> a(r.records.begin(), r.records.begin() + 14);
    const std::vector<ForecastRecord> n(r.records.begin() + 14, r.records.end());
    const bool same = compute_mae(a) == compute_mae(n) && compute_rmse(a) == compute_rmse(n) &&
                      compute_smape(a) == compute_smape(n);
    return {same, fmt("echo MAE %.6f vs native %.6f over 14 days", compute_mae(a), compute_mae(n))};
}

// ---- published-table criteria ---------------------------------------------

struct Published {
    const char* model;
    double mae;
    std::optional<double> rmse;
    std::optional<double> smape;
};

Verdict within(const std::vector<MetricRow>& rows, const std::vector<Published>& table, double tol) {
    Verdict v;
    std::ostringstream detail;
    for (const auto& p : table) {
        const auto it = std::find_if(rows.begin(), rows.end(), [&](const MetricRow& r) { return r.model == p.model; });
        if (it == rows.end()) {
            return {false, std::string("no metrics for ") + p.model};
        }
        auto one = [&](const char* label, double ours, std::optional<double> ref) {
            if (!ref) {
                return;
            }
            const double rel = (ours - *ref) / *ref;
            if (std::abs(rel) > tol) {
                v.pass = false;
            }
            char buf[128];
            std::snprintf(buf, sizeof buf, "%s %s %.2f (%+.2f%%) ", p.model, label, ours, 100.0 * rel);
            detail << buf;
        };
        one("MAE", it->mae, p.mae);
        one("RMSE", it->rmse, p.rmse);
        one("sMAPE", it->smape, p.smape);
    }
    v.detail = detail.str();
    return v;
}

std::vector<MetricRow> backtest_2024(const data::HourlySeries& series, const std::vector<std::string>& models) {
    std::vector<std::unique_ptr<Forecaster>> owned;
    std::vector<Forecaster*> handles;
    for (const auto& m : models) {
        owned.push_back(make_native_forecaster(m));
        handles.push_back(owned.back().get());
    }
    BacktestOptions b;
    b.test_start = parse_date("2024-01-01");
    b.test_end = parse_date("2024-12-31");
    const auto r = rolling_backtest(series, handles, b);
    if (!r.failures.empty()) {
        throw std::runtime_error(r.failures.front().model + " failed on " + format_date(r.failures.front().target_date) +
                                 ": " + r.failures.front().message);
    }
    return metric_table(r.records, r.test_days);
}

int real_data() {
    const char* env = std::getenv("EPFBENCH_DATA_DIR");
    const std::filesystem::path dir = env != nullptr ? env : "data";
    const auto de = dir / "DE_LU.csv";
    const auto at = dir / "AT.csv";
    if (!std::filesystem::exists(de) || !std::filesystem::exists(at)) {
        for (const char* name : {"DE baseline reproduction", "AT baseline reproduction", "DE MSTL ordering"}) {
            std::printf("SKIP  %-44s no canonical DE_LU.csv/AT.csv under %s\n", name, dir.string().c_str());
        }
        return 77;
    }
    const auto de_series = data::read_canonical(de, "DE_LU");
    const auto at_series = data::read_canonical(at, "AT");
    const std::vector<std::string> baselines{"Naive", "SeasonalNaiveDay", "SeasonalNaiveWeek"};

    criterion("DE baseline reproduction", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        auto v = within(backtest_2024(de_series, baselines),
                        {{"Naive", 29.16, 48.07, 23.81},
                         {"SeasonalNaiveDay", 27.82, 44.31, 26.32},
                         {"SeasonalNaiveWeek", 32.81, 55.25, 29.49}},
                        0.015);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        if (dt.count() >= 30.0) {
            v.pass = false;
            v.detail += "runtime over 30 s";
        }
        return v;
    });
    criterion("AT baseline reproduction", [&] {
        return within(backtest_2024(at_series, baselines),
                      {{"Naive", 26.35, {}, {}}, {"SeasonalNaiveDay", 22.92, {}, {}}, {"SeasonalNaiveWeek", 26.02, {}, {}}},
                      0.015);
    });
    criterion("DE MSTL ordering", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<std::string> models = baselines;
        models.push_back("MSTL");
        const auto rows = backtest_2024(de_series, models);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        const auto& mstl = rows.back();
        bool below = true;
        for (std::size_t i = 0; i < 3; ++i) {
            below = below && mstl.mae < rows[i].mae && mstl.rmse < rows[i].rmse && mstl.smape < rows[i].smape;
        }
        const double rel = (mstl.mae - 20.69) / 20.69;
        Verdict v{below && std::abs(rel) <= 0.15 && dt.count() < 900.0,
                  fmt("MSTL MAE %.2f (%+.1f%% vs 20.69), RMSE %.2f, ", mstl.mae, 100.0 * rel, mstl.rmse) +
                      fmt("sMAPE %.2f, below all baselines: ", mstl.smape) + (below ? "yes" : "no")};
        return v;
    });
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1 && std::string(argv[1]) == "--real-data") {
        return real_data();
    }
    criterion("DM size calibration", dm_size);
    criterion("metric oracles", metric_oracles);
    criterion("elastic-net oracle equivalence", elastic_net_oracle);
    criterion("SVR oracle equivalence", svr_oracle);
    criterion("decomposition suite", decomposition);
    criterion("look-ahead freedom", lookahead);
    criterion("adapter conformance", adapter);
    std::printf("SKIP  %-44s run with --real-data\n", "DE baseline reproduction");
    std::printf("SKIP  %-44s run with --real-data\n", "AT baseline reproduction");
    std::printf("SKIP  %-44s run with --real-data\n", "DE MSTL ordering");
    return failures == 0 ? 0 : 1;
}
