#include "epfbench/baselines.hpp"
#include "epfbench/error.hpp"

#include <catch_amalgamated.hpp>

#include <numeric>

using namespace epf;
using namespace epf::classical;

TEST_CASE("naive repeats the last value") {
    std::vector<double> ctx{1.0, 2.0, 42.0};
    for (double v : naive_forecast(ctx)) {
        CHECK(v == 42.0);
    }
    ctx.back() = -5.0;
    for (double v : naive_forecast(ctx)) {
        CHECK(v == -5.0);
    }
    try {
        naive_forecast(std::span<const double>{});
        FAIL("expected EmptyContext");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyContext);
    }
}

TEST_CASE("seasonal naive copies the lagged day") {
    std::vector<double> week(168);
    std::iota(week.begin(), week.end(), 1.0);
    const auto day = seasonal_naive_forecast(week, 24);
    const auto lag = seasonal_naive_forecast(week, 168);
    for (int h = 0; h < 24; ++h) {
        CHECK(day[h] == 145.0 + h);
        CHECK(lag[h] == 1.0 + h);
    }
    std::vector<double> short_ctx(100, 1.0);
    try {
        seasonal_naive_forecast(short_ctx, 168);
        FAIL("expected ContextTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ContextTooShort);
    }
}
