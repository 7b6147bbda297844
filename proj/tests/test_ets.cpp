#include "epfbench/error.hpp"
#include "epfbench/ets.hpp"
#include "epfbench/optimize.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace epf;
using namespace epf::classical;

TEST_CASE("nelder-mead minimizes the Rosenbrock function") {
    auto rosen = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const auto r = optimize::nelder_mead(rosen, {-1.2, 1.0});
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-4);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-4);
}

TEST_CASE("aicc formula") {
    CHECK(aicc(50.0, 100, 2) == Catch::Approx(100.0 * std::log(0.5) + 2.0 * 2.0 * 100.0 / 97.0));
}

TEST_CASE("ets: constant series forecasts the constant for every kind") {
    const std::vector<double> y(60, 12.5);
    for (auto kind : {EtsKind::Ses, EtsKind::Holt, EtsKind::DampedHolt}) {
        const auto m = ets_fit(y, kind);
        for (double v : m.forecast(24)) {
            CHECK(std::abs(v - 12.5) < 1e-6);
        }
    }
    for (double v : ets_select_fit(y).forecast(24)) {
        CHECK(std::abs(v - 12.5) < 1e-6);
    }
}

TEST_CASE("ets: a linear ramp selects a trend model that continues it") {
    std::vector<double> y(100);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = 2.0 * static_cast<double>(t);
    }
    const auto m = ets_select_fit(y);
    CHECK(m.kind != EtsKind::Ses);
    if (m.kind == EtsKind::DampedHolt) {
        CHECK(*m.phi > 0.98);
    }
    const auto f = m.forecast(24);
    for (std::size_t h = 0; h < 24; ++h) {
        const double expect = 2.0 * static_cast<double>(100 + h);
        CHECK(std::abs(f[h] - expect) <= 0.01 * expect);
    }
}

TEST_CASE("ets: parameters stay inside their intervals") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> y(200);
    double level = 10.0;
    for (auto& v : y) {
        level += 0.3 * n(rng);
        v = level + n(rng);
    }
    for (auto kind : {EtsKind::Ses, EtsKind::Holt, EtsKind::DampedHolt}) {
        const auto m = ets_fit(y, kind);
        CHECK(m.alpha > 0.0);
        CHECK(m.alpha < 1.0);
        if (m.beta) {
            CHECK(*m.beta > 0.0);
            CHECK(*m.beta < 1.0);
        }
        if (m.phi) {
            CHECK(*m.phi >= kPhiLower);
            CHECK(*m.phi <= kPhiUpper);
        }
        CHECK(std::isfinite(m.aicc));
    }
    CHECK(ets_fit(y, EtsKind::Ses).n_params() == 2);
    CHECK(ets_fit(y, EtsKind::Holt).n_params() == 4);
    CHECK(ets_fit(y, EtsKind::DampedHolt).n_params() == 5);
}

TEST_CASE("ets: white noise mostly selects SES") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n(0.0, 1.0);
    int ses = 0;
    constexpr int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<double> y(200);
        for (auto& v : y) {
            v = 5.0 + n(rng);
        }
        if (ets_select_fit(y).kind == EtsKind::Ses) {
            ++ses;
        }
    }
    CHECK(ses >= trials * 9 / 10);
}

TEST_CASE("ets: selection is deterministic and rejects short input") {
    std::vector<double> y{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7};
    const auto a = ets_select_fit(y);
    const auto b = ets_select_fit(y);
    CHECK(a.kind == b.kind);
    CHECK(a.forecast(5) == b.forecast(5));
    try {
        ets_select_fit(std::vector<double>(9, 1.0));
        FAIL("expected SeriesTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SeriesTooShort);
    }
}
