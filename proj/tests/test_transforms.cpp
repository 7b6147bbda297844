#include "epfbench/error.hpp"
#include "epfbench/stats.hpp"
#include "epfbench/transforms.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace epf;
using epf::transforms::QuantileMap;

TEST_CASE("normal_cdf against high-precision values") {
    CHECK(stats::normal_cdf(0.0) == 0.5);
    CHECK(std::abs(stats::normal_cdf(1.959964) - 0.9750000009035576) < 1e-12);
    CHECK(std::abs(stats::normal_cdf(-4.898979485566356) - 4.816785043215e-7) < 1e-18);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    for (int i = 0; i < 1000; ++i) {
        const double z = u(rng);
        CHECK(std::abs(stats::normal_cdf(z) + stats::normal_cdf(-z) - 1.0) < 2e-7);
    }
}

TEST_CASE("normal_quantile inverts normal_cdf") {
    CHECK(std::abs(stats::normal_quantile(1e-7) - (-5.199337582192816931587)) < 1e-12);
    CHECK(stats::normal_quantile(0.5) == 0.0);
    CHECK(std::isinf(stats::normal_quantile(0.0)));
    for (double p : {1e-12, 1e-5, 0.01, 0.3, 0.77, 0.999, 1.0 - 1e-9}) {
        CHECK(std::abs(stats::normal_cdf(stats::normal_quantile(p)) - p) <= 1e-14 * std::max(1.0, p / 1e-3));
    }
}

TEST_CASE("quantile map fit") {
    const std::vector<double> three{3.0, 1.0, 2.0};
    const auto m = QuantileMap::fit(three, 3);
    CHECK(m.reference() == std::vector<double>{1.0, 2.0, 3.0});
    CHECK_THROWS_AS(QuantileMap::fit(std::vector<double>{4.0, 4.0, 4.0}), Error);
    CHECK_THROWS_AS(QuantileMap::fit(std::vector<double>{4.0}), Error);

    std::vector<double> weeks(2016);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(80.0, 25.0);
    for (auto& x : weeks) {
        x = n(rng);
    }
    CHECK(QuantileMap::fit(weeks).n_quantiles() == 1000);
}

TEST_CASE("quantile map transform") {
    std::vector<double> train(501);
    std::mt19937_64 rng(2);
    std::lognormal_distribution<double> ln(3.0, 0.6);
    for (auto& x : train) {
        x = ln(rng);
    }
    const auto m = QuantileMap::fit(train);
    auto sorted = train;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[250];
    CHECK(std::abs(m.transform(median)) < 1e-9);
    CHECK(m.transform(sorted.front() - 10.0) == Catch::Approx(-5.199337582192817).epsilon(1e-12));
    // The upper clip level is the double nearest 1 - 1e-7, whose exact quantile is 5.19933758229066109...
    CHECK(m.transform(sorted.back() + 10.0) == Catch::Approx(5.199337582290661).epsilon(1e-12));

    std::uniform_real_distribution<double> u(sorted.front() - 5.0, sorted.back() + 5.0);
    std::vector<double> xs(2000);
    for (auto& x : xs) {
        x = u(rng);
    }
    std::sort(xs.begin(), xs.end());
    const auto zs = m.transform(xs);
    CHECK(std::is_sorted(zs.begin(), zs.end()));
}

TEST_CASE("quantile map inverse") {
    std::vector<double> train(3000);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(60.0, 40.0);
    for (auto& x : train) {
        x = n(rng);
    }
    train[17] = train[18];  // a tie
    const auto m = QuantileMap::fit(train);
    const double lo = *std::min_element(train.begin(), train.end());
    const double hi = *std::max_element(train.begin(), train.end());
    const double width = hi - lo;
    auto sorted = train;
    std::sort(sorted.begin(), sorted.end());
    // 1000 reference quantiles at levels j / 999 (linear interpolation between
    // order statistics); level 0.5 falls midway between j = 499 and j = 500.
    auto quantile = [&](double level) {
        const double pos = level * static_cast<double>(sorted.size() - 1);
        const auto lo_i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo_i);
        return sorted[lo_i] + frac * (sorted[lo_i + 1] - sorted[lo_i]);
    };
    const double median = 0.5 * (quantile(499.0 / 999.0) + quantile(500.0 / 999.0));
    CHECK(m.inverse(0.0) == Catch::Approx(median).margin(1e-9 * width));
    for (double x : train) {
        if (x > lo && x < hi) {
            CHECK(std::abs(m.inverse(m.transform(x)) - x) <= 1e-6 * width);
        }
    }
    CHECK(m.inverse(6.0) == hi);
    CHECK(m.inverse(-6.0) == lo);
}

TEST_CASE("quantile map shapes a uniform sample into a standard normal one") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> sample(10000);
    for (auto& x : sample) {
        x = u(rng);
    }
    const auto m = QuantileMap::fit(sample);
    const auto z = m.transform(sample);
    double mean = 0.0;
    for (double v : z) {
        mean += v;
    }
    mean /= static_cast<double>(z.size());
    double var = 0.0;
    for (double v : z) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(z.size() - 1);
    CHECK(std::abs(mean) <= 0.1);
    CHECK(var >= 0.8);
    CHECK(var <= 1.2);
}
