#include "epfbench/stl.hpp"

#include "epfbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epf::classical {

namespace {

// Local (degree 0 or 1) tricube-weighted fit at abscissa `xs` using the
// points nleft..nright (1-based, inclusive). Returns false when every weight
// vanishes. `y` and `rw` are 1-based views (index 0 unused).
bool loess_estimate(const double* y, std::size_t n, std::size_t len, int degree, double xs, double& ys,
                    std::size_t nleft, std::size_t nright, double* w, const double* rw) {
    const double range = static_cast<double>(n) - 1.0;
    double h = std::max(xs - static_cast<double>(nleft), static_cast<double>(nright) - xs);
    if (len > n) {
        h += static_cast<double>((len - n) / 2);
    }
    const double h9 = 0.999 * h;
    const double h1 = 0.001 * h;

    double a = 0.0;
    for (std::size_t j = nleft; j <= nright; ++j) {
        w[j] = 0.0;
        const double r = std::abs(static_cast<double>(j) - xs);
        if (r <= h9) {
            if (r <= h1) {
                w[j] = 1.0;
            } else {
                const double q = r / h;
                const double t = 1.0 - q * q * q;
                w[j] = t * t * t;
            }
            if (rw != nullptr) {
                w[j] *= rw[j];
            }
            a += w[j];
        }
    }
    if (a <= 0.0) {
        return false;
    }
    for (std::size_t j = nleft; j <= nright; ++j) {
        w[j] /= a;
    }
    if (h > 0.0 && degree > 0) {
        a = 0.0;
        for (std::size_t j = nleft; j <= nright; ++j) {
            a += w[j] * static_cast<double>(j);
        }
        double b = xs - a;
        double c = 0.0;
        for (std::size_t j = nleft; j <= nright; ++j) {
            const double d = static_cast<double>(j) - a;
            c += w[j] * d * d;
        }
        if (std::sqrt(c) > 0.001 * range) {
            b /= c;
            for (std::size_t j = nleft; j <= nright; ++j) {
                w[j] *= b * (static_cast<double>(j) - a) + 1.0;
            }
        }
    }
    ys = 0.0;
    for (std::size_t j = nleft; j <= nright; ++j) {
        ys += w[j] * y[j];
    }
    return true;
}

// Loess smooth evaluated at every point 1..n. Neighbourhoods at the edges are
// the `len` nearest points (truncated and asymmetric).
void loess_smooth(const double* y, std::size_t n, std::size_t len, int degree, const double* rw, double* ys,
                  double* work) {
    if (n < 2) {
        ys[1] = y[1];
        return;
    }
    if (len >= n) {
        for (std::size_t i = 1; i <= n; ++i) {
            if (!loess_estimate(y, n, len, degree, static_cast<double>(i), ys[i], 1, n, work, rw)) {
                ys[i] = y[i];
            }
        }
        return;
    }
    const std::size_t half = (len + 1) / 2;
    std::size_t nleft = 1;
    std::size_t nright = len;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i > half && nright != n) {
            ++nleft;
            ++nright;
        }
        if (!loess_estimate(y, n, len, degree, static_cast<double>(i), ys[i], nleft, nright, work, rw)) {
            ys[i] = y[i];
        }
    }
}

void moving_average(const std::vector<double>& x, std::size_t len, std::vector<double>& out) {
    const std::size_t m = x.size() - len + 1;
    out.assign(m, 0.0);
    double v = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        v += x[i];
    }
    const double inv = 1.0 / static_cast<double>(len);
    out[0] = v * inv;
    for (std::size_t j = 1; j < m; ++j) {
        v += x[j + len - 1] - x[j - 1];
        out[j] = v * inv;
    }
}

std::size_t next_odd(double x) {
    auto v = static_cast<std::size_t>(std::ceil(x));
    if (v % 2 == 0) {
        ++v;
    }
    return v;
}

class StlRunner {
public:
    StlRunner(std::span<const double> y, std::size_t period, std::size_t ns, std::size_t nt, std::size_t nl)
        : n_(y.size()), np_(period), ns_(ns), nt_(nt), nl_(nl), y_(n_ + 1), rw_(n_ + 1, 1.0),
          season_(n_ + 1, 0.0), trend_(n_ + 1, 0.0), work1_(n_ + 2 * np_ + 1), work2_(n_ + 2 * np_ + 1),
          weights_(n_ + 2 * np_ + 1) {
        std::copy(y.begin(), y.end(), y_.begin() + 1);
    }

    void run(std::size_t inner, std::size_t outer) {
        bool use_rw = false;
        for (std::size_t k = 0;; ++k) {
            for (std::size_t j = 0; j < inner; ++j) {
                inner_pass(use_rw);
            }
            if (k >= outer) {
                break;
            }
            robustness_weights();
            use_rw = true;
        }
    }

    std::vector<double> trend() const { return {trend_.begin() + 1, trend_.end()}; }
    std::vector<double> season() const { return {season_.begin() + 1, season_.end()}; }

private:
    void inner_pass(bool use_rw) {
        for (std::size_t i = 1; i <= n_; ++i) {
            work1_[i] = y_[i] - trend_[i];
        }
        cycle_subseries(use_rw);  // fills cycle_ (length n + 2 np)
        // Low-pass: MA(np), MA(np), MA(3), loess(nl).
        moving_average(cycle_, np_, ma1_);
        moving_average(ma1_, np_, ma2_);
        moving_average(ma2_, 3, ma3_);
        lowpass_in_.assign(n_ + 1, 0.0);
        std::copy(ma3_.begin(), ma3_.end(), lowpass_in_.begin() + 1);
        lowpass_.assign(n_ + 1, 0.0);
        loess_smooth(lowpass_in_.data(), n_, nl_, 1, nullptr, lowpass_.data(), weights_.data());
        for (std::size_t i = 1; i <= n_; ++i) {
            season_[i] = cycle_[np_ + i - 1] - lowpass_[i];
        }
        for (std::size_t i = 1; i <= n_; ++i) {
            work1_[i] = y_[i] - season_[i];
        }
        loess_smooth(work1_.data(), n_, nt_, 1, use_rw ? rw_.data() : nullptr, trend_.data(), weights_.data());
    }

    // Smooths each cycle-subseries and extends it by one value at both ends.
    void cycle_subseries(bool use_rw) {
        cycle_.assign(n_ + 2 * np_, 0.0);
        // Longest subseries has ceil(n / np) points, plus one extension at each end.
        const std::size_t kmax = (n_ + np_ - 1) / np_;
        std::vector<double> sub(kmax + 1);
        std::vector<double> sub_rw(kmax + 1);
        std::vector<double> smooth(kmax + 3);
        for (std::size_t j = 1; j <= np_; ++j) {
            const std::size_t k = (n_ - j) / np_ + 1;
            for (std::size_t i = 1; i <= k; ++i) {
                sub[i] = work1_[(i - 1) * np_ + j];
                sub_rw[i] = rw_[(i - 1) * np_ + j];
            }
            const double* rw = use_rw ? sub_rw.data() : nullptr;
            loess_smooth(sub.data(), k, ns_, 1, rw, smooth.data() + 1, weights_.data() + 1);
            // smooth is shifted: smooth[1 + i] holds the estimate at position i.
            const std::size_t nright = std::min(ns_, k);
            double edge = 0.0;
            if (!loess_estimate(sub.data(), k, ns_, 1, 0.0, edge, 1, nright, weights_.data(), rw)) {
                edge = smooth[2];
            }
            smooth[1] = edge;
            const std::size_t nleft = k >= ns_ ? k - ns_ + 1 : 1;
            if (!loess_estimate(sub.data(), k, ns_, 1, static_cast<double>(k + 1), edge, nleft, k,
                                weights_.data(), rw)) {
                edge = smooth[k + 1];
            }
            smooth[k + 2] = edge;
            for (std::size_t m = 1; m <= k + 2; ++m) {
                cycle_[(m - 1) * np_ + j - 1] = smooth[m];
            }
        }
    }

    void robustness_weights() {
        std::vector<double> r(n_);
        for (std::size_t i = 1; i <= n_; ++i) {
            r[i - 1] = std::abs(y_[i] - trend_[i] - season_[i]);
        }
        std::vector<double> sorted = r;
        const std::size_t m0 = n_ / 2;         // 0-based n/2 + 1 - 1
        const std::size_t m1 = n_ - m0 - 1;    // 0-based n - (n/2 + 1) + 1 - 1
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m0), sorted.end());
        const double a = sorted[m0];
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m1), sorted.end());
        const double b = sorted[m1];
        const double cmad = 3.0 * (a + b);
        const double c9 = 0.999 * cmad;
        const double c1 = 0.001 * cmad;
        for (std::size_t i = 1; i <= n_; ++i) {
            const double ri = r[i - 1];
            if (ri <= c1) {
                rw_[i] = 1.0;
            } else if (ri <= c9) {
                const double u = ri / cmad;
                const double t = 1.0 - u * u;
                rw_[i] = t * t;
            } else {
                rw_[i] = 0.0;
            }
        }
    }

    std::size_t n_, np_, ns_, nt_, nl_;
    std::vector<double> y_, rw_, season_, trend_, work1_, work2_, weights_;
    std::vector<double> cycle_, ma1_, ma2_, ma3_, lowpass_in_, lowpass_;
};

void check_window(std::size_t w, const char* name) {
    if (w < 3 || w % 2 == 0) {
        throw Error(Errc::InvalidWindow, std::string(name) + " must be odd and >= 3, got " + std::to_string(w));
    }
}

} // namespace

const std::vector<double>& StlDecomposition::seasonal_for(std::size_t period) const {
    for (std::size_t i = 0; i < periods.size(); ++i) {
        if (periods[i] == period) {
            return seasonal[i];
        }
    }
    throw Error(Errc::InvalidArgument, "no seasonal component for period " + std::to_string(period));
}

std::size_t default_trend_window(std::size_t period, std::size_t seasonal_window) {
    const double p = static_cast<double>(period);
    return next_odd(1.5 * p / (1.0 - 1.5 / static_cast<double>(seasonal_window)));
}

StlDecomposition stl_decompose(std::span<const double> series, std::size_t period, const StlOptions& options) {
    if (period < 2) {
        throw Error(Errc::InvalidArgument, "STL period must be at least 2");
    }
    if (series.size() < 2 * period) {
        throw Error(Errc::SeriesTooShort, "STL needs at least two full periods (" + std::to_string(2 * period) +
                                              " values), got " + std::to_string(series.size()));
    }
    check_window(options.seasonal_window, "seasonal_window");
    const std::size_t nt =
        options.trend_window != 0 ? options.trend_window : default_trend_window(period, options.seasonal_window);
    const std::size_t nl = options.lowpass_window != 0 ? options.lowpass_window : next_odd(static_cast<double>(period));
    check_window(nt, "trend_window");
    check_window(nl, "lowpass_window");
    if (options.inner_iters == 0) {
        throw Error(Errc::InvalidArgument, "inner_iters must be positive");
    }

    StlRunner runner(series, period, options.seasonal_window, nt, nl);
    runner.run(options.inner_iters, options.robust_iters);

    StlDecomposition out;
    out.trend = runner.trend();
    out.seasonal.push_back(runner.season());
    out.periods.push_back(period);
    out.remainder.resize(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        out.remainder[i] = series[i] - out.trend[i] - out.seasonal[0][i];
    }
    return out;
}

StlDecomposition mstl_decompose(std::span<const double> series, const std::vector<std::size_t>& periods,
                                const MstlOptions& options) {
    if (periods.empty()) {
        throw Error(Errc::InvalidArgument, "MSTL needs at least one period");
    }
    for (std::size_t i = 1; i < periods.size(); ++i) {
        if (periods[i] <= periods[i - 1]) {
            throw Error(Errc::InvalidArgument, "MSTL periods must be strictly ascending");
        }
    }
    if (series.size() < 2 * periods.back()) {
        throw Error(Errc::SeriesTooShort, "MSTL needs at least " + std::to_string(2 * periods.back()) +
                                              " values, got " + std::to_string(series.size()));
    }
    if (options.sweeps == 0) {
        throw Error(Errc::InvalidArgument, "MSTL needs at least one sweep");
    }

    const std::size_t n = series.size();
    std::vector<double> deseason(series.begin(), series.end());
    std::vector<std::vector<double>> seasonals(periods.size(), std::vector<double>(n, 0.0));
    std::vector<double> trend(n, 0.0);
    for (std::size_t sweep = 0; sweep < options.sweeps; ++sweep) {
        for (std::size_t i = 0; i < periods.size(); ++i) {
            for (std::size_t t = 0; t < n; ++t) {
                deseason[t] += seasonals[i][t];
            }
            auto fit = stl_decompose(deseason, periods[i], options.stl);
            seasonals[i] = std::move(fit.seasonal[0]);
            trend = std::move(fit.trend);
            for (std::size_t t = 0; t < n; ++t) {
                deseason[t] -= seasonals[i][t];
            }
        }
    }

    StlDecomposition out;
    out.trend = std::move(trend);
    out.periods = periods;
    out.remainder.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        double r = series[t] - out.trend[t];
        for (const auto& s : seasonals) {
            r -= s[t];
        }
        out.remainder[t] = r;
    }
    out.seasonal = std::move(seasonals);
    return out;
}

} // namespace epf::classical
