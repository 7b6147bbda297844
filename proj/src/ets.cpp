#include "epfbench/ets.hpp"

#include "epfbench/error.hpp"
#include "epfbench/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace epf::classical {

namespace {

constexpr std::array<double, 3> kGridFractions{0.1, 0.5, 0.9};
constexpr std::size_t kRefinedStarts = 3;

struct Bounds {
    double lo;
    double hi;
};

constexpr Bounds kUnit{0.0, 1.0};
constexpr Bounds kPhi{kPhiLower, kPhiUpper};

double squash(double u, Bounds b) {
    return b.lo + (b.hi - b.lo) / (1.0 + std::exp(-u));
}

double unsquash(double v, Bounds b) {
    const double f = (v - b.lo) / (b.hi - b.lo);
    return std::log(f / (1.0 - f));
}

std::size_t n_smoothing(EtsKind kind) {
    switch (kind) {
    case EtsKind::Ses: return 1;
    case EtsKind::Holt: return 2;
    case EtsKind::DampedHolt: return 3;
    }
    return 1;
}

std::size_t n_states(EtsKind kind) {
    return kind == EtsKind::Ses ? 1 : 2;
}

struct Params {
    double alpha = 0.5;
    double beta = 0.0;
    double phi = 1.0;
    double level0 = 0.0;
    double trend0 = 0.0;
};

struct Filtered {
    double sse = 0.0;
    double level = 0.0;
    double trend = 0.0;
};

Filtered run_filter(std::span<const double> x, EtsKind kind, const Params& p) {
    Filtered out{0.0, p.level0, kind == EtsKind::Ses ? 0.0 : p.trend0};
    const double phi = kind == EtsKind::DampedHolt ? p.phi : 1.0;
    for (double obs : x) {
        const double damped = phi * out.trend;
        const double fitted = out.level + damped;
        const double err = obs - fitted;
        out.sse += err * err;
        const double level = fitted + p.alpha * err;
        if (kind != EtsKind::Ses) {
            out.trend = p.beta * (level - out.level) + (1.0 - p.beta) * damped;
        }
        out.level = level;
    }
    if (!std::isfinite(out.sse)) {
        out.sse = std::numeric_limits<double>::infinity();
    }
    return out;
}

// Optimizer coordinates: logits of the smoothing weights, then the initial
// states as offsets from the heuristic start in units of `scale`.
class Problem {
public:
    Problem(std::span<const double> x, EtsKind kind) : x_(x), kind_(kind) {
        const double n = static_cast<double>(x.size());
        double ss = 0.0;
        for (double v : x) {
            ss += v * v;
        }
        scale_ = std::sqrt(ss / n);
        if (!(scale_ > 0.0)) {
            scale_ = 1.0;
        }
        const std::size_t m = std::min<std::size_t>(x.size() - 1, 10);
        trend_guess_ = kind == EtsKind::Ses ? 0.0 : (x[m] - x[0]) / static_cast<double>(m);
        level_guess_ = x[0] - trend_guess_;
    }

    std::size_t dim() const { return n_smoothing(kind_) + n_states(kind_); }

    Params decode(const std::vector<double>& theta) const {
        Params p;
        std::size_t i = 0;
        p.alpha = squash(theta[i++], kUnit);
        if (kind_ != EtsKind::Ses) {
            p.beta = squash(theta[i++], kUnit);
        }
        if (kind_ == EtsKind::DampedHolt) {
            p.phi = squash(theta[i++], kPhi);
        }
        p.level0 = level_guess_ + scale_ * theta[i++];
        if (kind_ != EtsKind::Ses) {
            p.trend0 = trend_guess_ + scale_ * theta[i++];
        }
        return p;
    }

    double sse(const std::vector<double>& theta) const { return run_filter(x_, kind_, decode(theta)).sse; }

    std::vector<std::vector<double>> grid_starts() const {
        std::vector<std::vector<double>> starts;
        const std::size_t k = n_smoothing(kind_);
        std::size_t total = 1;
        for (std::size_t i = 0; i < k; ++i) {
            total *= kGridFractions.size();
        }
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<double> theta(dim(), 0.0);
            std::size_t c = code;
            for (std::size_t i = 0; i < k; ++i) {
                const double f = kGridFractions[c % kGridFractions.size()];
                c /= kGridFractions.size();
                const Bounds b = i == 2 ? kPhi : kUnit;
                theta[i] = unsquash(b.lo + f * (b.hi - b.lo), b);
            }
            starts.push_back(std::move(theta));
        }
        return starts;
    }

    double mean_square() const { return scale_ * scale_; }

private:
    std::span<const double> x_;
    EtsKind kind_;
    double scale_ = 1.0;
    double level_guess_ = 0.0;
    double trend_guess_ = 0.0;
};

EtsModel fit_centered(std::span<const double> x, double center, EtsKind kind) {
    const Problem problem(x, kind);
    auto starts = problem.grid_starts();
    std::vector<double> start_sse(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        start_sse[i] = problem.sse(starts[i]);
    }
    std::vector<std::size_t> order(starts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return start_sse[a] < start_sse[b]; });

    optimize::NelderMeadOptions nm;
    nm.initial_step.assign(problem.dim(), 0.1);
    for (std::size_t i = 0; i < n_smoothing(kind); ++i) {
        nm.initial_step[i] = 0.5;
    }
    nm.f_tol = 1e-10;
    nm.f_abs_tol = 1e-20 * problem.mean_square() * static_cast<double>(x.size());
    nm.max_evaluations = 2000;

    const auto objective = [&problem](const std::vector<double>& theta) { return problem.sse(theta); };
    optimize::NelderMeadResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::min(kRefinedStarts, order.size()); ++r) {
        auto res = optimize::nelder_mead(objective, starts[order[r]], nm);
        if (res.value < best.value) {
            best = std::move(res);
        }
    }
    if (!std::isfinite(best.value)) {
        throw Error(Errc::OptimizationFailed, std::string(to_string(kind)) + ": every start diverged");
    }

    const Params p = problem.decode(best.x);
    const Filtered f = run_filter(x, kind, p);
    EtsModel model;
    model.kind = kind;
    model.alpha = p.alpha;
    if (kind != EtsKind::Ses) {
        model.beta = p.beta;
        model.trend_state = f.trend;
    }
    if (kind == EtsKind::DampedHolt) {
        model.phi = p.phi;
    }
    model.level = f.level + center;
    model.sse = f.sse;
    model.n_obs = x.size();
    // Floor the MSE relative to the data scale so exact fits stay comparable.
    const double n = static_cast<double>(x.size());
    const double floor = std::max(1e-300, 1e-20 * problem.mean_square()) * n;
    model.aicc = aicc(std::max(f.sse, floor), x.size(), model.n_params());
    return model;
}

} // namespace

std::string_view to_string(EtsKind kind) noexcept {
    switch (kind) {
    case EtsKind::Ses: return "SES";
    case EtsKind::Holt: return "Holt";
    case EtsKind::DampedHolt: return "DampedHolt";
    }
    return "?";
}

std::size_t EtsModel::n_params() const noexcept {
    return n_smoothing(kind) + n_states(kind);
}

std::vector<double> EtsModel::forecast(std::size_t horizon) const {
    std::vector<double> out(horizon);
    const double b = trend_state.value_or(0.0);
    const double damping = phi.value_or(1.0);
    double weight = 0.0;
    double power = 1.0;
    for (std::size_t h = 0; h < horizon; ++h) {
        power *= damping;
        weight += power;
        out[h] = level + weight * b;
    }
    return out;
}

double aicc(double sse, std::size_t n, std::size_t k) {
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    return nn * std::log(sse / nn) + 2.0 * kk * nn / (nn - kk - 1.0);
}

EtsModel ets_fit(std::span<const double> series, EtsKind kind) {
    if (series.size() < 10) {
        throw Error(Errc::SeriesTooShort, "ETS needs at least 10 observations");
    }
    const double center = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
    std::vector<double> x(series.size());
    std::transform(series.begin(), series.end(), x.begin(), [center](double v) { return v - center; });
    return fit_centered(x, center, kind);
}

EtsModel ets_select_fit(std::span<const double> series) {
    std::optional<EtsModel> best;
    for (EtsKind kind : {EtsKind::Ses, EtsKind::Holt, EtsKind::DampedHolt}) {
        try {
            EtsModel m = ets_fit(series, kind);
            if (!best || m.aicc < best->aicc - 1e-10 * std::abs(best->aicc)) {
                best = std::move(m);
            }
        } catch (const Error& e) {
            if (e.code() != Errc::OptimizationFailed) {
                throw;
            }
        }
    }
    if (!best) {
        throw Error(Errc::OptimizationFailed, "no ETS model could be fitted");
    }
    return *best;
}

} // namespace epf::classical
