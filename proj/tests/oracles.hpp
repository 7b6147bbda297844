#pragma once

// Slow, independent reference computations for the numerical kernels.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const auto n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

/// Error metrics over flattened (actual, predicted) pairs, long double sums.
struct PairMetrics {
    double mae;
    double rmse;
    double smape;
};

inline PairMetrics brute_metrics(const std::vector<double>& y, const std::vector<double>& f) {
    long double abs_sum = 0.0L;
    long double sq_sum = 0.0L;
    long double pct_sum = 0.0L;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const long double e = static_cast<long double>(y[i]) - static_cast<long double>(f[i]);
        abs_sum += std::fabs(e);
        sq_sum += e * e;
        const long double d = std::fabs(static_cast<long double>(y[i])) + std::fabs(static_cast<long double>(f[i]));
        if (d != 0.0L) {
            pct_sum += std::fabs(e) / d;
        }
    }
    const auto n = static_cast<long double>(y.size());
    return {static_cast<double>(abs_sum / n), static_cast<double>(std::sqrt(sq_sum / n)),
            static_cast<double>(100.0L * pct_sum / n)};
}

/// Elastic net by accelerated projected gradient on w = u - v, u, v >= 0,
/// with the intercept profiled out by centering.
inline double elastic_net_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                    double b, double alpha, double l1) {
    const double n = static_cast<double>(x.rows());
    const Eigen::VectorXd r = y - x * w - Eigen::VectorXd::Constant(y.size(), b);
    return r.squaredNorm() / (2.0 * n) + alpha * (l1 * w.lpNorm<1>() + 0.5 * (1.0 - l1) * w.squaredNorm());
}

inline double projected_gradient_elastic_net(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                                             double l1, int iterations = 200000) {
    const double n = static_cast<double>(x.rows());
    const Eigen::RowVectorXd xm = x.colwise().mean();
    const Eigen::MatrixXd xc = x.rowwise() - xm;
    const double ym = y.mean();
    const Eigen::VectorXd yc = y.array() - ym;
    const Eigen::Index p = x.cols();
    const Eigen::MatrixXd a = xc.transpose() * xc / n;
    const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().maxCoeff();
    const double lipschitz = 2.0 * (lmax + alpha * (1.0 - l1)) + 1e-12;
    const double step = 1.0 / lipschitz;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd u_prev = u;
    Eigen::VectorXd v_prev = v;
    double t = 1.0;
    for (int k = 0; k < iterations; ++k) {
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double mom = (t - 1.0) / t_next;
        const Eigen::VectorXd yu = u + mom * (u - u_prev);
        const Eigen::VectorXd yv = v + mom * (v - v_prev);
        const Eigen::VectorXd w = yu - yv;
        const Eigen::VectorXd g = -xc.transpose() * (yc - xc * w) / n + alpha * (1.0 - l1) * w;
        u_prev = u;
        v_prev = v;
        u = (yu - step * (g.array() + alpha * l1).matrix()).cwiseMax(0.0);
        v = (yv - step * (-g.array() + alpha * l1).matrix()).cwiseMax(0.0);
        t = t_next;
    }
    const Eigen::VectorXd w = u - v;
    return elastic_net_objective(x, y, w, ym - xm.dot(w), alpha, l1);
}

/// SVR dual objective 1/2 b'Kb + eps|b|_1 - z'b over |b_i| <= C, sum b = 0,
/// for three samples: grid over (b1, b2) with b3 = -b1 - b2, refined
/// around the incumbent.
inline double grid_svr_dual(const Eigen::Matrix3d& k, const Eigen::Vector3d& z, double c, double eps) {
    auto f = [&](double b1, double b2) {
        const Eigen::Vector3d b(b1, b2, -b1 - b2);
        if (std::abs(b[2]) > c) {
            return std::numeric_limits<double>::infinity();
        }
        return 0.5 * b.dot(k * b) + eps * b.lpNorm<1>() - z.dot(b);
    };
    double best = std::numeric_limits<double>::infinity();
    double c1 = 0.0;
    double c2 = 0.0;
    double lo1 = -c, hi1 = c, lo2 = -c, hi2 = c;
    constexpr int steps = 400;
    for (int round = 0; round < 12; ++round) {
        for (int i = 0; i <= steps; ++i) {
            const double b1 = lo1 + (hi1 - lo1) * i / steps;
            for (int j = 0; j <= steps; ++j) {
                const double b2 = lo2 + (hi2 - lo2) * j / steps;
                const double v = f(b1, b2);
                if (v < best) {
                    best = v;
                    c1 = b1;
                    c2 = b2;
                }
            }
        }
        const double h1 = 4.0 * (hi1 - lo1) / steps;
        const double h2 = 4.0 * (hi2 - lo2) / steps;
        lo1 = std::max(-c, c1 - h1);
        hi1 = std::min(c, c1 + h1);
        lo2 = std::max(-c, c2 - h2);
        hi2 = std::min(c, c2 + h2);
    }
    return best;
}

} // namespace oracle
