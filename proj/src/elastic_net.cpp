#include "epfbench/elastic_net.hpp"

#include "epfbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epf::ml {

namespace {

struct Centered {
    Eigen::MatrixXd x;
    Eigen::RowVectorXd x_mean;
    Eigen::VectorXd col_sq;  // |x_j|^2 of centered columns
};

Centered center(const Eigen::MatrixXd& x) {
    Centered c;
    c.x_mean = x.colwise().mean();
    c.x = x.rowwise() - c.x_mean;
    c.col_sq = c.x.colwise().squaredNorm().transpose();
    return c;
}

double centered_objective(const Eigen::VectorXd& residual, const Eigen::VectorXd& w, double alpha, double l1_ratio) {
    const double n = static_cast<double>(residual.size());
    return residual.squaredNorm() / (2.0 * n) +
           alpha * (l1_ratio * w.lpNorm<1>() + 0.5 * (1.0 - l1_ratio) * w.squaredNorm());
}

double gap_of(const Eigen::MatrixXd& xc, const Eigen::VectorXd& yc, const Eigen::VectorXd& residual,
              const Eigen::VectorXd& w, double alpha, double l1_ratio) {
    const auto n = static_cast<double>(xc.rows());
    const double l1 = alpha * l1_ratio * n;
    const double l2 = alpha * (1.0 - l1_ratio) * n;
    const Eigen::VectorXd xta = xc.transpose() * residual - l2 * w;
    const double dual_norm = xta.size() > 0 ? xta.cwiseAbs().maxCoeff() : 0.0;
    const double r2 = residual.squaredNorm();
    double scale = 1.0;
    double gap = r2;
    if (dual_norm > l1) {
        scale = l1 / dual_norm;
        gap = 0.5 * (r2 + r2 * scale * scale);
    }
    return gap + l1 * w.lpNorm<1>() - scale * residual.dot(yc) + 0.5 * l2 * (1.0 + scale * scale) * w.squaredNorm();
}

// Coordinate descent on pre-centered data; `w` is updated in place.
ElasticNetSolution descend(const Centered& c, const Eigen::VectorXd& yc, double alpha, double l1_ratio,
                           const ElasticNetOptions& options, Eigen::VectorXd w) {
    const auto n = static_cast<double>(c.x.rows());
    const Eigen::Index p = c.x.cols();
    const double l1 = alpha * l1_ratio * n;
    const double l2 = alpha * (1.0 - l1_ratio) * n;

    Eigen::VectorXd residual = yc - c.x * w;
    ElasticNetSolution sol;
    std::vector<Eigen::Index> active;
    active.reserve(static_cast<std::size_t>(p));

    auto update = [&](Eigen::Index j) {
        const double denom = c.col_sq[j] + l2;
        const double old = w[j];
        if (denom <= 0.0) {
            if (old != 0.0) {
                residual += c.x.col(j) * old;
                w[j] = 0.0;
            }
            return std::abs(old);
        }
        const double rho = c.x.col(j).dot(residual) + c.col_sq[j] * old;
        const double fresh = soft_threshold(rho, l1) / denom;
        if (fresh != old) {
            residual -= c.x.col(j) * (fresh - old);
            w[j] = fresh;
        }
        return std::abs(fresh - old);
    };

    bool full_pass = true;
    while (sol.sweeps < options.max_sweeps) {
        ++sol.sweeps;
        double max_step = 0.0;
        if (full_pass) {
            active.clear();
            for (Eigen::Index j = 0; j < p; ++j) {
                max_step = std::max(max_step, update(j));
                if (w[j] != 0.0) {
                    active.push_back(j);
                }
            }
        } else {
            for (Eigen::Index j : active) {
                max_step = std::max(max_step, update(j));
            }
        }
        if (options.record_objective) {
            sol.objective_trace.push_back(centered_objective(residual, w, alpha, l1_ratio));
        }
        bool settled = max_step < options.tol;
        if (options.gap_tol) {
            const double w_max = p > 0 ? w.cwiseAbs().maxCoeff() : 0.0;
            settled = w_max == 0.0 || max_step <= *options.gap_tol * w_max;
        }
        if (settled) {
            if (full_pass) {
                if (!options.gap_tol ||
                    gap_of(c.x, yc, residual, w, alpha, l1_ratio) <= *options.gap_tol * yc.squaredNorm()) {
                    sol.converged = true;
                    break;
                }
            }
            full_pass = true;  // active set settled; confirm over all features
        } else if (full_pass) {
            full_pass = active.size() == static_cast<std::size_t>(p);
        }
    }
    sol.weights = std::move(w);
    return sol;
}

} // namespace

double soft_threshold(double z, double gamma) noexcept {
    if (z > gamma) {
        return z - gamma;
    }
    if (z < -gamma) {
        return z + gamma;
    }
    return 0.0;
}

double elastic_net_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                             double intercept, double alpha, double l1_ratio) {
    const Eigen::VectorXd r = y - x * w - Eigen::VectorXd::Constant(y.size(), intercept);
    return centered_objective(r, w, alpha, l1_ratio);
}

double elastic_net_gap(const Eigen::MatrixXd& xc, const Eigen::VectorXd& yc, const Eigen::VectorXd& w, double alpha,
                       double l1_ratio) {
    return gap_of(xc, yc, yc - xc * w, w, alpha, l1_ratio);
}

ElasticNetSolution solve_elastic_net(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                                     double l1_ratio, const ElasticNetOptions& options,
                                     const Eigen::VectorXd* warm_start) {
    if (x.rows() == 0 || x.rows() != y.size()) {
        throw Error(Errc::InvalidArgument, "elastic net needs a non-empty design with matching targets");
    }
    if (!(alpha >= 0.0) || !(l1_ratio >= 0.0 && l1_ratio <= 1.0)) {
        throw Error(Errc::InvalidArgument, "alpha must be >= 0 and l1_ratio in [0, 1]");
    }
    const Centered c = center(x);
    const double y_mean = y.mean();
    const Eigen::VectorXd yc = y.array() - y_mean;
    if (alpha == 0.0) {
        // Plain least squares. Coordinate descent crawls on ill-conditioned
        // designs here, so solve directly (minimum norm when rank deficient).
        ElasticNetSolution sol;
        sol.weights = c.x.completeOrthogonalDecomposition().solve(yc);
        sol.converged = true;
        if (options.record_objective) {
            sol.objective_trace.push_back(centered_objective(yc - c.x * sol.weights, sol.weights, 0.0, l1_ratio));
        }
        sol.intercept = y_mean - c.x_mean.dot(sol.weights);
        return sol;
    }
    Eigen::VectorXd w = warm_start != nullptr ? *warm_start : Eigen::VectorXd::Zero(x.cols());
    auto sol = descend(c, yc, alpha, l1_ratio, options, std::move(w));
    sol.intercept = y_mean - c.x_mean.dot(sol.weights);
    return sol;
}

Eigen::VectorXd ElasticNetModel::predict(std::span<const double> input) const {
    if (static_cast<Eigen::Index>(input.size()) != weights.rows()) {
        throw Error(Errc::LengthMismatch, "input has " + std::to_string(input.size()) + " values, model expects " +
                                              std::to_string(weights.rows()));
    }
    const Eigen::Map<const Eigen::VectorXd> v(input.data(), static_cast<Eigen::Index>(input.size()));
    return weights.transpose() * v + intercepts;
}

ElasticNetModel elasticnet_fit(const WindowDataset& data, double alpha, double l1_ratio,
                               const ElasticNetOptions& options) {
    if (data.samples() == 0) {
        throw Error(Errc::EmptyInput, "no samples");
    }
    ElasticNetModel model;
    model.alpha = alpha;
    model.l1_ratio = l1_ratio;
    model.weights.resize(data.features(), data.targets.cols());
    model.intercepts.resize(data.targets.cols());
    for (Eigen::Index h = 0; h < data.targets.cols(); ++h) {
        const Eigen::VectorXd y = data.targets.col(h);
        auto sol = solve_elastic_net(data.inputs, y, alpha, l1_ratio, options);
        if (!sol.converged) {
            throw Error(Errc::DidNotConverge, "hour " + std::to_string(h) + ": no convergence after " +
                                                  std::to_string(sol.sweeps) + " sweeps");
        }
        model.weights.col(h) = sol.weights;
        model.intercepts[h] = sol.intercept;
    }
    return model;
}

double alpha_max(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets, double l1_ratio) {
    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd yc = targets.rowwise() - targets.colwise().mean();
    const double n = static_cast<double>(x.rows());
    const double ratio = std::max(l1_ratio, 1e-3);
    return (xc.transpose() * yc).cwiseAbs().maxCoeff() / (n * ratio);
}

std::vector<double> alpha_path(double alpha_max_value, std::size_t count, double decades) {
    std::vector<double> out(count);
    const double top = std::max(alpha_max_value, std::numeric_limits<double>::min());
    for (std::size_t i = 0; i < count; ++i) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        out[i] = top * std::pow(10.0, -decades * frac);
    }
    return out;
}

std::vector<CvFold> sequential_folds(Eigen::Index samples, std::size_t validation_days) {
    const auto folds = static_cast<Eigen::Index>(validation_days);
    std::vector<CvFold> out;
    for (Eigen::Index f = 0; f < folds; ++f) {
        const Eigen::Index train = samples - folds + f;
        out.push_back({train, train});
    }
    return out;
}

ElasticNetCvReport elasticnet_cv_select(const WindowDataset& data, const ElasticNetCvOptions& options) {
    const Eigen::Index n = data.samples();
    const auto folds = static_cast<Eigen::Index>(options.validation_days);
    if (n < 2 * folds) {
        throw Error(Errc::TooFewSamples, "cross-validation needs at least " + std::to_string(2 * folds) +
                                             " samples, got " + std::to_string(n));
    }
    const Eigen::Index hours = data.targets.cols();

    // Training statistics for each fold are shared across the whole grid.
    const auto fold_plan = sequential_folds(n, options.validation_days);
    std::vector<Centered> fold_x;
    std::vector<Eigen::MatrixXd> fold_yc;
    std::vector<Eigen::RowVectorXd> fold_ymean;
    for (const auto& fold : fold_plan) {
        const Eigen::Index train = fold.train;
        fold_x.push_back(center(data.inputs.topRows(train)));
        const Eigen::MatrixXd yt = data.targets.topRows(train);
        fold_ymean.push_back(yt.colwise().mean());
        fold_yc.push_back(yt.rowwise() - fold_ymean.back());
    }

    struct Best {
        double mse = std::numeric_limits<double>::infinity();
        double alpha = 0.0;
        double l1_ratio = 1.0;
        double null_mse = 0.0;
        std::vector<double> alphas;
    } best;

    for (double l1_ratio : options.l1_ratios) {
        const auto alphas = alpha_path(alpha_max(data.inputs, data.targets, l1_ratio), options.n_alphas, options.decades);
        std::vector<double> mse(alphas.size(), 0.0);
        for (Eigen::Index f = 0; f < folds; ++f) {
            const Eigen::Index val = fold_plan[static_cast<std::size_t>(f)].validate;
            const Eigen::RowVectorXd xv = data.inputs.row(val);
            for (Eigen::Index h = 0; h < hours; ++h) {
                const Eigen::VectorXd yc = fold_yc[static_cast<std::size_t>(f)].col(h);
                const double y_mean = fold_ymean[static_cast<std::size_t>(f)][h];
                Eigen::VectorXd w = Eigen::VectorXd::Zero(data.features());
                for (std::size_t a = 0; a < alphas.size(); ++a) {
                    auto sol = descend(fold_x[static_cast<std::size_t>(f)], yc, alphas[a], l1_ratio, options.path_solver,
                                       std::move(w));
                    w = std::move(sol.weights);
                    const double intercept = y_mean - fold_x[static_cast<std::size_t>(f)].x_mean.dot(w);
                    const double err = data.targets(val, h) - (xv.dot(w) + intercept);
                    mse[a] += err * err;
                }
            }
        }
        const double denom = static_cast<double>(folds * hours);
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            const double m = mse[a] / denom;
            if (m < best.mse) {
                best.mse = m;
                best.alpha = alphas[a];
                best.l1_ratio = l1_ratio;
                best.null_mse = mse.front() / denom;
                best.alphas = alphas;
            }
        }
    }

    ElasticNetCvReport report;
    ElasticNetOptions refit = options.solver;
    report.model.alpha = best.alpha;
    report.model.l1_ratio = best.l1_ratio;
    report.model.weights.resize(data.features(), hours);
    report.model.intercepts.resize(hours);
    for (Eigen::Index h = 0; h < hours; ++h) {
        const Eigen::VectorXd y = data.targets.col(h);
        auto sol = solve_elastic_net(data.inputs, y, best.alpha, best.l1_ratio, refit);
        report.model.weights.col(h) = sol.weights;
        report.model.intercepts[h] = sol.intercept;
    }
    report.best_mse = best.mse;
    report.null_mse = best.null_mse;
    report.alphas = std::move(best.alphas);
    return report;
}

} // namespace epf::ml
