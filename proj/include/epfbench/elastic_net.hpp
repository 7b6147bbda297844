#pragma once

#include "epfbench/windows.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace epf::ml {

struct ElasticNetOptions {
    double tol = 1e-6;               // max coordinate update at convergence
    std::size_t max_sweeps = 10000;
    bool record_objective = false;   // keep the objective after every sweep
    /// When set, converge instead once the largest update is below
    /// gap_tol * max|w| and the duality gap is below gap_tol * |y - mean(y)|^2.
    std::optional<double> gap_tol;
};

/// Single-output solution of
///   (1/2n) |y - Xw - b|^2 + alpha (l1_ratio |w|_1 + (1 - l1_ratio)/2 |w|^2).
struct ElasticNetSolution {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    std::size_t sweeps = 0;
    bool converged = false;
    std::vector<double> objective_trace;
};

double soft_threshold(double z, double gamma) noexcept;

double elastic_net_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                             double intercept, double alpha, double l1_ratio);

/// Cyclic coordinate descent on centered data. `warm_start` (optional) seeds
/// the weights. alpha = 0 is solved directly as least squares. Never throws
/// on non-convergence; check `converged`.
ElasticNetSolution solve_elastic_net(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                                     double l1_ratio, const ElasticNetOptions& options = {},
                                     const Eigen::VectorXd* warm_start = nullptr);

/// One independent model per target hour.
struct ElasticNetModel {
    Eigen::MatrixXd weights;      // features x hours
    Eigen::VectorXd intercepts;   // hours
    double alpha = 0.0;
    double l1_ratio = 1.0;

    Eigen::VectorXd predict(std::span<const double> input) const;
};

ElasticNetModel elasticnet_fit(const WindowDataset& data, double alpha, double l1_ratio,
                               const ElasticNetOptions& options = {});

struct ElasticNetCvOptions {
    std::vector<double> l1_ratios{0.1, 0.5, 0.7, 0.9, 0.95, 0.99, 1.0};
    std::size_t n_alphas = 100;
    double decades = 4.0;
    std::size_t validation_days = 7;
    ElasticNetOptions path_solver{.gap_tol = 1e-4};  // validation paths
    ElasticNetOptions solver{};                       // final refit
};

struct ElasticNetCvReport {
    ElasticNetModel model;
    double best_mse = 0.0;
    double null_mse = 0.0;  // at alpha_max for the chosen l1_ratio
    std::vector<double> alphas;  // path of the chosen l1_ratio
};

/// alpha_max = max over target columns of |Xc^T yc|_inf / (n l1_ratio).
double alpha_max(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets, double l1_ratio);

std::vector<double> alpha_path(double alpha_max, std::size_t count, double decades);

/// Sequential one-day folds over the last `validation_days` samples: fold f
/// trains on samples [0, train) and validates on sample `validate` = train.
struct CvFold {
    Eigen::Index train = 0;
    Eigen::Index validate = 0;
};

std::vector<CvFold> sequential_folds(Eigen::Index samples, std::size_t validation_days);

/// Duality gap of the unnormalized problem (n times the objective).
double elastic_net_gap(const Eigen::MatrixXd& xc, const Eigen::VectorXd& yc, const Eigen::VectorXd& w, double alpha,
                       double l1_ratio);

/// Grid search over l1_ratio x alpha path, validated on the last
/// `validation_days` samples as sequential one-day folds (each trained on all
/// earlier samples), then refit on everything.
ElasticNetCvReport elasticnet_cv_select(const WindowDataset& data, const ElasticNetCvOptions& options = {});

} // namespace epf::ml
