#pragma once

#include "epfbench/windows.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace epf::ml {

struct SvrOptions {
    double tol = 1e-3;                 // max KKT violation at termination
    std::size_t max_iter_factor = 100; // iteration cap = factor * samples^2
    bool verify_each_update = false;   // re-check box and equality after every step
};

/// Single-output epsilon-SVR dual in coefficient form beta = alpha - alpha*:
///   min 1/2 beta' K beta + eps |beta|_1 - z' beta,  sum(beta) = 0, |beta_i| <= C.
struct SvrDualSolution {
    Eigen::VectorXd coef;
    double bias = 0.0;
    std::size_t iterations = 0;
    double max_violation = 0.0;
};

SvrDualSolution solve_svr_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& targets, double c,
                               double epsilon, const SvrOptions& options = {});

double svr_dual_objective(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& targets,
                          const Eigen::VectorXd& coef, double epsilon);

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma);

/// 1 / (features * variance of all input entries); 1 when the variance is 0.
double default_gamma(const Eigen::MatrixXd& inputs);

struct SvrModel {
    Eigen::MatrixXd support;  // stored inputs, samples x features
    Eigen::MatrixXd coef;     // samples x hours
    Eigen::VectorXd bias;     // hours
    double c = 1.0;
    double epsilon = 0.1;
    double gamma = 1.0;

    Eigen::VectorXd predict(std::span<const double> input) const;
};

SvrModel svr_fit(const WindowDataset& data, double c, double epsilon, double gamma,
                 const SvrOptions& options = {});

} // namespace epf::ml
