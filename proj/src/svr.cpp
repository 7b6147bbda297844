#include "epfbench/svr.hpp"

#include "epfbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace epf::ml {

namespace {

constexpr double kTau = 1e-12;

// Sequential minimal optimization over the 2n-variable form (alpha, alpha*)
// with second-order working-set selection.
class SmoSolver {
public:
    SmoSolver(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& z, double c, double epsilon)
        : k_(kernel), n_(kernel.rows()), c_(c), alpha_(2 * n_, 0.0), grad_(2 * n_), sign_(2 * n_) {
        for (Eigen::Index i = 0; i < n_; ++i) {
            sign_[static_cast<std::size_t>(i)] = 1;
            sign_[static_cast<std::size_t>(i + n_)] = -1;
            grad_[static_cast<std::size_t>(i)] = epsilon - z[i];
            grad_[static_cast<std::size_t>(i + n_)] = epsilon + z[i];
        }
    }

    double q(std::size_t a, std::size_t b) const {
        return sign_[a] * sign_[b] * k_(idx(a), idx(b));
    }

    bool upper(std::size_t t) const { return alpha_[t] >= c_; }
    bool lower(std::size_t t) const { return alpha_[t] <= 0.0; }

    // Returns false when optimal within `tol`.
    bool select(double tol, std::size_t& out_i, std::size_t& out_j, double& violation) const {
        const std::size_t m = alpha_.size();
        double gmax = -std::numeric_limits<double>::infinity();
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t gmax_idx = -1;
        std::ptrdiff_t gmin_idx = -1;
        double obj_min = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < m; ++t) {
            if (sign_[t] == 1) {
                if (!upper(t) && -grad_[t] >= gmax) {
                    gmax = -grad_[t];
                    gmax_idx = static_cast<std::ptrdiff_t>(t);
                }
            } else if (!lower(t) && grad_[t] >= gmax) {
                gmax = grad_[t];
                gmax_idx = static_cast<std::ptrdiff_t>(t);
            }
        }
        const auto i = static_cast<std::size_t>(gmax_idx < 0 ? 0 : gmax_idx);
        for (std::size_t j = 0; j < m; ++j) {
            if (sign_[j] == 1) {
                if (lower(j)) {
                    continue;
                }
                const double diff = gmax + grad_[j];
                gmax2 = std::max(gmax2, grad_[j]);
                if (gmax_idx >= 0 && diff > 0.0) {
                    double quad = q(i, i) + q(j, j) - 2.0 * sign_[i] * q(i, j);
                    quad = quad > 0.0 ? quad : kTau;
                    const double obj = -(diff * diff) / quad;
                    if (obj <= obj_min) {
                        gmin_idx = static_cast<std::ptrdiff_t>(j);
                        obj_min = obj;
                    }
                }
            } else {
                if (upper(j)) {
                    continue;
                }
                const double diff = gmax - grad_[j];
                gmax2 = std::max(gmax2, -grad_[j]);
                if (gmax_idx >= 0 && diff > 0.0) {
                    double quad = q(i, i) + q(j, j) + 2.0 * sign_[i] * q(i, j);
                    quad = quad > 0.0 ? quad : kTau;
                    const double obj = -(diff * diff) / quad;
                    if (obj <= obj_min) {
                        gmin_idx = static_cast<std::ptrdiff_t>(j);
                        obj_min = obj;
                    }
                }
            }
        }
        violation = gmax + gmax2;
        if (!std::isfinite(violation)) {
            violation = 0.0;
        }
        if (violation < tol || gmin_idx < 0 || gmax_idx < 0) {
            return false;
        }
        out_i = i;
        out_j = static_cast<std::size_t>(gmin_idx);
        return true;
    }

    void update(std::size_t i, std::size_t j) {
        const double old_i = alpha_[i];
        const double old_j = alpha_[j];
        const double qij = q(i, j);
        double& ai = alpha_[i];
        double& aj = alpha_[j];
        if (sign_[i] != sign_[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * qij;
            quad = quad > 0.0 ? quad : kTau;
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > 0.0) {
                if (ai > c_) {
                    ai = c_;
                    aj = c_ - diff;
                }
            } else if (aj > c_) {
                aj = c_;
                ai = c_ + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * qij;
            quad = quad > 0.0 ? quad : kTau;
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > c_) {
                if (ai > c_) {
                    ai = c_;
                    aj = sum - c_;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > c_) {
                if (aj > c_) {
                    aj = c_;
                    ai = sum - c_;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        const double di = ai - old_i;
        const double dj = aj - old_j;
        for (std::size_t t = 0; t < alpha_.size(); ++t) {
            grad_[t] += q(i, t) * di + q(j, t) * dj;
        }
    }

    double rho() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t n_free = 0;
        for (std::size_t t = 0; t < alpha_.size(); ++t) {
            const double yg = sign_[t] * grad_[t];
            if (upper(t)) {
                if (sign_[t] == -1) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else if (lower(t)) {
                if (sign_[t] == 1) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else {
                ++n_free;
                sum_free += yg;
            }
        }
        return n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    }

    Eigen::VectorXd coef() const {
        Eigen::VectorXd out(n_);
        for (Eigen::Index i = 0; i < n_; ++i) {
            out[i] = alpha_[static_cast<std::size_t>(i)] - alpha_[static_cast<std::size_t>(i + n_)];
        }
        return out;
    }

    void verify() const {
        double sum = 0.0;
        for (std::size_t t = 0; t < alpha_.size(); ++t) {
            if (alpha_[t] < 0.0 || alpha_[t] > c_) {
                throw Error(Errc::InvalidArgument, "SVR update left the box constraint");
            }
            sum += sign_[t] * alpha_[t];
        }
        if (std::abs(sum) > 1e-9 * c_ * static_cast<double>(alpha_.size())) {
            throw Error(Errc::InvalidArgument, "SVR update broke the equality constraint");
        }
    }

private:
    Eigen::Index idx(std::size_t t) const {
        const auto i = static_cast<Eigen::Index>(t);
        return i < n_ ? i : i - n_;
    }

    const Eigen::MatrixXd& k_;
    Eigen::Index n_;
    double c_;
    std::vector<double> alpha_;
    std::vector<double> grad_;
    std::vector<int> sign_;
};

} // namespace

SvrDualSolution solve_svr_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& targets, double c,
                               double epsilon, const SvrOptions& options) {
    const Eigen::Index n = kernel.rows();
    if (n < 2 || kernel.cols() != n || targets.size() != n) {
        throw Error(Errc::InvalidArgument, "SVR needs at least 2 samples and a square kernel");
    }
    if (!(c > 0.0) || !(epsilon >= 0.0)) {
        throw Error(Errc::InvalidArgument, "SVR needs C > 0 and epsilon >= 0");
    }
    SmoSolver smo(kernel, targets, c, epsilon);
    const std::size_t cap = options.max_iter_factor * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    SvrDualSolution sol;
    std::size_t i = 0;
    std::size_t j = 0;
    while (smo.select(options.tol, i, j, sol.max_violation)) {
        if (sol.iterations >= cap) {
            throw Error(Errc::DidNotConverge, "SMO hit the iteration cap of " + std::to_string(cap) +
                                                  " with KKT violation " + std::to_string(sol.max_violation));
        }
        smo.update(i, j);
        ++sol.iterations;
        if (options.verify_each_update) {
            smo.verify();
        }
    }
    sol.coef = smo.coef();
    sol.bias = -smo.rho();
    return sol;
}

double svr_dual_objective(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& targets,
                          const Eigen::VectorXd& coef, double epsilon) {
    return 0.5 * coef.dot(kernel * coef) + epsilon * coef.lpNorm<1>() - targets.dot(coef);
}

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma) {
    const Eigen::VectorXd an = a.rowwise().squaredNorm();
    const Eigen::VectorXd bn = b.rowwise().squaredNorm();
    Eigen::MatrixXd d = -2.0 * a * b.transpose();
    d.colwise() += an;
    d.rowwise() += bn.transpose();
    return (-gamma * d.cwiseMax(0.0)).array().exp().matrix();
}

double default_gamma(const Eigen::MatrixXd& inputs) {
    const double mean = inputs.mean();
    const double var = (inputs.array() - mean).square().mean();
    if (!(var > 0.0)) {
        return 1.0;
    }
    return 1.0 / (static_cast<double>(inputs.cols()) * var);
}

Eigen::VectorXd SvrModel::predict(std::span<const double> input) const {
    if (static_cast<Eigen::Index>(input.size()) != support.cols()) {
        throw Error(Errc::LengthMismatch, "SVR query has " + std::to_string(input.size()) + " values, expected " +
                                              std::to_string(support.cols()));
    }
    const Eigen::Map<const Eigen::RowVectorXd> q(input.data(), support.cols());
    const Eigen::MatrixXd k = rbf_kernel(support, q, gamma);  // samples x 1
    return coef.transpose() * k.col(0) + bias;
}

SvrModel svr_fit(const WindowDataset& data, double c, double epsilon, double gamma, const SvrOptions& options) {
    if (data.samples() < 2) {
        throw Error(Errc::TooFewSamples, "SVR needs at least 2 samples");
    }
    if (!(gamma > 0.0)) {
        throw Error(Errc::InvalidArgument, "SVR needs gamma > 0");
    }
    SvrModel model;
    model.support = data.inputs;
    model.c = c;
    model.epsilon = epsilon;
    model.gamma = gamma;
    const Eigen::MatrixXd kernel = rbf_kernel(data.inputs, data.inputs, gamma);
    model.coef.resize(data.samples(), data.targets.cols());
    model.bias.resize(data.targets.cols());
    for (Eigen::Index h = 0; h < data.targets.cols(); ++h) {
        const auto sol = solve_svr_dual(kernel, data.targets.col(h), c, epsilon, options);
        model.coef.col(h) = sol.coef;
        model.bias[h] = sol.bias;
    }
    return model;
}

} // namespace epf::ml
