#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace epf::optimize {

struct NelderMeadOptions {
    std::vector<double> initial_step;  // per coordinate; empty: 0.5 everywhere
    double f_tol = 1e-12;              // relative spread of simplex values
    double f_abs_tol = 0.0;            // absolute spread of simplex values
    double x_tol = 1e-10;              // simplex diameter, max-norm
    std::size_t max_evaluations = 4000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Unconstrained downhill simplex (reflection 1, expansion 2, contraction
/// 1/2, shrink 1/2). Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

} // namespace epf::optimize
