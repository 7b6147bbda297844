#include "epfbench/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace epf::optimize {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options) {
    const std::size_t dim = start.size();
    NelderMeadResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        const double f = objective(x);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(dim + 1, start);
    for (std::size_t i = 0; i < dim; ++i) {
        const double step = options.initial_step.empty() ? 0.5 : options.initial_step[i];
        simplex[i + 1][i] += step;
    }
    std::vector<double> values(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
        values[i] = eval(simplex[i]);
    }

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[dim - (dim > 0 ? 1 : 0)];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= dim; ++i) {
            for (std::size_t c = 0; c < dim; ++c) {
                diameter = std::max(diameter, std::abs(simplex[i][c] - simplex[best][c]));
            }
        }
        const double spread = values[worst] - values[best];
        const bool f_done = std::isfinite(spread) &&
                            (spread <= options.f_tol * std::abs(values[best]) || spread <= options.f_abs_tol);
        if (f_done || diameter <= options.x_tol) {
            result.converged = true;
            break;
        }
        if (result.evaluations >= options.max_evaluations) {
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t c = 0; c < dim; ++c) {
                centroid[c] += simplex[i][c];
            }
        }
        for (double& c : centroid) {
            c /= static_cast<double>(dim);
        }

        for (std::size_t c = 0; c < dim; ++c) {
            trial[c] = centroid[c] + (centroid[c] - simplex[worst][c]);
        }
        const double f_reflect = eval(trial);
        if (f_reflect < values[best]) {
            for (std::size_t c = 0; c < dim; ++c) {
                trial2[c] = centroid[c] + 2.0 * (centroid[c] - simplex[worst][c]);
            }
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
            continue;
        }
        // Contraction: outside if the reflection improved on the worst point.
        const bool outside = f_reflect < values[worst];
        for (std::size_t c = 0; c < dim; ++c) {
            const double towards = outside ? trial[c] : simplex[worst][c];
            trial2[c] = centroid[c] + 0.5 * (towards - centroid[c]);
        }
        const double f_contract = eval(trial2);
        if (f_contract < std::min(f_reflect, values[worst])) {
            simplex[worst] = trial2;
            values[worst] = f_contract;
            continue;
        }
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == best) {
                continue;
            }
            for (std::size_t c = 0; c < dim; ++c) {
                simplex[i][c] = simplex[best][c] + 0.5 * (simplex[i][c] - simplex[best][c]);
            }
            values[i] = eval(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    result.x = simplex[best];
    result.value = values[best];
    return result;
}

} // namespace epf::optimize
