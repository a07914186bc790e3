// SPDX-License-Identifier: Apache-2.0
//
// cdimap - channel distribution maps for ultra-reliable rate selection
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CDIMAP_NELDER_MEAD_HPP
#define CDIMAP_NELDER_MEAD_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace cdimap::detail {

template <std::size_t Dim>
struct BoxMinimum {
    std::array<double, Dim> x{};
    double value = 0.0;
    std::size_t evaluations = 0;
};

// Nelder-Mead simplex minimization restricted to a box. Trial points are
// projected onto the box before evaluation, so the simplex can collapse onto a
// face when the optimum sits on the boundary.
template <std::size_t Dim, class Objective>
BoxMinimum<Dim> nelder_mead_box(Objective&& f, std::array<double, Dim> start,
                                const std::array<double, Dim>& lower,
                                const std::array<double, Dim>& upper, double step,
                                std::size_t max_evaluations, double f_tol, double x_tol)
{
    using Point = std::array<double, Dim>;
    constexpr std::size_t n_vertices = Dim + 1;

    auto project = [&](Point p) {
        for (std::size_t i = 0; i < Dim; ++i)
            p[i] = std::clamp(p[i], lower[i], upper[i]);
        return p;
    };

    std::size_t evals = 0;
    auto eval = [&](const Point& p) {
        ++evals;
        const double v = f(p);
        return std::isfinite(v) ? v : HUGE_VAL;
    };

    std::array<Point, n_vertices> simplex;
    std::array<double, n_vertices> values;
    simplex[0] = project(start);
    for (std::size_t i = 0; i < Dim; ++i) {
        Point p = simplex[0];
        // step away from the nearer bound so the vertex stays distinct
        p[i] += (p[i] + step <= upper[i]) ? step : -step;
        simplex[i + 1] = project(p);
    }
    for (std::size_t i = 0; i < n_vertices; ++i)
        values[i] = eval(simplex[i]);

    std::array<std::size_t, n_vertices> order;
    while (evals < max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n_vertices - 2];

        double size = 0.0;
        for (std::size_t v = 0; v < n_vertices; ++v)
            for (std::size_t i = 0; i < Dim; ++i)
                size = std::max(size, std::abs(simplex[v][i] - simplex[best][i]));
        if (std::abs(values[worst] - values[best]) <= f_tol * (1.0 + std::abs(values[best])) &&
            size <= x_tol)
            break;

        Point centroid{};
        for (std::size_t v = 0; v < n_vertices; ++v) {
            if (v == worst) continue;
            for (std::size_t i = 0; i < Dim; ++i)
                centroid[i] += simplex[v][i] / static_cast<double>(Dim);
        }
        auto along = [&](double t) {
            Point p;
            for (std::size_t i = 0; i < Dim; ++i)
                p[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
            return project(p);
        };

        const Point reflected = along(-1.0);
        const double f_r = eval(reflected);
        if (f_r < values[best]) {
            const Point expanded = along(-2.0);
            const double f_e = eval(expanded);
            if (f_e < f_r) {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if (f_r < values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = f_r;
            continue;
        }
        const bool outside = f_r < values[worst];
        const Point contracted = along(outside ? -0.5 : 0.5);
        const double f_c = eval(contracted);
        if (f_c < (outside ? f_r : values[worst])) {
            simplex[worst] = contracted;
            values[worst] = f_c;
            continue;
        }
        // shrink toward the best vertex
        for (std::size_t v = 0; v < n_vertices; ++v) {
            if (v == best) continue;
            for (std::size_t i = 0; i < Dim; ++i)
                simplex[v][i] = simplex[best][i] + 0.5 * (simplex[v][i] - simplex[best][i]);
            simplex[v] = project(simplex[v]);
            values[v] = eval(simplex[v]);
        }
    }

    const auto it = std::min_element(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(it - values.begin());
    return {simplex[idx], values[idx], evals};
}

}  // namespace cdimap::detail

#endif
