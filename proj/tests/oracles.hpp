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

// Independent reference implementations used to cross-check the library.
// Nothing here calls into cdimap numerics.

#ifndef CDIMAP_TESTS_ORACLES_HPP
#define CDIMAP_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

// ln of the r-th smallest sample, r = floor(N eps) computed by repeated addition.
inline double quantile_log(std::vector<double> rho, double eps)
{
    std::sort(rho.begin(), rho.end());
    std::size_t r = 0;
    while (static_cast<double>(r + 1) <= static_cast<double>(rho.size()) * eps + 1e-9)
        ++r;
    if (r == 0)
        throw std::domain_error("r = 0");
    return std::log(rho[r - 1]);
}

using Matrix = std::vector<std::vector<double>>;

// Gauss-Jordan inverse with partial pivoting; also returns ln|det|.
inline Matrix invert(Matrix a, double& log_abs_det)
{
    const std::size_t n = a.size();
    Matrix inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        inv[i][i] = 1.0;
    log_abs_det = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c]))
                p = r;
        if (a[p][c] == 0.0)
            throw std::domain_error("singular");
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        const double piv = a[c][c];
        log_abs_det += std::log(std::abs(piv));
        for (std::size_t k = 0; k < n; ++k) {
            a[c][k] /= piv;
            inv[c][k] /= piv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c)
                continue;
            const double f = a[r][c];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

struct Point {
    double x, y, z;
};

struct GpCase {
    std::vector<Point> pts;
    std::vector<double> y;
    double mean, s2, ell, noise;
};

inline double cov(const GpCase& g, const Point& a, const Point& b)
{
    const double d = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                               (a.z - b.z) * (a.z - b.z));
    return g.s2 * std::exp(-d / g.ell);
}

inline Matrix system(const GpCase& g)
{
    const std::size_t n = g.pts.size();
    Matrix a(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = cov(g, g.pts[i], g.pts[j]) + (i == j ? g.noise : 0.0);
    return a;
}

// Joint Gaussian conditioning of a new noisy observation at x.
inline void condition(const GpCase& g, const Point& x, double& mu, double& var)
{
    double ld = 0.0;
    const Matrix inv = invert(system(g), ld);
    const std::size_t n = g.pts.size();
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i)
        k[i] = cov(g, g.pts[i], x);
    mu = g.mean;
    var = g.s2 + g.noise;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            mu += k[i] * inv[i][j] * (g.y[j] - g.mean);
            var -= k[i] * inv[i][j] * k[j];
        }
}

inline double log_likelihood(const GpCase& g)
{
    double ld = 0.0;
    const Matrix inv = invert(system(g), ld);
    const std::size_t n = g.pts.size();
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            quad += (g.y[i] - g.mean) * inv[i][j] * (g.y[j] - g.mean);
    return -0.5 * quad - 0.5 * ld - 0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
}

// erf inverse by bisection on std::erf.
inline double inverse_erf(double p)
{
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::erf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Chi-square CDF for even dof 2m: 1 - exp(-x/2) sum_{k<m} (x/2)^k / k!.
inline double chi_square_cdf_even(double x, int dof)
{
    const double h = 0.5 * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < dof / 2; ++k) {
        term *= h / k;
        sum += term;
    }
    return 1.0 - std::exp(-h) * sum;
}

inline double chi_square_quantile_even(double p, int dof)
{
    double lo = 0.0, hi = 1.0;
    while (chi_square_cdf_even(hi, dof) < p)
        hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chi_square_cdf_even(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Kolmogorov-Smirnov distance of a sample to Exp(1).
inline double ks_exponential(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = 1.0 - std::exp(-v[i]);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n),
                      std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return d;
}

}  // namespace oracle

#endif
