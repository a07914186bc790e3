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

#include "cdimap/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cdimap/error.hpp"

namespace cdimap {

namespace {

// Giles (2010) single-precision erfinv polynomial, ~1e-7 relative.
double inverse_erf_guess(double x)
{
    double w = -std::log((1.0 - x) * (1.0 + x));
    double p;
    if (w < 5.0) {
        w -= 2.5;
        p = 2.81022636e-08;
        p = 3.43273939e-07 + p * w;
        p = -3.5233877e-06 + p * w;
        p = -4.39150654e-06 + p * w;
        p = 0.00021858087 + p * w;
        p = -0.00125372503 + p * w;
        p = -0.00417768164 + p * w;
        p = 0.246640727 + p * w;
        p = 1.50140941 + p * w;
    } else {
        w = std::sqrt(w) - 3.0;
        p = -0.000200214257;
        p = 0.000100950558 + p * w;
        p = 0.00134934322 + p * w;
        p = -0.00367342844 + p * w;
        p = 0.00573950773 + p * w;
        p = -0.0076224613 + p * w;
        p = 0.00943887047 + p * w;
        p = 1.00167406 + p * w;
        p = 2.83297682 + p * w;
    }
    return p * x;
}

constexpr int kMaxIterations = 500;
constexpr double kTiny = 1e-300;

double gamma_p_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIterations; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_fraction(double a, double x)
{
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_gamma_args(double a, double x)
{
    if (!(a > 0.0) || !(x >= 0.0))
        throw DomainError("incomplete gamma: need a > 0 and x >= 0");
}

}  // namespace

double inverse_erf(double p)
{
    if (!(std::abs(p) < 1.0))
        throw DomainError("inverse_erf: |p| must be < 1, got " + std::to_string(p));
    if (p == 0.0)
        return 0.0;
    double y = inverse_erf_guess(p);
    const double two_over_sqrt_pi = 2.0 / std::sqrt(std::numbers::pi);
    for (int i = 0; i < 4; ++i) {
        const double f = std::erf(y) - p;
        if (f == 0.0)
            break;
        const double df = two_over_sqrt_pi * std::exp(-y * y);
        // Halley: f'' / f' = -2y
        y -= f / (df + y * f);
    }
    return y;
}

double gamma_p(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0)
        return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0)
        return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double chi_square_cdf(double x, double dof)
{
    if (!(dof > 0.0))
        throw DomainError("chi-square: degrees of freedom must be positive");
    if (x <= 0.0)
        return 0.0;
    return gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double p, double dof)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("chi_square_quantile: p must lie in (0, 1)");
    if (!(dof > 0.0))
        throw DomainError("chi-square: degrees of freedom must be positive");
    const double a = 0.5 * dof;
    // solve on whichever tail keeps the target away from 1
    const bool upper = p > 0.5;
    const double target = upper ? 1.0 - p : p;
    auto resid = [&](double x) {
        return upper ? gamma_q(a, 0.5 * x) - target : gamma_p(a, 0.5 * x) - target;
    };
    auto pdf = [&](double x) {
        return std::exp((a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a)) * 0.5;
    };

    // Wilson-Hilferty start
    const double z = std::sqrt(2.0) * inverse_erf(2.0 * p - 1.0);
    const double c = 2.0 / (9.0 * dof);
    double x = dof * std::pow(std::max(1.0 - c + z * std::sqrt(c), 0.05), 3.0);

    // bracket: residual of P-form increases with x, of Q-form decreases
    double lo = 0.0;
    double hi = std::max(2.0 * x, dof + 10.0);
    while ((upper ? resid(hi) > 0.0 : resid(hi) < 0.0))
        hi *= 2.0;

    for (int i = 0; i < 200; ++i) {
        const double r = resid(x);
        const bool below = upper ? r > 0.0 : r < 0.0;
        if (below)
            lo = x;
        else
            hi = x;
        const double slope = upper ? -pdf(x) : pdf(x);
        double next = x - r / slope;
        if (!(next > lo && next < hi) || !std::isfinite(next))
            next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * std::max(1.0, x) || hi - lo <= 1e-15 * std::max(1.0, x)) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

}  // namespace cdimap
