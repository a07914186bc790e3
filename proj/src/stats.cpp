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

#include "cdimap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdimap/error.hpp"

namespace cdimap {

namespace {

constexpr double kRateTolerance = 1e-12;

void check_epsilon(double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw DomainError("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
}

void check_samples(std::span<const double> rho)
{
    if (rho.empty())
        throw InsufficientDataError("empty sample set");
    for (double r : rho)
        if (!(r > 0.0) || !std::isfinite(r))
            throw DomainError("channel gains must be positive and finite");
}

}  // namespace

std::size_t quantile_order(std::size_t n, double epsilon)
{
    check_epsilon(epsilon);
    const double prod = static_cast<double>(n) * epsilon;
    const double nearest = std::round(prod);
    const double r = std::abs(prod - nearest) < 1e-9 ? nearest : std::floor(prod);
    return static_cast<std::size_t>(r);
}

QuantileEstimate empirical_quantile_log(std::span<const double> rho, double epsilon)
{
    check_samples(rho);
    const std::size_t r = quantile_order(rho.size(), epsilon);
    if (r < 1)
        throw InsufficientDataError("quantile: floor(N eps) = 0 for N = " +
                                    std::to_string(rho.size()) +
                                    ", eps = " + std::to_string(epsilon));
    std::vector<double> work(rho.begin(), rho.end());
    // the selected value equals that of a stable full sort; ties are value-identical
    std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(r - 1), work.end());
    const double v = work[r - 1];
    return {epsilon, std::log(v), r, v};
}

QuantileEstimate empirical_quantile_log(const FadingSampleSet& samples, double epsilon)
{
    return empirical_quantile_log(std::span<const double>(samples.rho), epsilon);
}

double rate_for_gain(double rho, double gamma_tx)
{
    return std::log2(1.0 + gamma_tx * rho);
}

bool in_outage(double rho, double rate, double gamma_tx)
{
    return rate_for_gain(rho, gamma_tx) <= rate * (1.0 + kRateTolerance);
}

double empirical_outage(std::span<const double> rho, double rate, double gamma_tx)
{
    if (!(rate >= 0.0))
        throw DomainError("empirical_outage: rate must be non-negative");
    if (rho.empty())
        throw InsufficientDataError("empirical_outage: empty sample set");
    std::size_t count = 0;
    for (double r : rho)
        if (in_outage(r, rate, gamma_tx))
            ++count;
    return static_cast<double>(count) / static_cast<double>(rho.size());
}

double empirical_outage(const FadingSampleSet& samples, double rate, double gamma_tx)
{
    return empirical_outage(std::span<const double>(samples.rho), rate, gamma_tx);
}

double outage_capacity_empirical(std::span<const double> rho, double epsilon, double gamma_tx)
{
    if (!(gamma_tx > 0.0))
        throw DomainError("outage capacity: gamma_tx must be positive");
    return rate_for_gain(empirical_quantile_log(rho, epsilon).order_value, gamma_tx);
}

double outage_capacity_empirical(const FadingSampleSet& samples, double epsilon, double gamma_tx)
{
    return outage_capacity_empirical(std::span<const double>(samples.rho), epsilon, gamma_tx);
}

double quantile_estimate_variance(std::span<const double> rho, double epsilon)
{
    check_samples(rho);
    const std::size_t n = rho.size();
    const std::size_t r = quantile_order(n, epsilon);
    if (r < 1)
        throw InsufficientDataError("quantile variance: floor(N eps) = 0");
    std::vector<double> sorted(rho.begin(), rho.end());
    std::sort(sorted.begin(), sorted.end());

    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(r))));
    const std::size_t lo = r > k ? r - k : 1;
    const std::size_t hi = std::min(n, r + k);
    if (hi == lo)
        return 0.0;
    const double gap = std::log(sorted[hi - 1]) - std::log(sorted[lo - 1]);
    if (!(gap > 0.0))
        return 0.0;
    const double width = static_cast<double>(hi - lo);
    // eps(1-eps) / (N f^2) with f = (width / N) / gap
    return epsilon * (1.0 - epsilon) * static_cast<double>(n) * gap * gap / (width * width);
}

SortedSamples::SortedSamples(std::span<const double> rho) : sorted_(rho.begin(), rho.end())
{
    std::sort(sorted_.begin(), sorted_.end());
}

std::size_t SortedSamples::count_outage(double rate, double gamma_tx) const
{
    // log2(1 + g rho) <= rate is monotone in rho, so the outage set is a prefix
    const auto it = std::partition_point(sorted_.begin(), sorted_.end(),
                                         [&](double r) { return in_outage(r, rate, gamma_tx); });
    return static_cast<std::size_t>(it - sorted_.begin());
}

double SortedSamples::outage(double rate, double gamma_tx) const
{
    if (!(rate >= 0.0))
        throw DomainError("outage: rate must be non-negative");
    return static_cast<double>(count_outage(rate, gamma_tx)) / static_cast<double>(sorted_.size());
}

}  // namespace cdimap
