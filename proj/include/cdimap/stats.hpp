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

#ifndef CDIMAP_STATS_HPP
#define CDIMAP_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "cdimap/channel.hpp"

namespace cdimap {

/// Order-statistic estimate of the log epsilon-quantile of the channel gain.
struct QuantileEstimate {
    double epsilon = 0.0;
    double q_hat = 0.0;         // ln of the r-th smallest gain
    std::size_t order = 0;      // r = floor(N epsilon), 1-based
    double order_value = 0.0;   // the r-th smallest gain itself (linear)
};

/// r = floor(N * epsilon). Products within 1e-9 of an integer are snapped to
/// it, so that e.g. N = 100, epsilon = 0.29 gives r = 29.
std::size_t quantile_order(std::size_t n, double epsilon);

QuantileEstimate empirical_quantile_log(std::span<const double> rho, double epsilon);
QuantileEstimate empirical_quantile_log(const FadingSampleSet& samples, double epsilon);

/// Achievable rate log2(1 + gamma_tx * rho), bits/s/Hz.
double rate_for_gain(double rho, double gamma_tx);

/// Fraction of samples in outage at rate R, i.e. with log2(1 + gamma_tx rho) <= R.
// True when a channel gain rho cannot carry `rate`: log2(1 + gamma_tx rho) <= rate, with a
// relative round-off allowance of 1e-12 so a rate built from exp(ln rho) still counts rho.
bool in_outage(double rho, double rate, double gamma_tx);

double empirical_outage(std::span<const double> rho, double rate, double gamma_tx);
double empirical_outage(const FadingSampleSet& samples, double rate, double gamma_tx);

/// log2(1 + gamma_tx * rho_(r)), the empirical epsilon-outage capacity.
double outage_capacity_empirical(std::span<const double> rho, double epsilon, double gamma_tx);
double outage_capacity_empirical(const FadingSampleSet& samples, double epsilon, double gamma_tx);

/// Asymptotic variance of the log-quantile estimate,
/// eps (1 - eps) / (N f(q)^2), with the log-gain density f estimated by a
/// finite difference over the order statistics r - k .. r + k,
/// k = floor(sqrt(r)). Returns 0 when the difference is degenerate.
double quantile_estimate_variance(std::span<const double> rho, double epsilon);

/// Sample set sorted once, for repeated outage queries.
class SortedSamples {
 public:
    SortedSamples() = default;
    explicit SortedSamples(std::span<const double> rho);

    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& values() const { return sorted_; }

    // Number of samples with log2(1 + gamma_tx rho) <= rate.
    std::size_t count_outage(double rate, double gamma_tx) const;
    double outage(double rate, double gamma_tx) const;

 private:
    std::vector<double> sorted_;
};

}  // namespace cdimap

#endif
