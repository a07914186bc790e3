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

#include "cdimap/rate_select.hpp"

#include <cmath>
#include <string>

#include "cdimap/error.hpp"
#include "cdimap/special_functions.hpp"
#include "cdimap/stats.hpp"

namespace cdimap {

std::string_view to_string(RateMethod m)
{
    switch (m) {
    case RateMethod::cdi_map: return "cdi_map";
    case RateMethod::baseline_rayleigh: return "baseline_rayleigh";
    case RateMethod::genie: return "genie";
    }
    return "unknown";
}

RateMethod rate_method_from_string(std::string_view s)
{
    if (s == "cdi_map") return RateMethod::cdi_map;
    if (s == "baseline_rayleigh") return RateMethod::baseline_rayleigh;
    if (s == "genie") return RateMethod::genie;
    throw FormatError("unknown rate method '" + std::string(s) + "'");
}

RateDecision select_rate_cdi(const PredictiveQuantile& pred, double gamma_tx, double delta)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("select_rate_cdi: delta must lie in (0, 1)");
    if (!(pred.variance >= 0.0))
        throw DomainError("select_rate_cdi: predictive variance must be >= 0");
    if (!(gamma_tx > 0.0))
        throw DomainError("select_rate_cdi: gamma_tx must be positive");
    const double q_delta = pred.mean + std::sqrt(2.0) * pred.stddev() * inverse_erf(2.0 * delta - 1.0);
    RateDecision d;
    d.rate = std::log2(1.0 + gamma_tx * std::exp(q_delta));
    d.method = RateMethod::cdi_map;
    d.predictive_mean = pred.mean;
    d.predictive_variance = pred.variance;
    return d;
}

RateDecision select_rate_baseline(std::span<const double> snr_samples, double epsilon, double delta)
{
    if (snr_samples.empty())
        throw InsufficientDataError("select_rate_baseline: need M >= 1 samples");
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw DomainError("select_rate_baseline: epsilon and delta must lie in (0, 1)");
    double sum = 0.0;
    for (double g : snr_samples) {
        if (!(g > 0.0) || !std::isfinite(g))
            throw DomainError("select_rate_baseline: SNR samples must be positive");
        sum += g;
    }
    const double m = static_cast<double>(snr_samples.size());
    // 2 sum / mean ~ chi2 with 2M dof under exponential SNR
    const double lower = 2.0 * sum / chi_square_quantile(1.0 - delta, 2.0 * m);
    RateDecision d;
    d.rate = std::log2(1.0 + lower * -std::log1p(-epsilon));
    d.method = RateMethod::baseline_rayleigh;
    d.mean_snr = sum / m;
    d.mean_snr_lower_bound = lower;
    return d;
}

RateDecision select_rate_genie(const FadingSampleSet& samples, double epsilon, double gamma_tx)
{
    RateDecision d;
    d.rate = outage_capacity_empirical(samples, epsilon, gamma_tx);
    d.method = RateMethod::genie;
    d.quantile_log_gain = empirical_quantile_log(samples, epsilon).q_hat;
    return d;
}

}  // namespace cdimap
