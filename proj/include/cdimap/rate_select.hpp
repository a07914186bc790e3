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

#ifndef CDIMAP_RATE_SELECT_HPP
#define CDIMAP_RATE_SELECT_HPP

#include <limits>
#include <span>
#include <string_view>

#include "cdimap/channel.hpp"
#include "cdimap/quantile_map.hpp"

namespace cdimap {

enum class RateMethod { cdi_map, baseline_rayleigh, genie };

std::string_view to_string(RateMethod m);
RateMethod rate_method_from_string(std::string_view s);

struct RateDecision {
    double rate = 0.0;  // bits/s/Hz
    RateMethod method = RateMethod::cdi_map;

    // inputs the rate was derived from; NaN where not applicable
    double predictive_mean = std::numeric_limits<double>::quiet_NaN();
    double predictive_variance = std::numeric_limits<double>::quiet_NaN();
    double mean_snr = std::numeric_limits<double>::quiet_NaN();
    double mean_snr_lower_bound = std::numeric_limits<double>::quiet_NaN();
    double quantile_log_gain = std::numeric_limits<double>::quiet_NaN();
};

/// Rate at the delta-quantile of the predictive log-quantile distribution:
/// log2(1 + gamma_tx exp(mu + sqrt(2) sigma erf^-1(2 delta - 1))).
RateDecision select_rate_cdi(const PredictiveQuantile& pred, double gamma_tx, double delta);

/// Model-based baseline assuming Rayleigh fading. From M instantaneous SNRs
/// the exact delta-confidence lower bound on the mean SNR is
/// 2 sum(gamma_i) / chi2_{2M}^{-1}(1 - delta); the rate is the epsilon-outage
/// capacity of an exponential SNR with that mean.
RateDecision select_rate_baseline(std::span<const double> snr_samples, double epsilon, double delta);

/// Genie rate from the full sample set: the empirical epsilon-outage capacity.
RateDecision select_rate_genie(const FadingSampleSet& samples, double epsilon, double gamma_tx);

}  // namespace cdimap

#endif
