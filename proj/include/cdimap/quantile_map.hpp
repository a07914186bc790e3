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

#ifndef CDIMAP_QUANTILE_MAP_HPP
#define CDIMAP_QUANTILE_MAP_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "cdimap/channel.hpp"
#include "cdimap/scenario.hpp"

namespace cdimap {

struct QuantileObservation {
    Location location;
    double q_hat = 0.0;               // log-gain
    double estimate_variance = 0.0;   // sampling variance of q_hat, 0 if unknown
};

/// Per-location log-quantile estimates, all at the same epsilon and N.
struct QuantileDataset {
    std::vector<QuantileObservation> entries;
    double epsilon = 0.01;
    std::size_t samples_per_location = 0;
    // lower bound for the fitted noise variance (log-gain^2)
    double noise_floor = 0.0;

    std::size_t size() const { return entries.size(); }
    void validate() const;
};

/// Reduces fading samples to log-quantiles. The noise floor is the mean of
/// the per-location order-statistic variances.
QuantileDataset build_quantile_dataset(std::span<const Location> locations,
                                       std::span<const FadingSampleSet> samples, double epsilon);

struct GpHyperparameters {
    double mean_const = 0.0;       // log-gain
    double signal_variance = 1.0;  // log-gain^2
    double length_scale = 10.0;    // m
    double noise_variance = 0.1;   // log-gain^2

    void validate() const;
};

struct HyperparameterBox {
    double length_min_m = 0.5;
    double length_max_m = 500.0;
    double variance_min = 1e-6;
    double variance_max = 1e3;
};

struct FitOptions {
    HyperparameterBox box;
    std::size_t starts = 8;
    std::uint64_t seed = 0x5eedULL;
    std::size_t max_evaluations = 600;  // per start
    double f_tol = 1e-10;
    double x_tol = 1e-6;                // in log-parameter units
};

struct PredictiveQuantile {
    double mean = 0.0;      // mu, log-gain
    double variance = 0.0;  // sigma^2, log-gain^2

    double stddev() const;
};

/// Exponential (Matern-1/2) covariance s^2 exp(-|a - b| / l).
double kernel_eval(const GpHyperparameters& hp, const Location& a, const Location& b);

/// log N(y | mean_const 1, K + noise I).
double log_marginal_likelihood(const QuantileDataset& data, const GpHyperparameters& hp);

/// Maximizes the marginal likelihood over the box with multi-start
/// Nelder-Mead on (log s^2, log l, log noise). The constant mean is profiled
/// out in closed form (generalized least squares) at every evaluation.
/// Deterministic given options.seed and independent of the entry order.
GpHyperparameters fit_hyperparameters(const QuantileDataset& data, const FitOptions& options = {});

/// A fitted CDI map: the training data, its hyperparameters and the Cholesky
/// factor of K + noise I. Immutable once built, shareable across threads.
class QuantileMap {
 public:
    QuantileMap(QuantileDataset data, const GpHyperparameters& hp);

    PredictiveQuantile predict(const Location& x) const;

    const QuantileDataset& dataset() const { return data_; }
    const GpHyperparameters& hyperparameters() const { return hp_; }
    // diagonal jitter that was needed to factorize, 0 normally
    double jitter() const { return jitter_; }

 private:
    QuantileDataset data_;
    GpHyperparameters hp_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

PredictiveQuantile predict(const QuantileDataset& data, const GpHyperparameters& hp, const Location& x);

}  // namespace cdimap

#endif
