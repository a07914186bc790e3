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

#include "cdimap/quantile_map.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>

#include "cdimap/error.hpp"
#include "cdimap/stats.hpp"
#include "nelder_mead.hpp"

namespace cdimap {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)
constexpr double kFirstJitter = 1e-10;
constexpr double kLastJitter = 1e-6;

// Canonical entry order (by coordinates, then id) so results do not depend on
// how the caller happened to list the training locations.
std::vector<QuantileObservation> canonical(std::vector<QuantileObservation> entries)
{
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::tie(a.location.x, a.location.y, a.location.z, a.location.id, a.q_hat) <
               std::tie(b.location.x, b.location.y, b.location.z, b.location.id, b.q_hat);
    });
    return entries;
}

Eigen::MatrixXd distance_matrix(const std::vector<QuantileObservation>& e)
{
    const auto n = static_cast<Eigen::Index>(e.size());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            d(i, j) = distance(e[static_cast<std::size_t>(i)].location,
                               e[static_cast<std::size_t>(j)].location);
            d(j, i) = d(i, j);
        }
    }
    return d;
}

Eigen::MatrixXd system_matrix(const Eigen::MatrixXd& dist, double s2, double ell, double noise)
{
    Eigen::MatrixXd a = (-dist.array() / ell).exp() * s2;
    a.diagonal().array() += noise;
    return a;
}

std::string condition_diagnostics(const Eigen::MatrixXd& a)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    std::ostringstream os;
    if (es.info() != Eigen::Success) {
        os << "eigen decomposition failed";
        return os.str();
    }
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    os << "n = " << a.rows() << ", eigenvalues in [" << lo << ", " << hi << "], condition number "
       << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    return os.str();
}

// Cholesky with jitter escalation 1e-10 .. 1e-6 on failure.
Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& a, double& jitter_used)
{
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    jitter_used = 0.0;
    for (double j = kFirstJitter; llt.info() != Eigen::Success && j <= kLastJitter * 1.0001;
         j *= 10.0) {
        Eigen::MatrixXd b = a;
        b.diagonal().array() += j;
        llt.compute(b);
        jitter_used = j;
    }
    if (llt.info() != Eigen::Success)
        throw NumericalError("GP system not positive definite after jitter 1e-6: " +
                             condition_diagnostics(a));
    return llt;
}

Eigen::VectorXd targets(const std::vector<QuantileObservation>& e)
{
    Eigen::VectorXd y(static_cast<Eigen::Index>(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i)
        y(static_cast<Eigen::Index>(i)) = e[i].q_hat;
    return y;
}

struct ProfiledFit {
    double lml = -std::numeric_limits<double>::infinity();
    double mean = 0.0;
};

// Marginal likelihood with the constant mean replaced by its GLS estimate.
ProfiledFit profiled_lml(const Eigen::MatrixXd& dist, const Eigen::VectorXd& y, double s2,
                         double ell, double noise)
{
    const Eigen::LLT<Eigen::MatrixXd> llt(system_matrix(dist, s2, ell, noise));
    if (llt.info() != Eigen::Success)
        return {};
    const auto& L = llt.matrixL();
    const Eigen::VectorXd a = L.solve(y);
    const Eigen::VectorXd b = L.solve(Eigen::VectorXd::Ones(y.size()));
    const double mean = b.dot(a) / b.dot(b);
    const Eigen::VectorXd r = a - mean * b;
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double n = static_cast<double>(y.size());
    return {-0.5 * r.squaredNorm() - 0.5 * log_det - 0.5 * n * kLog2Pi, mean};
}

}  // namespace

void QuantileDataset::validate() const
{
    if (entries.empty())
        throw InsufficientDataError("quantile dataset: no entries");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ConfigError("quantile dataset: epsilon must lie in (0, 1)");
    if (!(noise_floor >= 0.0) || !std::isfinite(noise_floor))
        throw ConfigError("quantile dataset: noise floor must be finite and non-negative");
    for (const auto& e : entries)
        if (!std::isfinite(e.q_hat))
            throw DomainError("quantile dataset: non-finite q_hat at location " +
                              std::to_string(e.location.id));
    const auto sorted = canonical(entries);
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const auto& a = sorted[i - 1].location;
        const auto& b = sorted[i].location;
        if (a.x == b.x && a.y == b.y && a.z == b.z)
            throw ConfigError("quantile dataset: duplicate location (ids " + std::to_string(a.id) +
                              ", " + std::to_string(b.id) + ")");
    }
}

QuantileDataset build_quantile_dataset(std::span<const Location> locations,
                                       std::span<const FadingSampleSet> samples, double epsilon)
{
    if (locations.size() != samples.size())
        throw ConfigError("build_quantile_dataset: locations and sample sets differ in count");
    if (locations.empty())
        throw InsufficientDataError("build_quantile_dataset: no locations");
    QuantileDataset data;
    data.epsilon = epsilon;
    data.samples_per_location = samples.front().rho.size();
    double floor_sum = 0.0;
    for (std::size_t i = 0; i < locations.size(); ++i) {
        if (samples[i].rho.size() != data.samples_per_location)
            throw ConfigError("build_quantile_dataset: all locations need the same N");
        const auto q = empirical_quantile_log(samples[i], epsilon);
        const double v = quantile_estimate_variance(samples[i].rho, epsilon);
        data.entries.push_back({locations[i], q.q_hat, v});
        floor_sum += v;
    }
    data.noise_floor = floor_sum / static_cast<double>(locations.size());
    return data;
}

void GpHyperparameters::validate() const
{
    if (!std::isfinite(mean_const))
        throw ConfigError("hyperparameters: mean_const must be finite");
    if (!(signal_variance >= 0.0) || !std::isfinite(signal_variance))
        throw ConfigError("hyperparameters: signal_variance must be >= 0");
    if (!(length_scale > 0.0) || !std::isfinite(length_scale))
        throw ConfigError("hyperparameters: length_scale must be > 0");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        throw ConfigError("hyperparameters: noise_variance must be >= 0");
}

double PredictiveQuantile::stddev() const
{
    return std::sqrt(variance);
}

double kernel_eval(const GpHyperparameters& hp, const Location& a, const Location& b)
{
    return hp.signal_variance * std::exp(-distance(a, b) / hp.length_scale);
}

double log_marginal_likelihood(const QuantileDataset& data, const GpHyperparameters& hp)
{
    data.validate();
    hp.validate();
    const auto e = canonical(data.entries);
    const Eigen::MatrixXd a =
        system_matrix(distance_matrix(e), hp.signal_variance, hp.length_scale, hp.noise_variance);
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
        throw NumericalError("log_marginal_likelihood: K + noise I not positive definite: " +
                             condition_diagnostics(a));
    const Eigen::VectorXd r = targets(e).array() - hp.mean_const;
    const Eigen::VectorXd w = llt.matrixL().solve(r);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * w.squaredNorm() - 0.5 * log_det - 0.5 * static_cast<double>(e.size()) * kLog2Pi;
}

GpHyperparameters fit_hyperparameters(const QuantileDataset& data, const FitOptions& options)
{
    data.validate();
    if (data.size() < 3)
        throw InsufficientDataError("fit_hyperparameters: need D >= 3 training locations, got " +
                                    std::to_string(data.size()));
    const auto& box = options.box;
    if (!(box.variance_min > 0.0) || !(box.length_min_m > 0.0) ||
        box.variance_max < box.variance_min || box.length_max_m < box.length_min_m)
        throw ConfigError("fit_hyperparameters: invalid hyperparameter box");

    const auto e = canonical(data.entries);
    const Eigen::MatrixXd dist = distance_matrix(e);
    const Eigen::VectorXd y = targets(e);
    const double n = static_cast<double>(y.size());

    const double noise_lo = std::clamp(data.noise_floor, box.variance_min, box.variance_max);
    const std::array<double, 3> lower{std::log(box.variance_min), std::log(box.length_min_m),
                                      std::log(noise_lo)};
    const std::array<double, 3> upper{std::log(box.variance_max), std::log(box.length_max_m),
                                      std::log(box.variance_max)};

    auto objective = [&](const std::array<double, 3>& t) {
        return -profiled_lml(dist, y, std::exp(t[0]), std::exp(t[1]), std::exp(t[2])).lml;
    };

    // scales for the starting points
    const double y_mean = y.mean();
    const double y_var = std::max((y.array() - y_mean).square().sum() / n, box.variance_min);
    std::vector<double> pair_d;
    for (Eigen::Index i = 0; i < dist.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            pair_d.push_back(dist(i, j));
    std::sort(pair_d.begin(), pair_d.end());
    const double d_min = std::max(pair_d.front(), box.length_min_m);
    const double d_med = pair_d[pair_d.size() / 2];
    const double d_max = pair_d.back();

    auto clamp_start = [&](double s2, double ell, double noise) {
        return std::array<double, 3>{std::clamp(std::log(s2), lower[0], upper[0]),
                                     std::clamp(std::log(ell), lower[1], upper[1]),
                                     std::clamp(std::log(noise), lower[2], upper[2])};
    };

    RandomStream rng(options.seed);
    detail::BoxMinimum<3> best;
    best.value = HUGE_VAL;
    bool have_best = false;
    const std::size_t starts = std::max<std::size_t>(1, options.starts);
    for (std::size_t s = 0; s < starts; ++s) {
        std::array<double, 3> start;
        if (s == 0) {
            start = clamp_start(0.9 * y_var, 0.5 * d_med, std::max(noise_lo, 0.1 * y_var));
        } else {
            const double s2 = y_var * std::exp(rng.uniform(-2.3, 2.3));
            const double ell = std::exp(rng.uniform(std::log(0.5 * d_min), std::log(2.0 * d_max)));
            const double noise = std::max(noise_lo, y_var * std::exp(rng.uniform(-4.6, 0.0)));
            start = clamp_start(s2, ell, noise);
        }
        const auto res = detail::nelder_mead_box<3>(objective, start, lower, upper, 1.0,
                                                    options.max_evaluations, options.f_tol,
                                                    options.x_tol);
        if (!have_best || res.value < best.value) {
            best = res;
            have_best = true;
        }
    }
    if (!(best.value < HUGE_VAL))
        throw NumericalError("fit_hyperparameters: no start produced a positive definite system");

    GpHyperparameters hp;
    hp.signal_variance = std::exp(best.x[0]);
    hp.length_scale = std::exp(best.x[1]);
    hp.noise_variance = std::exp(best.x[2]);
    hp.mean_const = profiled_lml(dist, y, hp.signal_variance, hp.length_scale, hp.noise_variance).mean;
    return hp;
}

QuantileMap::QuantileMap(QuantileDataset data, const GpHyperparameters& hp)
    : data_(std::move(data)), hp_(hp)
{
    data_.validate();
    hp_.validate();
    data_.entries = canonical(std::move(data_.entries));
    const Eigen::MatrixXd a = system_matrix(distance_matrix(data_.entries), hp_.signal_variance,
                                            hp_.length_scale, hp_.noise_variance);
    llt_ = factorize(a, jitter_);
    alpha_ = llt_.solve((targets(data_.entries).array() - hp_.mean_const).matrix());
}

PredictiveQuantile QuantileMap::predict(const Location& x) const
{
    const auto n = static_cast<Eigen::Index>(data_.entries.size());
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i)
        k(i) = kernel_eval(hp_, data_.entries[static_cast<std::size_t>(i)].location, x);
    const double mean = hp_.mean_const + k.dot(alpha_);
    const Eigen::VectorXd v = llt_.matrixL().solve(k);
    double var = hp_.signal_variance + hp_.noise_variance - v.squaredNorm();
    if (!std::isfinite(mean) || !std::isfinite(var))
        throw NumericalError("predict: non-finite prediction at location " + std::to_string(x.id));
    if (var < 0.0) {
        if (var < -1e-10)
            throw NumericalError("predict: predictive variance " + std::to_string(var) +
                                 " is negative beyond round-off; jitter " + std::to_string(jitter_));
        std::clog << "cdimap: warning: predictive variance " << var << " clamped to 0\n";
        var = 0.0;
    }
    return {mean, var};
}

PredictiveQuantile predict(const QuantileDataset& data, const GpHyperparameters& hp, const Location& x)
{
    return QuantileMap(data, hp).predict(x);
}

}  // namespace cdimap
