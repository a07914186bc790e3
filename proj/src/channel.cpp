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

#include "cdimap/channel.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "cdimap/error.hpp"

namespace cdimap {

namespace {

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

// Unnormalized DFT with the given FFTW sign.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& in, int sign)
{
    const int n = static_cast<int>(in.size());
    std::vector<std::complex<double>> out(in.size());
    std::vector<std::complex<double>> work(in);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(work.data()),
                                reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr)
        throw NumericalError("fftw: failed to create plan for n = " + std::to_string(n));
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

double to_db_amplitude(double magnitude)
{
    return magnitude > 0.0 ? 20.0 * std::log10(magnitude)
                           : -std::numeric_limits<double>::infinity();
}

}  // namespace

void MultipathProfile::validate() const
{
    if (paths.empty())
        throw ConfigError("multipath profile: needs at least one path");
    for (const auto& p : paths) {
        if (!(p.delay_s > 0.0) || !std::isfinite(p.delay_s))
            throw ConfigError("multipath profile: path delays must be positive and finite");
        if (!std::isfinite(p.coefficient.real()) || !std::isfinite(p.coefficient.imag()))
            throw ConfigError("multipath profile: path coefficients must be finite");
    }
}

double FrequencyGrid::frequency(std::size_t i) const
{
    return f_min_hz + static_cast<double>(i) * spacing();
}

void FrequencyGrid::validate() const
{
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz) || !std::isfinite(f_max_hz))
        throw ConfigError("frequency grid: need f_max > f_min > 0");
    if (n_points < 2)
        throw ConfigError("frequency grid: need n_points >= 2");
}

void CfrSweep::validate() const
{
    grid.validate();
    if (values.size() != grid.n_points)
        throw FormatError("cfr sweep: " + std::to_string(values.size()) +
                          " values for a grid of " + std::to_string(grid.n_points) + " points");
}

void FadingSampleSet::validate() const
{
    if (rho.empty())
        throw InsufficientDataError("fading samples: empty sample set");
    for (double r : rho) {
        if (!(r > 0.0) || !std::isfinite(r))
            throw DomainError("fading samples: gains must be positive and finite (location " +
                              std::to_string(location_id) + ")");
    }
}

void EnvironmentSpec::validate() const
{
    if (!line_of_sight && scatterers == 0)
        throw ConfigError("environment: no LOS path and no scatterers");
    if (!(correlation_length_m > 0.0))
        throw ConfigError("environment: correlation_length_m must be positive");
    if (k_factor_std_db < 0.0 || shadowing_std_db < 0.0)
        throw ConfigError("environment: field standard deviations must be non-negative");
    if (!(delay_spread_min_s > 0.0) || delay_spread_max_s < delay_spread_min_s)
        throw ConfigError("environment: need 0 < delay_spread_min_s <= delay_spread_max_s");
    if (!std::isfinite(k_factor_mean_db) || !std::isfinite(gain_offset_db))
        throw ConfigError("environment: k_factor_mean_db and gain_offset_db must be finite");
}

std::vector<LargeScaleSample> draw_large_scale_fields(const EnvironmentSpec& env,
                                                      std::span<const Location> locations,
                                                      RandomStream& rng)
{
    env.validate();
    const auto n = static_cast<Eigen::Index>(locations.size());
    Eigen::MatrixXd corr(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            corr(i, j) = std::exp(-distance(locations[static_cast<std::size_t>(i)],
                                            locations[static_cast<std::size_t>(j)]) /
                                  env.correlation_length_m);

    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    double jitter = 1e-10;
    while (llt.info() != Eigen::Success && jitter <= 1e-6) {
        llt.compute(corr + jitter * Eigen::MatrixXd::Identity(n, n));
        jitter *= 10.0;
    }
    if (llt.info() != Eigen::Success)
        throw NumericalError("large-scale fields: correlation matrix not positive definite "
                             "(duplicate locations?)");

    Eigen::VectorXd z_shadow(n), z_k(n);
    for (Eigen::Index i = 0; i < n; ++i) z_shadow(i) = rng.normal();
    for (Eigen::Index i = 0; i < n; ++i) z_k(i) = rng.normal();
    const Eigen::MatrixXd L = llt.matrixL();
    const Eigen::VectorXd shadow = L * z_shadow;
    const Eigen::VectorXd kfac = L * z_k;

    std::vector<LargeScaleSample> out(locations.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = {env.shadowing_std_db * shadow(i),
                                            env.k_factor_mean_db + env.k_factor_std_db * kfac(i)};
    }
    return out;
}

MultipathProfile synth_multipath(const EnvironmentSpec& env, const LargeScaleSample& field,
                                 const Location& loc, const Location& bs, double center_frequency_hz,
                                 RandomStream& rng)
{
    env.validate();
    const double d = distance(loc, bs);
    if (!(d > 0.0))
        throw ConfigError("synth_multipath: location " + std::to_string(loc.id) +
                          " coincides with the base station");
    const double tau_los = d / kSpeedOfLight;

    double gain = std::pow(10.0, (field.shadowing_db + env.gain_offset_db) / 10.0);
    if (env.free_space_pathloss)
        gain *= std::pow(10.0, free_space_loss(d, center_frequency_hz) / 10.0);

    double los_power = 0.0;
    double scatter_power = gain;
    if (env.scatterers == 0) {
        los_power = gain;
        scatter_power = 0.0;
    } else if (env.line_of_sight) {
        const double k = std::pow(10.0, field.k_factor_db / 10.0);
        los_power = gain * k / (k + 1.0);
        scatter_power = gain / (k + 1.0);
    }

    MultipathProfile profile;
    profile.paths.reserve(env.scatterers + 1);
    if (env.line_of_sight || env.scatterers == 0)
        profile.paths.push_back({std::complex<double>(std::sqrt(los_power), 0.0), tau_los});

    if (env.scatterers > 0) {
        const double spread = rng.uniform(env.delay_spread_min_s, env.delay_spread_max_s);
        const double per_path = scatter_power / static_cast<double>(env.scatterers);
        for (std::size_t k = 0; k < env.scatterers; ++k) {
            const double tau = tau_los + spread * rng.uniform();
            profile.paths.push_back({rng.complex_normal(per_path), tau});
        }
    }
    return profile;
}

CfrSweep cfr_from_profile(const MultipathProfile& profile, const FrequencyGrid& grid)
{
    profile.validate();
    grid.validate();
    CfrSweep sweep{grid, std::vector<std::complex<double>>(grid.n_points)};
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const double f = grid.frequency(i);
        std::complex<double> h{0.0, 0.0};
        for (const auto& p : profile.paths) {
            // reduce the phase to one cycle before the trig call
            double cycles = f * p.delay_s;
            cycles -= std::floor(cycles);
            h += p.coefficient * std::polar(1.0, -two_pi * cycles);
        }
        sweep.values[i] = h;
    }
    return sweep;
}

Cir cir_from_cfr(const CfrSweep& sweep)
{
    sweep.validate();
    const std::size_t n = sweep.values.size();
    Cir cir;
    cir.resolution_s = 1.0 / (static_cast<double>(n) * sweep.grid.spacing());
    cir.taps = dft(sweep.values, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(n);
    cir.delays_s.resize(n);
    cir.power_db.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        cir.taps[i] *= scale;
        cir.delays_s[i] = static_cast<double>(i) * cir.resolution_s;
        cir.power_db[i] = to_db_amplitude(std::abs(cir.taps[i]));
    }
    return cir;
}

CfrSweep cfr_from_cir(const Cir& cir, const FrequencyGrid& grid)
{
    grid.validate();
    if (cir.taps.size() != grid.n_points)
        throw FormatError("cfr_from_cir: tap count does not match the frequency grid");
    return CfrSweep{grid, dft(cir.taps, FFTW_FORWARD)};
}

FadingSampleSet fading_samples_from_cfr(const CfrSweep& sweep, int location_id)
{
    sweep.validate();
    FadingSampleSet s{location_id, std::vector<double>(sweep.values.size())};
    std::transform(sweep.values.begin(), sweep.values.end(), s.rho.begin(),
                   [](const std::complex<double>& h) { return std::norm(h); });
    s.validate();
    return s;
}

double coherence_bandwidth(const Cir& cir, double threshold_db)
{
    double first = std::numeric_limits<double>::infinity();
    double last = -std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (std::size_t i = 0; i < cir.power_db.size(); ++i) {
        if (cir.power_db[i] > threshold_db) {
            first = std::min(first, cir.delays_s[i]);
            last = std::max(last, cir.delays_s[i]);
            ++count;
        }
    }
    if (count == 0)
        throw AnalysisError("coherence_bandwidth: no CIR taps above " +
                            std::to_string(threshold_db) + " dB");
    if (count == 1)
        return std::numeric_limits<double>::infinity();
    return 1.0 / (last - first);
}

PathlossFit fit_pathloss_exponent(const CfrSweep& sweep)
{
    sweep.validate();
    const std::size_t n = sweep.values.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = std::norm(sweep.values[i]);
        if (!(rho > 0.0))
            throw AnalysisError("fit_pathloss_exponent: zero gain at bin " + std::to_string(i));
        lx[i] = std::log(sweep.grid.frequency(i));
        ly[i] = std::log(rho);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    const double slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ly[i] - (my + slope * (lx[i] - mx));
        ss += e * e;
    }
    return {-slope, std::sqrt(ss / static_cast<double>(n))};
}

double free_space_loss(double distance_m, double frequency_hz)
{
    if (!(distance_m > 0.0) || !(frequency_hz > 0.0))
        throw DomainError("free_space_loss: distance and frequency must be positive");
    return 20.0 * std::log10(kSpeedOfLight / (4.0 * std::numbers::pi * distance_m * frequency_hz));
}

PeakInfo cir_peak(const Cir& cir)
{
    if (cir.taps.empty())
        throw AnalysisError("cir_peak: empty impulse response");
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < cir.taps.size(); ++i) {
        const double m = std::abs(cir.taps[i]);
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    return {best, cir.delays_s[best], cir.power_db[best]};
}

double frequency_sampling_ratio(const EnvironmentSpec& env, const FrequencyGrid& grid)
{
    if (env.scatterers == 0)
        return std::numeric_limits<double>::infinity();
    return grid.span() * env.delay_spread_min_s;
}

}  // namespace cdimap
