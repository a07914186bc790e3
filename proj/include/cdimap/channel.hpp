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

#ifndef CDIMAP_CHANNEL_HPP
#define CDIMAP_CHANNEL_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "cdimap/random.hpp"
#include "cdimap/scenario.hpp"

namespace cdimap {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct PathComponent {
    std::complex<double> coefficient;
    double delay_s = 0.0;
};

/// Tapped-delay line h(f) = sum_k alpha_k exp(-2 pi j f tau_k). Coefficients
/// are constant in frequency. The first path is the direct path whenever the
/// generator produced one.
struct MultipathProfile {
    std::vector<PathComponent> paths;

    void validate() const;
};

/// Uniform frequency sweep f_i = f_min + i * (f_max - f_min) / (n_points - 1).
struct FrequencyGrid {
    double f_min_hz = 2e9;
    double f_max_hz = 10e9;
    std::size_t n_points = 8001;

    double spacing() const { return (f_max_hz - f_min_hz) / static_cast<double>(n_points - 1); }
    double span() const { return f_max_hz - f_min_hz; }
    double center() const { return 0.5 * (f_min_hz + f_max_hz); }
    double frequency(std::size_t i) const;
    void validate() const;
};

/// Complex channel frequency response, one synthetic or measured sounding.
struct CfrSweep {
    FrequencyGrid grid;
    std::vector<std::complex<double>> values;

    void validate() const;
};

/// Channel impulse response from the inverse DFT of a sweep. Tap n sits at
/// delay n * resolution_s with resolution_s = 1 / (n_points * spacing).
struct Cir {
    double resolution_s = 0.0;
    std::vector<double> delays_s;
    std::vector<double> power_db;  // 20 log10 |tap|
    std::vector<std::complex<double>> taps;
};

/// Narrowband channel gains rho = |h|^2 at one location (linear power).
struct FadingSampleSet {
    int location_id = 0;
    std::vector<double> rho;

    void validate() const;
};

/// Parameters of the synthetic ground-truth environment. Large-scale gain
/// (shadowing, dB) and Rician K-factor (dB) are Gaussian random fields over
/// space with exponential correlation exp(-d / correlation_length_m).
struct EnvironmentSpec {
    std::size_t scatterers = 50;
    bool line_of_sight = true;       // false: LOS power fraction 0
    double k_factor_mean_db = 0.0;
    double k_factor_std_db = 4.0;
    double shadowing_std_db = 6.0;
    double correlation_length_m = 15.0;
    double delay_spread_min_s = 50e-9;
    double delay_spread_max_s = 600e-9;
    bool free_space_pathloss = true;  // scale total gain by the free-space loss at f_c
    double gain_offset_db = 0.0;

    void validate() const;
};

/// Realization of the large-scale fields at one location.
struct LargeScaleSample {
    double shadowing_db = 0.0;
    double k_factor_db = 0.0;
};

/// Joint draw of the correlated fields over all locations (Cholesky of the
/// exponential correlation matrix).
std::vector<LargeScaleSample> draw_large_scale_fields(const EnvironmentSpec& env,
                                                      std::span<const Location> locations,
                                                      RandomStream& rng);

/// Ground-truth multipath at `loc`. Path 0 is the LOS path with delay
/// distance(loc, bs) / c and deterministic magnitude; scattered paths get
/// complex Gaussian coefficients and delays uniform in
/// [tau_LOS, tau_LOS + spread], spread ~ U(delay_spread_min, delay_spread_max).
MultipathProfile synth_multipath(const EnvironmentSpec& env, const LargeScaleSample& field,
                                 const Location& loc, const Location& bs, double center_frequency_hz,
                                 RandomStream& rng);

CfrSweep cfr_from_profile(const MultipathProfile& profile, const FrequencyGrid& grid);

Cir cir_from_cfr(const CfrSweep& sweep);
// Forward DFT back onto the sweep grid; inverse of cir_from_cfr.
CfrSweep cfr_from_cir(const Cir& cir, const FrequencyGrid& grid);

FadingSampleSet fading_samples_from_cfr(const CfrSweep& sweep, int location_id = 0);

/// 1 / (max excess delay of taps above threshold_db). +infinity when only one
/// tap clears the threshold.
double coherence_bandwidth(const Cir& cir, double threshold_db = -110.0);

struct PathlossFit {
    double eta = 0.0;       // rho ~ f^-eta
    double residual = 0.0;  // RMS of ln rho about the fitted line
};

PathlossFit fit_pathloss_exponent(const CfrSweep& sweep);

/// 20 log10(c / (4 pi d f_c)), dB (negative).
double free_space_loss(double distance_m, double frequency_hz);

struct PeakInfo {
    std::size_t index = 0;
    double delay_s = 0.0;
    double power_db = 0.0;
};

// argmax |tap|, no interpolation
PeakInfo cir_peak(const Cir& cir);

/// Ratio span / B_c for the smallest delay spread the environment produces.
/// The frequency-domain sampling argument needs this to be large.
double frequency_sampling_ratio(const EnvironmentSpec& env, const FrequencyGrid& grid);
inline constexpr double kMinFrequencySamplingRatio = 100.0;

}  // namespace cdimap

#endif
