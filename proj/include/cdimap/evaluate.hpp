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

#ifndef CDIMAP_EVALUATE_HPP
#define CDIMAP_EVALUATE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cdimap/channel.hpp"
#include "cdimap/error.hpp"
#include "cdimap/quantile_map.hpp"
#include "cdimap/rate_select.hpp"
#include "cdimap/scenario.hpp"

namespace cdimap {

/// Raised when more than 1% of the repetitions of a campaign fail.
class CampaignError : public Error {
 public:
    using Error::Error;
};

struct EvalConfig {
    double epsilon = 0.01;
    double delta = 0.05;
    std::vector<std::size_t> train_counts{10, 25, 50, 100};
    std::size_t repetitions = 2000;
    std::size_t baseline_samples = 10;  // M
    double gamma_tx = 1.0;
    std::uint64_t seed = 1;
    bool include_genie = true;
    bool keep_records = true;
    unsigned threads = 0;  // 0: one per hardware thread
    FitOptions fit;        // fit.seed is re-derived per repetition
    std::vector<double> outage_grid;      // empty: default log grid plus epsilon
    std::vector<double> throughput_grid;  // empty: 0 .. 3 in steps of 0.02

    void validate(std::size_t n_locations, std::size_t n_samples) const;
};

/// Synthetic or measured ground truth: one fading sample set per location.
struct World {
    std::vector<Location> locations;
    std::vector<FadingSampleSet> samples;

    void validate() const;
};

struct EvalRecord {
    std::uint32_t repetition = 0;
    int location_id = 0;
    RateMethod method = RateMethod::cdi_map;
    double rate = 0.0;
    double p_out = 0.0;   // empirical outage on the held-out samples
    double r_eps = 0.0;   // genie rate at the location
    double normalized_throughput = 0.0;  // NaN when excluded (r_eps = 0)
};

struct CurvePoint {
    double x = 0.0;
    double cdf = 0.0;
    std::size_t count_le = 0;
};

struct LocationMeta {
    int location_id = 0;
    double probability = 0.0;
    std::size_t exceedances = 0;
    std::size_t count = 0;
};

struct MethodSummary {
    RateMethod method = RateMethod::cdi_map;
    std::size_t n_records = 0;
    std::size_t exceedances = 0;
    double meta_probability = 0.0;
    double mean_throughput = 0.0;
    std::size_t throughput_excluded = 0;
    std::vector<CurvePoint> outage_curve;
    std::vector<CurvePoint> throughput_curve;
    std::vector<LocationMeta> location_meta;
};

struct CampaignResult {
    std::size_t train_count = 0;
    std::size_t repetitions = 0;
    std::size_t failed_repetitions = 0;
    std::vector<std::string> failures;  // "repetition i: message"
    std::vector<EvalRecord> records;     // empty unless keep_records
    std::vector<MethodSummary> methods;
};

struct EvalReport {
    EvalConfig config;
    std::vector<Location> locations;
    std::size_t samples_per_location = 0;
    std::vector<CampaignResult> campaigns;  // one per train count

    const CampaignResult& campaign(std::size_t train_count) const;
};

/// Repeated random train/test splits. Per repetition: fit the map on the D
/// training quantiles, then for each test location record the CDI-map rate,
/// the Rayleigh baseline rate from M fresh samples, and (optionally) the
/// genie rate, each with its empirical outage on the location's samples.
/// Baseline outage excludes the M samples it was computed from. Throughput is
/// normalized by the genie's realized goodput R_eps (1 - p_out(R_eps)), which
/// makes genie records exactly 1.
/// Deterministic given (world, cfg); independent of thread count.
EvalReport run_campaign(const World& world, const EvalConfig& cfg);

/// Fraction of records with p_out > epsilon (strict).
double meta_probability(std::span<const EvalRecord> records, double epsilon);

/// R (1 - p_out) / (R_eps (1 - epsilon)). Throws DomainError for R_eps <= 0.
double normalized_throughput(double rate, double p_out, double r_eps, double epsilon);

std::vector<LocationMeta> conditional_meta_by_location(std::span<const EvalRecord> records,
                                                       double epsilon);

/// Empirical CDF of p_out at the grid points.
std::vector<CurvePoint> outage_cdf_curve(std::span<const EvalRecord> records,
                                         std::span<const double> grid);
/// Empirical CDF of the normalized throughput (excluded records skipped).
std::vector<CurvePoint> throughput_cdf_curve(std::span<const EvalRecord> records,
                                             std::span<const double> grid);

MethodSummary summarize(std::span<const EvalRecord> records, RateMethod method, double epsilon,
                        std::span<const double> outage_grid, std::span<const double> throughput_grid);

std::vector<double> default_outage_grid(double epsilon);
std::vector<double> default_throughput_grid();

}  // namespace cdimap

#endif
