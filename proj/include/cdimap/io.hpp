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

#ifndef CDIMAP_IO_HPP
#define CDIMAP_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdimap/channel.hpp"
#include "cdimap/evaluate.hpp"
#include "cdimap/quantile_map.hpp"
#include "cdimap/scenario.hpp"

namespace cdimap {

inline constexpr std::string_view kToolVersion = "1.0.0";

// ---- scenario config -------------------------------------------------------

enum class GridShape { triangular, hexagonal };
enum class MeasurementEncoding { csv, binary };

std::string_view to_string(MeasurementEncoding e);

/// Scenario file (JSON, "format": "cdimap-scenario", "version": 1).
struct ScenarioConfig {
    int version = 1;
    GridShape shape = GridShape::hexagonal;
    GridSpec triangular;
    HexGridSpec hexagonal;
    Location base_station;
    LinkBudget link;
    std::optional<std::uint64_t> seed;
    FrequencyGrid frequency;
    EnvironmentSpec environment;
    // permit span / B_c below kMinFrequencySamplingRatio (warns instead of failing)
    bool allow_coarse_frequency_sampling = false;
    MeasurementEncoding encoding = MeasurementEncoding::csv;

    std::vector<Location> locations() const;
};

/// Throws ConfigError naming the offending field (or line/column for syntax errors).
ScenarioConfig parse_scenario_config(std::string_view text, std::string_view source = "scenario");
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Eval config file (JSON, "format": "cdimap-eval", "version": 1).
/// gamma_tx and seed are optional there; callers fill them in.
struct EvalConfigFile {
    EvalConfig config;
    bool has_gamma_tx = false;
    bool has_seed = false;
};

EvalConfigFile parse_eval_config(std::string_view text, std::string_view source = "eval config");
EvalConfigFile load_eval_config(const std::filesystem::path& path);

// ---- measurements ----------------------------------------------------------

struct Measurement {
    Location location;
    CfrSweep sweep;
};

/// CSV layout:
///   # cdimap measurement v1
///   location_id,x_m,y_m,z_m,f_min_hz,f_max_hz,n_points
///   <header values>
///   re,im
///   n_points rows of <re>,<im>
/// Binary layout, little-endian: "CDIMEAS1", int64 id, f64 x y z f_min f_max,
/// uint64 n_points, then n_points pairs of f64 (re, im).
std::string encode_measurement_csv(const Measurement& m);
std::string encode_measurement_binary(const Measurement& m);
Measurement decode_measurement(std::string_view bytes, std::string_view source = "measurement");
Measurement read_measurement(const std::filesystem::path& path);

struct ManifestEntry {
    Location location;
    std::string file;  // relative to the manifest directory
};

/// Text manifest listing all locations of a campaign.
struct MeasurementManifest {
    int version = 1;
    MeasurementEncoding encoding = MeasurementEncoding::csv;
    std::optional<Location> base_station;
    std::optional<double> gamma_tx;
    std::vector<ManifestEntry> entries;
};

inline constexpr std::string_view kManifestName = "manifest.txt";

std::string encode_manifest(const MeasurementManifest& m);
MeasurementManifest decode_manifest(std::string_view text, std::string_view source = "manifest");

struct MeasurementSet {
    MeasurementManifest manifest;
    std::vector<Measurement> measurements;
    std::vector<std::string> errors;  // corrupt or missing records
};

/// Reads a manifest directory. Unreadable records are listed in `errors`
/// rather than thrown, so callers can report all of them.
MeasurementSet read_measurement_set(const std::filesystem::path& dir);

World world_from_measurements(const std::vector<Measurement>& measurements);

/// Ground-truth synthesis of one record per grid location.
struct SynthesisResult {
    std::vector<Measurement> measurements;
    double frequency_sampling_ratio = 0.0;
    std::vector<std::string> warnings;
};

SynthesisResult synthesize_campaign(const ScenarioConfig& cfg, std::uint64_t seed);

// ---- fitted map ------------------------------------------------------------

std::string encode_map(const QuantileMap& map);
QuantileMap decode_map(std::string_view text, std::string_view source = "map");

// ---- reports ---------------------------------------------------------------

/// Aggregates only; records go to the CSV. No timestamps, so equal inputs
/// give byte-identical output.
std::string encode_report(const EvalReport& report);
EvalReport decode_report(std::string_view text, std::string_view source = "report");

// columns: train_count,repetition,location_id,method,rate_bps_hz,p_out,r_eps_bps_hz,normalized_throughput
std::string encode_records_csv(const EvalReport& report);
void write_records_csv(const std::filesystem::path& path, const EvalReport& report);
/// Fills `records` of the matching campaigns in `report`.
void read_records_csv(const std::filesystem::path& path, EvalReport& report);

// ---- run manifest ----------------------------------------------------------

struct FileDigest {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    std::string tool_version{kToolVersion};
    std::string command;
    std::string config_sha256;
    std::uint64_t seed = 0;
    bool seed_from_entropy = false;
    std::string started_utc;
    std::string finished_utc;
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
    int exit_code = 0;
};

std::string encode_run_manifest(const RunManifest& m);

// ---- utilities -------------------------------------------------------------

std::string read_file(const std::filesystem::path& path);
/// Write to a temporary sibling, then rename over the target.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);
std::string utc_timestamp();
/// 17 significant digits, enough to recover the double exactly.
std::string format_double(double v);
double parse_double(std::string_view s, std::string_view what);

}  // namespace cdimap

#endif
