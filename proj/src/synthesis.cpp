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

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "cdimap/error.hpp"
#include "cdimap/io.hpp"

namespace cdimap {

namespace {
constexpr std::uint64_t kFieldStream = 0xf1e1dULL;
constexpr std::uint64_t kLocationStreamBase = 0x10c0000000ULL;
}  // namespace

SynthesisResult synthesize_campaign(const ScenarioConfig& cfg, std::uint64_t seed)
{
    cfg.environment.validate();
    cfg.frequency.validate();
    SynthesisResult result;
    result.frequency_sampling_ratio = frequency_sampling_ratio(cfg.environment, cfg.frequency);
    if (result.frequency_sampling_ratio < kMinFrequencySamplingRatio) {
        const std::string msg = "frequency span / coherence bandwidth = " +
                                std::to_string(result.frequency_sampling_ratio) + " < " +
                                std::to_string(kMinFrequencySamplingRatio) +
                                "; frequency samples will not behave like independent fading draws";
        if (!cfg.allow_coarse_frequency_sampling)
            throw ConfigError(msg + " (set environment.allow_coarse_frequency_sampling to override)");
        result.warnings.push_back(msg);
    }

    const std::vector<Location> locations = cfg.locations();
    const RandomStream root(seed);
    RandomStream field_rng = root.split(kFieldStream);
    const auto fields = draw_large_scale_fields(cfg.environment, locations, field_rng);

    result.measurements.resize(locations.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < locations.size(); i = next++) {
            try {
                RandomStream rng = root.split(kLocationStreamBase + static_cast<std::uint64_t>(locations[i].id));
                const auto profile = synth_multipath(cfg.environment, fields[i], locations[i],
                                                     cfg.base_station, cfg.frequency.center(), rng);
                result.measurements[i] = {locations[i], cfr_from_profile(profile, cfg.frequency)};
            } catch (...) {
                std::lock_guard<std::mutex> lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
                next = locations.size();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                               static_cast<unsigned>(locations.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < n_threads; ++t)
            pool.emplace_back(worker);
        worker();
    }
    if (fatal)
        std::rethrow_exception(fatal);
    return result;
}

}  // namespace cdimap
