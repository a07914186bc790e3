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

#ifndef CDIMAP_SCENARIO_HPP
#define CDIMAP_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cdimap/random.hpp"

namespace cdimap {

/// A measurement position (UE) or the base station, coordinates in meters.
struct Location {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Location&) const = default;
};

double distance(const Location& a, const Location& b);

/// Transmit SNR gamma_tx = P_tx / (B N0), linear.
struct LinkBudget {
    double gamma_tx = 1.0;

    static LinkBudget from_power(double p_tx_dbm, double bandwidth_hz, double n0_w_per_hz);
    void validate() const;
};

/// Rectangular arrangement of equilateral triangles: odd rows are shifted by
/// half a side, rows are side*sqrt(3)/2 apart.
struct GridSpec {
    Location origin;
    int rows = 1;
    int cols = 1;
    double side = 5.0;

    void validate() const;
};

/// Hexagon of equilateral triangles around a center point. `rings` = 6 gives
/// 3*6*7 + 1 = 127 points.
struct HexGridSpec {
    Location center;
    int rings = 6;
    double side = 5.0;

    void validate() const;
};

std::vector<Location> generate_triangular_grid(const GridSpec& spec);
std::vector<Location> generate_hexagonal_grid(const HexGridSpec& spec);

struct SplitSpec {
    std::size_t train_count = 0;
    std::uint64_t seed = 0;
};

struct TrainTestSplit {
    std::vector<Location> train;
    std::vector<Location> test;
};

struct IndexSplit {
    std::vector<std::size_t> train;  // ascending
    std::vector<std::size_t> test;   // ascending
};

/// Draws `train_count` of `n` indices uniformly without replacement.
IndexSplit split_indices(std::size_t n, std::size_t train_count, RandomStream& rng);

TrainTestSplit split_train_test(std::span<const Location> locations, std::size_t train_count,
                                RandomStream& rng);
TrainTestSplit split_train_test(std::span<const Location> locations, const SplitSpec& split);

}  // namespace cdimap

#endif
