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

#include "cdimap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cdimap/error.hpp"

namespace cdimap {

namespace {

bool finite(const Location& l)
{
    return std::isfinite(l.x) && std::isfinite(l.y) && std::isfinite(l.z);
}

}  // namespace

double distance(const Location& a, const Location& b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

LinkBudget LinkBudget::from_power(double p_tx_dbm, double bandwidth_hz, double n0_w_per_hz)
{
    if (!(bandwidth_hz > 0.0) || !(n0_w_per_hz > 0.0))
        throw ConfigError("link budget: bandwidth and N0 must be positive");
    const double p_tx_w = 1e-3 * std::pow(10.0, p_tx_dbm / 10.0);
    LinkBudget lb{p_tx_w / (bandwidth_hz * n0_w_per_hz)};
    lb.validate();
    return lb;
}

void LinkBudget::validate() const
{
    if (!(gamma_tx > 0.0) || !std::isfinite(gamma_tx))
        throw ConfigError("link budget: gamma_tx must be positive and finite");
}

void GridSpec::validate() const
{
    if (!(side > 0.0) || !std::isfinite(side))
        throw ConfigError("grid: side must be positive");
    if (rows < 1 || cols < 1)
        throw ConfigError("grid: rows and cols must be >= 1");
    if (!finite(origin))
        throw ConfigError("grid: origin must be finite");
}

void HexGridSpec::validate() const
{
    if (!(side > 0.0) || !std::isfinite(side))
        throw ConfigError("grid: side must be positive");
    if (rings < 0)
        throw ConfigError("grid: rings must be >= 0");
    if (!finite(center))
        throw ConfigError("grid: center must be finite");
}

std::vector<Location> generate_triangular_grid(const GridSpec& spec)
{
    spec.validate();
    const double row_step = spec.side * std::sqrt(3.0) / 2.0;
    std::vector<Location> out;
    out.reserve(static_cast<std::size_t>(spec.rows) * static_cast<std::size_t>(spec.cols));
    int id = 0;
    for (int r = 0; r < spec.rows; ++r) {
        const double shift = (r % 2 == 1) ? spec.side / 2.0 : 0.0;
        for (int c = 0; c < spec.cols; ++c) {
            out.push_back({id++, spec.origin.x + shift + spec.side * c,
                           spec.origin.y + row_step * r, spec.origin.z});
        }
    }
    return out;
}

std::vector<Location> generate_hexagonal_grid(const HexGridSpec& spec)
{
    spec.validate();
    const int n = spec.rings;
    const double row_step = spec.side * std::sqrt(3.0) / 2.0;
    std::vector<Location> out;
    out.reserve(static_cast<std::size_t>(3 * n * (n + 1) + 1));
    int id = 0;
    // axial coordinates (q, r) with |q|, |r|, |q + r| <= n, emitted row by row
    for (int r = -n; r <= n; ++r) {
        const int q_lo = std::max(-n, -n - r);
        const int q_hi = std::min(n, n - r);
        for (int q = q_lo; q <= q_hi; ++q) {
            out.push_back({id++, spec.center.x + spec.side * (q + 0.5 * r),
                           spec.center.y + row_step * r, spec.center.z});
        }
    }
    return out;
}

IndexSplit split_indices(std::size_t n, std::size_t train_count, RandomStream& rng)
{
    if (train_count < 1 || train_count >= n)
        throw ConfigError("split: need 1 <= D < " + std::to_string(n) + ", got D = " +
                          std::to_string(train_count));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // partial Fisher-Yates: the first train_count slots are a uniform draw
    for (std::size_t i = 0; i < train_count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(perm[i], perm[j]);
    }
    IndexSplit s;
    s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_count));
    std::sort(s.train.begin(), s.train.end());
    s.test.reserve(n - train_count);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (k < s.train.size() && s.train[k] == i)
            ++k;
        else
            s.test.push_back(i);
    }
    return s;
}

TrainTestSplit split_train_test(std::span<const Location> locations, std::size_t train_count,
                                RandomStream& rng)
{
    const IndexSplit idx = split_indices(locations.size(), train_count, rng);
    TrainTestSplit s;
    for (std::size_t i : idx.train)
        s.train.push_back(locations[i]);
    for (std::size_t i : idx.test)
        s.test.push_back(locations[i]);
    return s;
}

TrainTestSplit split_train_test(std::span<const Location> locations, const SplitSpec& split)
{
    RandomStream rng(split.seed);
    return split_train_test(locations, split.train_count, rng);
}

}  // namespace cdimap
