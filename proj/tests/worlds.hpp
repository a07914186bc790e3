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

// Shared synthetic worlds for tests.

#ifndef CDIMAP_TESTS_WORLDS_HPP
#define CDIMAP_TESTS_WORLDS_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "cdimap/io.hpp"
#include "cdimap/random.hpp"

namespace testworld {

inline cdimap::HexGridSpec hex127()
{
    return {{0, 0.0, 0.0, 1.5}, 6, 5.0};
}

// Rician multipath world over the 127-point grid with correlated shadowing and K factor.
inline cdimap::ScenarioConfig rician_scenario()
{
    cdimap::ScenarioConfig cfg;
    cfg.shape = cdimap::GridShape::hexagonal;
    cfg.hexagonal = hex127();
    cfg.base_station = {-1, -40.0, 0.0, 3.0};
    cfg.link = cdimap::LinkBudget::from_power(0.0, 1e6, 3.98e-21);
    cfg.environment.scatterers = 100;
    cfg.environment.line_of_sight = true;
    cfg.environment.k_factor_mean_db = 0.0;
    cfg.environment.k_factor_std_db = 4.0;
    cfg.environment.shadowing_std_db = 6.0;
    cfg.environment.correlation_length_m = 15.0;
    return cfg;
}

inline cdimap::World synth_world(const cdimap::ScenarioConfig& cfg, std::uint64_t seed)
{
    return cdimap::world_from_measurements(cdimap::synthesize_campaign(cfg, seed).measurements);
}

// Exact zero-mean GP draw at the given locations (exponential kernel plus nugget).
inline std::vector<double> gp_draw(const std::vector<cdimap::Location>& locs, double mean, double s2,
                                   double ell, double noise, cdimap::RandomStream& rng)
{
    const auto n = static_cast<Eigen::Index>(locs.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            k(i, j) = s2 * std::exp(-cdimap::distance(locs[i], locs[j]) / ell) + (i == j ? noise : 0.0);
    const Eigen::LLT<Eigen::MatrixXd> llt(k);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i)
        z(i) = rng.normal();
    const Eigen::VectorXd f = llt.matrixL() * z;
    std::vector<double> out(locs.size());
    for (Eigen::Index i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = mean + f(i);
    return out;
}

// Rayleigh fading at every location with a log-mean gain drawn from a GP.
inline cdimap::World gp_rayleigh_world(const std::vector<cdimap::Location>& locs, std::size_t n,
                                       double mean_log, double s2, double ell, double nugget,
                                       std::uint64_t seed)
{
    cdimap::RandomStream rng(seed);
    const auto f = gp_draw(locs, mean_log, s2, ell, nugget, rng);
    cdimap::World w;
    w.locations = locs;
    for (std::size_t i = 0; i < locs.size(); ++i) {
        cdimap::FadingSampleSet s{locs[i].id, std::vector<double>(n)};
        for (auto& r : s.rho)
            r = rng.exponential(std::exp(f[i]));
        w.samples.push_back(std::move(s));
    }
    return w;
}

}  // namespace testworld

#endif
