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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cdimap/channel.hpp"
#include "cdimap/error.hpp"
#include "cdimap/random.hpp"
#include "oracles.hpp"

using namespace cdimap;

namespace {

double max_rel_diff(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / den;
}

MultipathProfile random_profile(RandomStream& rng, std::size_t k)
{
    MultipathProfile p;
    for (std::size_t i = 0; i < k; ++i)
        p.paths.push_back({rng.complex_normal(1.0), rng.uniform(10e-9, 900e-9)});
    return p;
}

}  // namespace

TEST_CASE("synth_multipath")
{
    const Location bs{-1, 0, 0, 0};
    const Location loc{3, 43.4, 0, 0};
    SUBCASE("LOS only gives the flight time")
    {
        EnvironmentSpec env;
        env.scatterers = 0;
        RandomStream rng(1);
        const auto p = synth_multipath(env, {}, loc, bs, 6e9, rng);
        REQUIRE(p.paths.size() == 1);
        CHECK(std::abs(p.paths[0].delay_s - 144.77e-9) < 0.005e-9);
        CHECK(p.paths[0].delay_s == doctest::Approx(43.4 / kSpeedOfLight).epsilon(1e-14));
        // full large-scale gain on the LOS path: free-space loss at f_c
        CHECK(20 * std::log10(std::abs(p.paths[0].coefficient)) ==
              doctest::Approx(free_space_loss(43.4, 6e9)).epsilon(1e-9));
    }
    SUBCASE("deterministic given the stream")
    {
        EnvironmentSpec env;
        RandomStream a(9), b(9);
        const auto pa = synth_multipath(env, {2.0, 3.0}, loc, bs, 6e9, a);
        const auto pb = synth_multipath(env, {2.0, 3.0}, loc, bs, 6e9, b);
        REQUIRE(pa.paths.size() == pb.paths.size());
        for (std::size_t i = 0; i < pa.paths.size(); ++i) {
            CHECK(pa.paths[i].coefficient == pb.paths[i].coefficient);
            CHECK(pa.paths[i].delay_s == pb.paths[i].delay_s);
        }
    }
    SUBCASE("scattered delays follow the direct path within the spread")
    {
        EnvironmentSpec env;
        env.scatterers = 200;
        RandomStream rng(4);
        const auto p = synth_multipath(env, {}, loc, bs, 6e9, rng);
        CHECK(p.paths.size() == 201);
        const double tau0 = p.paths[0].delay_s;
        for (std::size_t i = 1; i < p.paths.size(); ++i) {
            CHECK(p.paths[i].delay_s >= tau0);
            CHECK(p.paths[i].delay_s <= tau0 + env.delay_spread_max_s);
        }
    }
    SUBCASE("no LOS path: exponential power across frequency")
    {
        EnvironmentSpec env;
        env.line_of_sight = false;
        env.scatterers = 300;
        env.delay_spread_min_s = 400e-9;
        env.delay_spread_max_s = 800e-9;
        RandomStream rng(12);
        const auto p = synth_multipath(env, {}, loc, bs, 6e9, rng);
        auto rho = fading_samples_from_cfr(cfr_from_profile(p, {})).rho;
        double mean = 0.0;
        for (double v : rho)
            mean += v;
        mean /= static_cast<double>(rho.size());
        for (auto& v : rho)
            v /= mean;
        CHECK(oracle::ks_exponential(rho) < 0.03);
    }
}

TEST_CASE("large-scale fields")
{
    EnvironmentSpec env;
    env.shadowing_std_db = 6.0;
    env.k_factor_std_db = 0.0;
    env.k_factor_mean_db = 3.0;
    env.correlation_length_m = 15.0;
    std::vector<Location> locs;
    for (int i = 0; i < 40; ++i)
        locs.push_back({i, 5.0 * i, 0, 0});
    // neighbouring correlation over many draws approaches exp(-5 / 15)
    double sxy = 0.0, sxx = 0.0;
    RandomStream rng(2);
    for (int t = 0; t < 300; ++t) {
        const auto f = draw_large_scale_fields(env, locs, rng);
        for (std::size_t i = 0; i + 1 < f.size(); ++i) {
            sxy += f[i].shadowing_db * f[i + 1].shadowing_db;
            sxx += f[i].shadowing_db * f[i].shadowing_db;
            CHECK(f[i].k_factor_db == 3.0);
        }
    }
    CHECK(sxy / sxx == doctest::Approx(std::exp(-5.0 / 15.0)).epsilon(0.05));
    CHECK(sxx / (300.0 * 39.0) == doctest::Approx(36.0).epsilon(0.1));
}

TEST_CASE("cfr_from_profile")
{
    const FrequencyGrid grid;
    SUBCASE("single short path has unit magnitude")
    {
        const auto s = cfr_from_profile({{{{1.0, 0.0}, 1e-12}}}, grid);
        REQUIRE(s.values.size() == 8001);
        for (const auto& v : s.values)
            CHECK(std::abs(std::abs(v) - 1.0) < 1e-9);
    }
    SUBCASE("two-path nulls every 1/dtau")
    {
        const double t1 = 10e-9, dt = 10e-9;  // nulls every 100 MHz at f dt = k + 1/2
        const auto s = cfr_from_profile({{{{1.0, 0.0}, t1}, {{1.0, 0.0}, t1 + dt}}}, grid);
        for (double f = 2.05e9; f < 10e9; f += 1.0 / dt) {
            const auto i = static_cast<std::size_t>(std::lround((f - grid.f_min_hz) / grid.spacing()));
            CHECK(std::abs(s.values[i]) < 1e-6);
            CHECK(std::abs(s.values[i + 25]) > 0.5);
        }
    }
    SUBCASE("exact sum and bounds")
    {
        RandomStream rng(3);
        const auto p = random_profile(rng, 7);
        const auto s = cfr_from_profile(p, grid);
        double bound = 0.0;
        for (const auto& c : p.paths)
            bound += std::abs(c.coefficient);
        for (std::size_t i = 0; i < s.values.size(); i += 97) {
            std::complex<double> want = 0.0;
            for (const auto& c : p.paths)
                want += c.coefficient * std::exp(std::complex<double>(
                                            0.0, -2.0 * std::numbers::pi * grid.frequency(i) * c.delay_s));
            CHECK(std::abs(s.values[i] - want) < 1e-9 * bound);
        }
        for (const auto& v : s.values)
            CHECK(std::abs(v) <= bound * (1 + 1e-12));
    }
    SUBCASE("linearity")
    {
        RandomStream rng(8);
        const auto a = random_profile(rng, 4), b = random_profile(rng, 5);
        MultipathProfile ab = a;
        ab.paths.insert(ab.paths.end(), b.paths.begin(), b.paths.end());
        const auto sa = cfr_from_profile(a, grid), sb = cfr_from_profile(b, grid);
        const auto sab = cfr_from_profile(ab, grid);
        std::vector<std::complex<double>> sum(sa.values.size());
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum[i] = sa.values[i] + sb.values[i];
        CHECK(max_rel_diff(sab.values, sum) < 1e-12);
    }
    SUBCASE("invalid profiles")
    {
        CHECK_THROWS(cfr_from_profile({}, grid));
        CHECK_THROWS(cfr_from_profile({{{{1.0, 0.0}, -1e-9}}}, grid));
        CHECK_THROWS(cfr_from_profile({{{{NAN, 0.0}, 1e-9}}}, grid));
    }
}

TEST_CASE("cir_from_cfr")
{
    const FrequencyGrid grid;
    SUBCASE("single path peak")
    {
        const auto cir = cir_from_cfr(cfr_from_profile({{{{1.0, 0.0}, 150e-9}}}, grid));
        CHECK(cir.taps.size() == 8001);
        CHECK(cir.delays_s.size() == 8001);
        CHECK(cir.resolution_s == doctest::Approx(0.125e-9).epsilon(1e-3));
        CHECK(std::abs(cir_peak(cir).delay_s - 150e-9) <= 0.125e-9);
    }
    SUBCASE("indoor geometry at 43.4 m")
    {
        const auto cir = cir_from_cfr(cfr_from_profile({{{{1.0, 0.0}, 144.9e-9}}}, grid));
        const auto peak = cir_peak(cir);
        CHECK(std::abs(peak.delay_s - 144.9e-9) <= 0.125e-9);
        CHECK(std::abs(peak.delay_s * kSpeedOfLight - 43.4) <= 0.04);
    }
    SUBCASE("flat sweep is an impulse at zero delay")
    {
        CfrSweep flat{grid, std::vector<std::complex<double>>(grid.n_points, 1.0)};
        const auto cir = cir_from_cfr(flat);
        CHECK(cir_peak(cir).index == 0);
        CHECK(std::abs(cir.taps[0] - 1.0) < 1e-12);
        CHECK(std::abs(cir.taps[1]) < 1e-12);
    }
    SUBCASE("round trip")
    {
        RandomStream rng(6);
        const auto s = cfr_from_profile(random_profile(rng, 30), grid);
        const auto back = cfr_from_cir(cir_from_cfr(s), grid);
        CHECK(max_rel_diff(back.values, s.values) < 1e-9);
    }
    SUBCASE("length mismatch")
    {
        CfrSweep bad{grid, std::vector<std::complex<double>>(10, 1.0)};
        CHECK_THROWS(cir_from_cfr(bad));
    }
}

TEST_CASE("fading samples")
{
    FrequencyGrid g{1e9, 2e9, 3};
    CfrSweep s{g, {{2.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}}};
    const auto f = fading_samples_from_cfr(s, 7);
    CHECK(f.location_id == 7);
    REQUIRE(f.rho.size() == 3);
    CHECK(f.rho[0] == 4.0);
    CHECK(f.rho[1] == 1.0);
    CHECK(f.rho[2] == 0.5);
    CHECK(fading_samples_from_cfr(cfr_from_profile({{{{1.0, 0.0}, 1e-9}}}, {})).rho.size() == 8001);
    CfrSweep zero{g, std::vector<std::complex<double>>(3, 0.0)};
    CHECK_THROWS(fading_samples_from_cfr(zero));
}

TEST_CASE("coherence bandwidth")
{
    auto cir_with = [](std::vector<double> delays, std::vector<double> db) {
        Cir c;
        c.delays_s = std::move(delays);
        c.power_db = std::move(db);
        c.taps.assign(c.delays_s.size(), 0.0);
        return c;
    };
    CHECK(coherence_bandwidth(cir_with({0, 100e-9, 625e-9, 700e-9}, {-120, -60, -100, -130}), -110) ==
          doctest::Approx(1.0 / 525e-9));
    CHECK(coherence_bandwidth(cir_with({0, 625e-9}, {-100, -100}), -110) / 1e6 ==
          doctest::Approx(1.6).epsilon(1e-9));
    CHECK(coherence_bandwidth(cir_with({10e-9, 40.49e-9}, {-50, -90}), -110) / 1e6 ==
          doctest::Approx(32.8).epsilon(1e-3));
    CHECK(std::isinf(coherence_bandwidth(cir_with({0, 1e-9}, {-50, -200}), -110)));
    CHECK_THROWS_AS(coherence_bandwidth(cir_with({0, 1e-9}, {-150, -200}), -110), AnalysisError);
}

TEST_CASE("pathloss exponent")
{
    const FrequencyGrid grid;
    CfrSweep s{grid, {}};
    for (std::size_t i = 0; i < grid.n_points; ++i)
        s.values.emplace_back(3e-4 * 1e9 / grid.frequency(i), 0.0);
    const auto fit = fit_pathloss_exponent(s);
    CHECK(std::abs(fit.eta - 2.0) < 1e-6);
    CHECK(fit.residual < 1e-9);
    CfrSweep flat{grid, std::vector<std::complex<double>>(grid.n_points, 0.1)};
    CHECK(std::abs(fit_pathloss_exponent(flat).eta) < 1e-12);
    flat.values[5] = 0.0;
    CHECK_THROWS_AS(fit_pathloss_exponent(flat), AnalysisError);
}

TEST_CASE("free-space loss")
{
    CHECK(std::abs(free_space_loss(43.4, 6e9) + 80.8) <= 0.05);
    CHECK(free_space_loss(434.0, 6e9) - free_space_loss(43.4, 6e9) == doctest::Approx(-20.0).epsilon(1e-12));
    CHECK(std::abs(free_space_loss(43.4, 12e9) - free_space_loss(43.4, 6e9) + 6.02) < 1e-2);
    CHECK_THROWS_AS(free_space_loss(0.0, 6e9), DomainError);
    CHECK_THROWS_AS(free_space_loss(10.0, -1.0), DomainError);
}

TEST_CASE("frequency sampling gate")
{
    EnvironmentSpec env;
    env.delay_spread_min_s = 50e-9;
    CHECK(frequency_sampling_ratio(env, {}) == doctest::Approx(400.0));
    env.delay_spread_min_s = 5e-9;
    CHECK(frequency_sampling_ratio(env, {}) < kMinFrequencySamplingRatio);
    env.scatterers = 0;
    CHECK(std::isinf(frequency_sampling_ratio(env, {})));
}
