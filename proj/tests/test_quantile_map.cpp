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

#include "cdimap/error.hpp"
#include "cdimap/quantile_map.hpp"
#include "cdimap/random.hpp"
#include "oracles.hpp"
#include "worlds.hpp"

using namespace cdimap;

namespace {

struct Case {
    QuantileDataset data;
    oracle::GpCase g;
};

Case random_case(RandomStream& rng, std::size_t n)
{
    Case c;
    c.g.mean = rng.uniform(-25, -5);
    c.g.s2 = std::exp(rng.uniform(-2, 2));
    c.g.ell = std::exp(rng.uniform(std::log(2.0), std::log(80.0)));
    c.g.noise = c.g.s2 * std::exp(rng.uniform(-6, 0));
    for (std::size_t i = 0; i < n; ++i) {
        const oracle::Point p{rng.uniform(0, 40), rng.uniform(0, 40), rng.uniform(0, 2)};
        const double y = c.g.mean + rng.normal();
        c.g.pts.push_back(p);
        c.g.y.push_back(y);
        c.data.entries.push_back({{static_cast<int>(i), p.x, p.y, p.z}, y, 0.0});
    }
    return c;
}

GpHyperparameters hp_of(const oracle::GpCase& g)
{
    return {g.mean, g.s2, g.ell, g.noise};
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

}  // namespace

TEST_CASE("kernel")
{
    const GpHyperparameters hp{0.0, 2.5, 7.0, 0.1};
    const Location a{0, 1, 2, 3};
    CHECK(kernel_eval(hp, a, a) == 2.5);
    CHECK(kernel_eval(hp, a, {1, 8, 2, 3}) == doctest::Approx(2.5 / std::numbers::e).epsilon(1e-14));
    double prev = 2.5;
    for (double d = 1; d < 500; d *= 1.7) {
        const double k = kernel_eval(hp, a, {1, 1 + d, 2, 3});
        CHECK(k < prev);
        prev = k;
    }
    CHECK(prev < 1e-20);
}

TEST_CASE("log marginal likelihood")
{
    SUBCASE("single point closed form")
    {
        QuantileDataset d;
        d.entries.push_back({{0, 0, 0, 0}, -3.0, 0.0});
        const GpHyperparameters hp{-3.0, 1.5, 10.0, 0.25};
        CHECK(log_marginal_likelihood(d, hp) ==
              doctest::Approx(-0.5 * std::log(2 * std::numbers::pi * 1.75)).epsilon(1e-14));
    }
    SUBCASE("dense oracle on 5-point sets")
    {
        RandomStream rng(1);
        for (int t = 0; t < 200; ++t) {
            const auto c = random_case(rng, 5);
            CHECK(rel(log_marginal_likelihood(c.data, hp_of(c.g)), oracle::log_likelihood(c.g)) < 1e-8);
        }
    }
    SUBCASE("duplicate locations are rejected")
    {
        RandomStream rng(2);
        auto c = random_case(rng, 3);
        auto dup = c.data.entries[1];
        dup.location.id = 99;
        c.data.entries.push_back(dup);
        CHECK_THROWS_AS(log_marginal_likelihood(c.data, hp_of(c.g)), ConfigError);
    }
    SUBCASE("not positive definite")
    {
        // 40 points within 4e-12 m: the exponential kernel matrix is singular in floating point
        QuantileDataset d;
        for (int i = 0; i < 40; ++i)
            d.entries.push_back({{i, 10.0 + i * 1e-13, 0, 0}, -1.0 - 0.01 * i, 0.0});
        CHECK_THROWS_AS(log_marginal_likelihood(d, {0.0, 1.0, 1000.0, 0.0}), NumericalError);
    }
}

TEST_CASE("predict")
{
    SUBCASE("dense oracle on 4-point sets")
    {
        RandomStream rng(4);
        for (int t = 0; t < 200; ++t) {
            const auto c = random_case(rng, 4);
            const oracle::Point x{rng.uniform(0, 40), rng.uniform(0, 40), rng.uniform(0, 2)};
            double mu = 0, var = 0;
            oracle::condition(c.g, x, mu, var);
            const auto p = predict(c.data, hp_of(c.g), {50, x.x, x.y, x.z});
            CHECK(rel(p.mean, mu) < 1e-8);
            CHECK(rel(p.variance, var) < 1e-8);
        }
    }
    SUBCASE("interpolation limit")
    {
        RandomStream rng(5);
        auto c = random_case(rng, 6);
        c.g.noise = 1e-9;
        const QuantileMap map(c.data, hp_of(c.g));
        for (const auto& e : c.data.entries)
            CHECK(std::abs(map.predict(e.location).mean - e.q_hat) < 1e-6);
    }
    SUBCASE("prior reversion far away")
    {
        RandomStream rng(6);
        const auto c = random_case(rng, 6);
        const auto p = predict(c.data, hp_of(c.g), {9, 1e6, 1e6, 0});
        CHECK(p.mean == doctest::Approx(c.g.mean).epsilon(1e-12));
        CHECK(p.variance == doctest::Approx(c.g.s2 + c.g.noise).epsilon(1e-12));
    }
    SUBCASE("variance does not grow when a point is added")
    {
        RandomStream rng(7);
        for (int t = 0; t < 100; ++t) {
            const auto c = random_case(rng, 6);
            auto fewer = c.data;
            fewer.entries.pop_back();
            const Location x{77, rng.uniform(0, 40), rng.uniform(0, 40), 1.0};
            CHECK(predict(c.data, hp_of(c.g), x).variance <=
                  predict(fewer, hp_of(c.g), x).variance * (1 + 1e-12));
        }
    }
    SUBCASE("translation invariance")
    {
        RandomStream rng(8);
        const auto c = random_case(rng, 6);
        auto moved = c.data;
        for (auto& e : moved.entries) {
            e.location.x += 123.0;
            e.location.y -= 45.0;
            e.location.z += 2.0;
        }
        const Location x{70, 12.0, 17.0, 1.0};
        const Location xm{70, 135.0, -28.0, 3.0};
        const auto a = predict(c.data, hp_of(c.g), x);
        const auto b = predict(moved, hp_of(c.g), xm);
        CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
        CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-10));
    }
    SUBCASE("negative hyperparameters rejected")
    {
        RandomStream rng(9);
        const auto c = random_case(rng, 3);
        CHECK_THROWS_AS(QuantileMap(c.data, {0.0, -1.0, 5.0, 0.1}), ConfigError);
        CHECK_THROWS_AS(QuantileMap(c.data, {0.0, 1.0, 0.0, 0.1}), ConfigError);
    }
}

TEST_CASE("fit_hyperparameters")
{
    const auto grid = generate_hexagonal_grid(testworld::hex127());
    SUBCASE("needs three points")
    {
        QuantileDataset d;
        d.entries.push_back({grid[0], -1.0, 0.0});
        d.entries.push_back({grid[1], -2.0, 0.0});
        CHECK_THROWS_AS(fit_hyperparameters(d), InsufficientDataError);
    }
    SUBCASE("constant field")
    {
        QuantileDataset d;
        for (int i = 0; i < 20; ++i)
            d.entries.push_back({grid[static_cast<std::size_t>(i)], -7.25, 0.0});
        const auto hp = fit_hyperparameters(d);
        const HyperparameterBox box;
        CHECK(hp.signal_variance == doctest::Approx(box.variance_min).epsilon(0.05));
        CHECK(std::abs(hp.mean_const + 7.25) < 1e-6);
    }
    SUBCASE("permutation invariance and shift equivariance")
    {
        RandomStream rng(10);
        const auto q = testworld::gp_draw(grid, -10.0, 4.0, 20.0, 0.1, rng);
        QuantileDataset d;
        for (std::size_t i = 0; i < 30; ++i)
            d.entries.push_back({grid[i * 4], q[i * 4], 0.0});
        const auto hp = fit_hyperparameters(d);

        auto shuffled = d;
        std::reverse(shuffled.entries.begin(), shuffled.entries.end());
        std::swap(shuffled.entries[3], shuffled.entries[11]);
        const auto hs = fit_hyperparameters(shuffled);
        CHECK(hs.mean_const == hp.mean_const);
        CHECK(hs.signal_variance == hp.signal_variance);
        CHECK(hs.length_scale == hp.length_scale);
        CHECK(hs.noise_variance == hp.noise_variance);

        auto shifted = d;
        for (auto& e : shifted.entries)
            e.q_hat += 3.0;
        const auto hc = fit_hyperparameters(shifted);
        const QuantileMap a(d, hp), b(shifted, hc);
        for (std::size_t i = 1; i < grid.size(); i += 9) {
            const auto pa = a.predict(grid[i]), pb = b.predict(grid[i]);
            CHECK(pb.mean - pa.mean == doctest::Approx(3.0).epsilon(1e-6));
            CHECK(pb.variance == doctest::Approx(pa.variance).epsilon(1e-6));
        }
    }
    SUBCASE("noise floor bounds the fitted noise")
    {
        RandomStream rng(11);
        const auto q = testworld::gp_draw(grid, -10.0, 4.0, 20.0, 0.01, rng);
        QuantileDataset d;
        for (std::size_t i = 0; i < 40; ++i)
            d.entries.push_back({grid[i * 3], q[i * 3], 0.0});
        d.noise_floor = 0.5;
        CHECK(fit_hyperparameters(d).noise_variance >= 0.5 * (1 - 1e-12));
    }
    SUBCASE("length scale recovery")
    {
        RandomStream rng(12);
        int within = 0;
        for (int t = 0; t < 50; ++t) {
            RandomStream trial = rng.split(static_cast<std::uint64_t>(t));
            const auto q = testworld::gp_draw(grid, -20.0, 4.0, 20.0, 0.1, trial);
            const auto split = split_indices(grid.size(), 100, trial);
            QuantileDataset d;
            for (std::size_t i : split.train)
                d.entries.push_back({grid[i], q[i], 0.0});
            FitOptions opt;
            opt.seed = trial();
            const double ell = fit_hyperparameters(d, opt).length_scale;
            if (ell >= 10.0 && ell <= 40.0)
                ++within;
        }
        MESSAGE("length scale within a factor of 2 in " << within << " of 50 trials");
        CHECK(within >= 45);
    }
}
