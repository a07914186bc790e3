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

#include <cmath>
#include <vector>

#include "cdimap/error.hpp"
#include "cdimap/random.hpp"
#include "cdimap/rate_select.hpp"
#include "cdimap/special_functions.hpp"
#include "cdimap/stats.hpp"
#include "oracles.hpp"

using namespace cdimap;

TEST_CASE("inverse_erf")
{
    CHECK(inverse_erf(0.0) == 0.0);
    CHECK(std::abs(inverse_erf(std::erf(1.0)) - 1.0) < 1e-12);
    CHECK(std::abs(inverse_erf(-0.9) + 1.163087) < 1e-5);
    for (double p = -0.999999; p < 1.0; p += 0.0123) {
        const double y = inverse_erf(p);
        CHECK(std::abs(std::erf(y) - p) < 1e-12);
        CHECK(std::abs(y - oracle::inverse_erf(p)) < 1e-10);
    }
    CHECK(std::abs(std::erf(inverse_erf(1 - 1e-15)) - (1 - 1e-15)) < 1e-12);
    CHECK_THROWS_AS(inverse_erf(1.0), DomainError);
    CHECK_THROWS_AS(inverse_erf(-1.5), DomainError);
    CHECK_THROWS_AS(inverse_erf(NAN), DomainError);
}

TEST_CASE("chi-square")
{
    for (int dof : {2, 4, 10, 20, 60})
        for (double x : {0.1, 1.0, 5.0, 17.0, 31.41, 80.0})
            CHECK(std::abs(chi_square_cdf(x, dof) - oracle::chi_square_cdf_even(x, dof)) < 1e-12);
    CHECK(std::abs(chi_square_quantile(0.95, 20) - 31.410) < 1e-3);
    for (int dof : {2, 6, 20, 100})
        for (double p : {1e-6, 0.01, 0.05, 0.5, 0.95, 0.999999})
            CHECK(std::abs(chi_square_quantile(p, dof) - oracle::chi_square_quantile_even(p, dof)) <
                  1e-10 * std::max(1.0, oracle::chi_square_quantile_even(p, dof)));
    // odd dof: chi2(1) is the square of a standard normal
    CHECK(chi_square_cdf(1.0, 1.0) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-12));
    CHECK(gamma_p(2.5, 1.3) + gamma_q(2.5, 1.3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(chi_square_quantile(1.0, 4), DomainError);
    CHECK_THROWS_AS(chi_square_quantile(0.5, 0), DomainError);
}

TEST_CASE("CDI rate rule")
{
    SUBCASE("reference values")
    {
        const PredictiveQuantile p{-1.0, 0.7};
        CHECK(select_rate_cdi(p, 30.0, 0.5).rate == std::log2(1 + 30.0 * std::exp(-1.0)));
        CHECK(select_rate_cdi({-1.0, 0.0}, 30.0, 0.01).rate == std::log2(1 + 30.0 * std::exp(-1.0)));
        CHECK(std::abs(select_rate_cdi({0.0, 1.0}, 100.0, 0.05).rate - 4.344) < 1e-3);
        const auto d = select_rate_cdi(p, 30.0, 0.2);
        CHECK(d.method == RateMethod::cdi_map);
        CHECK(d.predictive_mean == -1.0);
        CHECK(d.predictive_variance == 0.7);
    }
    SUBCASE("monotonicity")
    {
        for (double mu : {-20.0, -3.0, 0.0, 2.0})
            for (double var : {0.01, 1.0, 9.0}) {
                double prev = -1.0;
                for (double delta = 0.01; delta < 1.0; delta += 0.07) {
                    const double r = select_rate_cdi({mu, var}, 1e3, delta).rate;
                    CHECK(r > prev);
                    prev = r;
                }
                CHECK(select_rate_cdi({mu + 0.1, var}, 1e3, 0.05).rate > select_rate_cdi({mu, var}, 1e3, 0.05).rate);
                CHECK(select_rate_cdi({mu, var * 1.2}, 1e3, 0.05).rate < select_rate_cdi({mu, var}, 1e3, 0.05).rate);
            }
    }
    SUBCASE("exceedance equals predictive miscoverage")
    {
        const double g = 50.0;
        for (double mu : {-6.0, -1.0, 1.5})
            for (double var : {0.04, 0.5, 3.0})
                for (double delta : {0.05, 0.25, 0.5, 0.8})
                    for (double z = -3.0; z <= 3.0; z += 0.173) {
                        const double q = mu + z * std::sqrt(var);
                        const bool exceeds = select_rate_cdi({mu, var}, g, delta).rate > rate_for_gain(std::exp(q), g);
                        const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
                        if (std::abs(cdf - delta) > 1e-9)
                            CHECK(exceeds == (cdf < delta));
                    }
    }
    SUBCASE("domain")
    {
        CHECK_THROWS_AS(select_rate_cdi({0.0, 1.0}, 1.0, 0.0), DomainError);
        CHECK_THROWS_AS(select_rate_cdi({0.0, -1.0}, 1.0, 0.5), DomainError);
    }
}

TEST_CASE("Rayleigh baseline")
{
    SUBCASE("chi-square bound")
    {
        const std::vector<double> snr{3.0, 1.0, 7.5, 0.2, 2.2, 4.1, 0.9, 1.6, 5.5, 2.0};
        const auto d = select_rate_baseline(snr, 0.01, 0.05);
        const double lower = 2.0 * 28.0 / 31.410432844230918;
        CHECK(d.mean_snr_lower_bound == doctest::Approx(lower).epsilon(1e-9));
        CHECK(d.rate == doctest::Approx(std::log2(1 + lower * -std::log1p(-0.01))).epsilon(1e-9));
        CHECK(d.mean_snr == doctest::Approx(2.8));
    }
    SUBCASE("large M approaches the known-mean rate")
    {
        RandomStream rng(3);
        std::vector<double> snr(400000);
        for (auto& s : snr)
            s = rng.exponential(200.0);
        const double want = std::log2(1 + 200.0 * -std::log1p(-0.01));
        CHECK(select_rate_baseline(snr, 0.01, 0.05).rate == doctest::Approx(want).epsilon(0.01));
    }
    SUBCASE("calibrated under exact Rayleigh")
    {
        RandomStream rng(4);
        const int trials = 20000;
        int exceed = 0;
        std::vector<double> snr(10);
        for (int t = 0; t < trials; ++t) {
            for (auto& s : snr)
                s = rng.exponential(15.0);
            const double rate = select_rate_baseline(snr, 0.01, 0.05).rate;
            if (-std::expm1(-std::expm1(rate * std::log(2.0)) / 15.0) > 0.01)
                ++exceed;
        }
        const double p = static_cast<double>(exceed) / trials;
        CHECK(std::abs(p - 0.05) < 3 * std::sqrt(0.05 * 0.95 / trials));
    }
    SUBCASE("domain")
    {
        const std::vector<double> bad{1.0, 0.0};
        CHECK_THROWS_AS(select_rate_baseline(bad, 0.01, 0.05), DomainError);
        CHECK_THROWS_AS(select_rate_baseline({}, 0.01, 0.05), InsufficientDataError);
    }
}

TEST_CASE("genie")
{
    FadingSampleSet s{1, {}};
    for (int i = 1; i <= 200; ++i)
        s.rho.push_back(0.01 * i);
    const auto d = select_rate_genie(s, 0.05, 10.0);
    CHECK(d.method == RateMethod::genie);
    CHECK(d.rate == outage_capacity_empirical(s, 0.05, 10.0));
    CHECK(d.rate == std::log2(1 + 10.0 * 0.1));
    CHECK(std::exp(d.quantile_log_gain) == doctest::Approx(0.1));
    CHECK(empirical_outage(s, d.rate, 10.0) <= 0.05);
}

TEST_CASE("method names")
{
    for (auto m : {RateMethod::cdi_map, RateMethod::baseline_rayleigh, RateMethod::genie})
        CHECK(rate_method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(rate_method_from_string("oracle"), FormatError);
}
