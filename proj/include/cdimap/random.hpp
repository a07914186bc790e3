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

#ifndef CDIMAP_RANDOM_HPP
#define CDIMAP_RANDOM_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace cdimap {

/// Seedable, splittable pseudo-random stream.
///
/// Every stochastic operation takes a stream explicitly. Child streams are
/// derived from (parent seed, key) with SplitMix64 mixing, so the child only
/// depends on the key and never on how many numbers the parent has consumed.
/// That is what makes parallel repetitions reproducible regardless of
/// scheduling.
class RandomStream {
 public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed);

    RandomStream split(std::uint64_t key) const;

    std::uint64_t seed() const { return seed_; }

    result_type operator()() { return engine_(); }
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }

    // Uniform on [0, 1).
    double uniform();
    double uniform(double lo, double hi);
    // Uniform integer on [0, n).
    std::uint64_t uniform_index(std::uint64_t n);
    double normal();
    // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance);
    double exponential(double mean);

 private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed from the system entropy source, for runs where none was given.
std::uint64_t entropy_seed();

}  // namespace cdimap

#endif
