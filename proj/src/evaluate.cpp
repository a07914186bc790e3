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

#include "cdimap/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "cdimap/stats.hpp"

namespace cdimap {

namespace {

constexpr double kMaxFailureFraction = 0.01;
constexpr std::size_t kMaxStoredFailures = 20;

// Everything about a location that does not change between repetitions.
struct LocationTruth {
    SortedSamples sorted;
    QuantileEstimate quantile;
    double estimate_variance = 0.0;
    double genie_rate = 0.0;
    double genie_outage = 0.0;  // empirical outage of the genie rate
};

struct RepetitionResult {
    bool failed = false;
    std::string failure;
    std::vector<EvalRecord> records;
};

RepetitionResult run_repetition(const World& world, const std::vector<LocationTruth>& truth,
                                const EvalConfig& cfg, std::size_t train_count, std::uint32_t rep)
{
    RandomStream rng = RandomStream(cfg.seed).split(train_count).split(rep);
    const std::size_t n_samples = world.samples.front().rho.size();
    RepetitionResult out;
    try {
        const IndexSplit split = split_indices(world.locations.size(), train_count, rng);

        QuantileDataset data;
        data.epsilon = cfg.epsilon;
        data.samples_per_location = n_samples;
        double floor_sum = 0.0;
        for (std::size_t i : split.train) {
            data.entries.push_back(
                {world.locations[i], truth[i].quantile.q_hat, truth[i].estimate_variance});
            floor_sum += truth[i].estimate_variance;
        }
        data.noise_floor = floor_sum / static_cast<double>(split.train.size());

        FitOptions fit = cfg.fit;
        fit.seed = rng();
        const GpHyperparameters hp = fit_hyperparameters(data, fit);
        const QuantileMap map(std::move(data), hp);

        std::vector<std::size_t> picks;
        std::vector<double> snr;
        for (std::size_t i : split.test) {
            const LocationTruth& t = truth[i];
            const int id = world.locations[i].id;
            auto push = [&](RateMethod m, double rate, double p_out) {
                EvalRecord r{rep, id, m, rate, p_out, t.genie_rate,
                             std::numeric_limits<double>::quiet_NaN()};
                if (t.genie_rate > 0.0)
                    r.normalized_throughput =
                        normalized_throughput(rate, p_out, t.genie_rate, t.genie_outage);
                out.records.push_back(r);
            };

            const RateDecision cdi = select_rate_cdi(map.predict(world.locations[i]), cfg.gamma_tx,
                                                     cfg.delta);
            push(RateMethod::cdi_map, cdi.rate, t.sorted.outage(cdi.rate, cfg.gamma_tx));

            // M distinct sample indices; M << N so rejection is cheap
            const auto& rho = world.samples[i].rho;
            picks.clear();
            while (picks.size() < cfg.baseline_samples) {
                const auto k = static_cast<std::size_t>(rng.uniform_index(rho.size()));
                if (std::find(picks.begin(), picks.end(), k) == picks.end())
                    picks.push_back(k);
            }
            snr.clear();
            for (std::size_t k : picks)
                snr.push_back(cfg.gamma_tx * rho[k]);
            const RateDecision base = select_rate_baseline(snr, cfg.epsilon, cfg.delta);
            std::size_t outage_count = t.sorted.count_outage(base.rate, cfg.gamma_tx);
            for (std::size_t k : picks)
                if (in_outage(rho[k], base.rate, cfg.gamma_tx))
                    --outage_count;
            push(RateMethod::baseline_rayleigh, base.rate,
                 static_cast<double>(outage_count) / static_cast<double>(rho.size() - picks.size()));

            if (cfg.include_genie)
                push(RateMethod::genie, t.genie_rate, t.genie_outage);
        }
    } catch (const Error& e) {
        out.failed = true;
        out.failure = e.what();
        out.records.clear();
    }
    return out;
}

}  // namespace

void EvalConfig::validate(std::size_t n_locations, std::size_t n_samples) const
{
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ConfigError("eval config: epsilon must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0))
        throw ConfigError("eval config: delta must lie in (0, 1)");
    if (repetitions < 1)
        throw ConfigError("eval config: repetitions (L) must be >= 1");
    if (baseline_samples < 1)
        throw ConfigError("eval config: baseline_samples (M) must be >= 1");
    if (!(gamma_tx > 0.0) || !std::isfinite(gamma_tx))
        throw ConfigError("eval config: gamma_tx must be positive");
    if (train_counts.empty())
        throw ConfigError("eval config: train_counts is empty");
    for (std::size_t d : train_counts) {
        if (d < 3 || d >= n_locations)
            throw ConfigError("eval config: train count " + std::to_string(d) +
                              " must satisfy 3 <= D < " + std::to_string(n_locations));
    }
    if (n_samples <= baseline_samples)
        throw ConfigError("eval config: need more than M samples per location");
    if (quantile_order(n_samples, epsilon) < 1)
        throw ConfigError("eval config: floor(N epsilon) = 0, too few samples per location");
}

void World::validate() const
{
    if (locations.empty())
        throw ConfigError("world: no locations");
    if (locations.size() != samples.size())
        throw ConfigError("world: locations and sample sets differ in count");
    const std::size_t n = samples.front().rho.size();
    for (const auto& s : samples) {
        s.validate();
        if (s.rho.size() != n)
            throw ConfigError("world: all locations need the same number of samples");
    }
}

const CampaignResult& EvalReport::campaign(std::size_t train_count) const
{
    for (const auto& c : campaigns)
        if (c.train_count == train_count)
            return c;
    throw ConfigError("report has no campaign with D = " + std::to_string(train_count));
}

double meta_probability(std::span<const EvalRecord> records, double epsilon)
{
    if (records.empty())
        throw InsufficientDataError("meta_probability: no records");
    std::size_t above = 0;
    for (const auto& r : records)
        if (r.p_out > epsilon)
            ++above;
    return static_cast<double>(above) / static_cast<double>(records.size());
}

double normalized_throughput(double rate, double p_out, double r_eps, double epsilon)
{
    if (!(r_eps > 0.0))
        throw DomainError("normalized_throughput: genie rate must be positive");
    return rate * (1.0 - p_out) / (r_eps * (1.0 - epsilon));
}

std::vector<LocationMeta> conditional_meta_by_location(std::span<const EvalRecord> records,
                                                       double epsilon)
{
    std::map<int, LocationMeta> acc;
    for (const auto& r : records) {
        auto& m = acc[r.location_id];
        m.location_id = r.location_id;
        ++m.count;
        if (r.p_out > epsilon)
            ++m.exceedances;
    }
    std::vector<LocationMeta> out;
    out.reserve(acc.size());
    for (auto& [id, m] : acc) {
        m.probability = static_cast<double>(m.exceedances) / static_cast<double>(m.count);
        out.push_back(m);
    }
    return out;
}

namespace {

std::vector<CurvePoint> ecdf_at(std::vector<double> values, std::span<const double> grid)
{
    std::sort(values.begin(), values.end());
    std::vector<CurvePoint> out;
    out.reserve(grid.size());
    for (double x : grid) {
        const auto le = static_cast<std::size_t>(
            std::upper_bound(values.begin(), values.end(), x) - values.begin());
        const double cdf = values.empty() ? 0.0
                                          : static_cast<double>(le) / static_cast<double>(values.size());
        out.push_back({x, cdf, le});
    }
    return out;
}

}  // namespace

std::vector<CurvePoint> outage_cdf_curve(std::span<const EvalRecord> records,
                                         std::span<const double> grid)
{
    if (records.empty())
        throw InsufficientDataError("outage_cdf_curve: no records");
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records)
        v.push_back(r.p_out);
    return ecdf_at(std::move(v), grid);
}

std::vector<CurvePoint> throughput_cdf_curve(std::span<const EvalRecord> records,
                                             std::span<const double> grid)
{
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records)
        if (std::isfinite(r.normalized_throughput))
            v.push_back(r.normalized_throughput);
    return ecdf_at(std::move(v), grid);
}

MethodSummary summarize(std::span<const EvalRecord> records, RateMethod method, double epsilon,
                        std::span<const double> outage_grid, std::span<const double> throughput_grid)
{
    std::vector<EvalRecord> sel;
    for (const auto& r : records)
        if (r.method == method)
            sel.push_back(r);
    MethodSummary s;
    s.method = method;
    s.n_records = sel.size();
    if (sel.empty())
        return s;
    for (const auto& r : sel)
        if (r.p_out > epsilon)
            ++s.exceedances;
    s.meta_probability = meta_probability(sel, epsilon);
    double sum = 0.0;
    std::size_t valid = 0;
    for (const auto& r : sel) {
        if (std::isfinite(r.normalized_throughput)) {
            sum += r.normalized_throughput;
            ++valid;
        }
    }
    s.throughput_excluded = sel.size() - valid;
    s.mean_throughput = valid > 0 ? sum / static_cast<double>(valid)
                                  : std::numeric_limits<double>::quiet_NaN();
    s.outage_curve = outage_cdf_curve(sel, outage_grid);
    s.throughput_curve = throughput_cdf_curve(sel, throughput_grid);
    s.location_meta = conditional_meta_by_location(sel, epsilon);
    return s;
}

std::vector<double> default_outage_grid(double epsilon)
{
    std::vector<double> g{0.0};
    for (int i = 0; i <= 80; ++i)
        g.push_back(std::pow(10.0, -4.0 + 4.0 * i / 80.0));
    g.push_back(epsilon);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::vector<double> default_throughput_grid()
{
    std::vector<double> g;
    for (int i = 0; i <= 150; ++i)
        g.push_back(0.02 * i);
    return g;
}

EvalReport run_campaign(const World& world, const EvalConfig& cfg)
{
    world.validate();
    const std::size_t n_samples = world.samples.front().rho.size();
    cfg.validate(world.locations.size(), n_samples);

    std::vector<LocationTruth> truth(world.locations.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& rho = world.samples[i].rho;
        auto& t = truth[i];
        t.sorted = SortedSamples(rho);
        t.quantile = empirical_quantile_log(rho, cfg.epsilon);
        t.estimate_variance = quantile_estimate_variance(rho, cfg.epsilon);
        t.genie_rate = rate_for_gain(t.quantile.order_value, cfg.gamma_tx);
        t.genie_outage = t.sorted.outage(t.genie_rate, cfg.gamma_tx);
    }

    EvalReport report;
    report.config = cfg;
    if (report.config.outage_grid.empty())
        report.config.outage_grid = default_outage_grid(cfg.epsilon);
    if (report.config.throughput_grid.empty())
        report.config.throughput_grid = default_throughput_grid();
    report.locations = world.locations;
    report.samples_per_location = n_samples;

    unsigned n_threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(cfg.repetitions)));

    for (std::size_t train_count : cfg.train_counts) {
        std::vector<RepetitionResult> results(cfg.repetitions);
        std::atomic<std::size_t> next{0};
        std::exception_ptr fatal;
        std::mutex fatal_mutex;
        auto worker = [&] {
            for (std::size_t rep = next++; rep < cfg.repetitions; rep = next++) {
                try {
                    results[rep] = run_repetition(world, truth, cfg, train_count,
                                                  static_cast<std::uint32_t>(rep));
                } catch (...) {
                    std::lock_guard<std::mutex> lock(fatal_mutex);
                    if (!fatal) fatal = std::current_exception();
                    next = cfg.repetitions;
                }
            }
        };
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 1; t < n_threads; ++t)
                pool.emplace_back(worker);
            worker();
        }
        if (fatal)
            std::rethrow_exception(fatal);

        CampaignResult c;
        c.train_count = train_count;
        c.repetitions = cfg.repetitions;
        std::size_t total = 0;
        for (const auto& r : results)
            total += r.records.size();
        c.records.reserve(total);
        for (std::size_t rep = 0; rep < results.size(); ++rep) {
            auto& r = results[rep];
            if (r.failed) {
                ++c.failed_repetitions;
                if (c.failures.size() < kMaxStoredFailures)
                    c.failures.push_back("repetition " + std::to_string(rep) + ": " + r.failure);
                continue;
            }
            c.records.insert(c.records.end(), r.records.begin(), r.records.end());
            std::vector<EvalRecord>().swap(r.records);
        }
        if (static_cast<double>(c.failed_repetitions) >
            kMaxFailureFraction * static_cast<double>(cfg.repetitions))
            throw CampaignError("campaign D = " + std::to_string(train_count) + ": " +
                                std::to_string(c.failed_repetitions) + " of " +
                                std::to_string(cfg.repetitions) + " repetitions failed" +
                                (c.failures.empty() ? "" : " (first: " + c.failures.front() + ")"));

        std::vector<RateMethod> methods{RateMethod::cdi_map, RateMethod::baseline_rayleigh};
        if (cfg.include_genie)
            methods.push_back(RateMethod::genie);
        for (RateMethod m : methods)
            c.methods.push_back(summarize(c.records, m, cfg.epsilon, report.config.outage_grid,
                                          report.config.throughput_grid));
        if (!cfg.keep_records)
            std::vector<EvalRecord>().swap(c.records);
        report.campaigns.push_back(std::move(c));
    }
    return report;
}

}  // namespace cdimap
