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

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cdimap/channel.hpp"
#include "cdimap/error.hpp"
#include "cdimap/evaluate.hpp"
#include "cdimap/io.hpp"
#include "cdimap/quantile_map.hpp"
#include "cdimap/random.hpp"
#include "cdimap/stats.hpp"

namespace fs = std::filesystem;
using namespace cdimap;

namespace {

constexpr std::size_t kFullRepetitions = 10000;

struct SeedOption {
    std::uint64_t value = 0;
    CLI::Option* opt = nullptr;

    void add(CLI::App* app)
    {
        opt = app->add_option("--seed", value, "RNG seed (default: config value, else entropy)");
    }
    bool given() const { return opt && opt->count() > 0; }
};

class Run {
 public:
    Run(std::string command)
    {
        m_.command = std::move(command);
        m_.started_utc = utc_timestamp();
    }

    void seed(std::uint64_t s, bool from_entropy)
    {
        m_.seed = s;
        m_.seed_from_entropy = from_entropy;
    }
    void config(const fs::path& p) { m_.config_sha256 = sha256_file(p); }
    void input(const fs::path& p) { m_.inputs.push_back({p.string(), sha256_file(p)}); }

    void output(const fs::path& p, std::string_view bytes)
    {
        atomic_write(p, bytes);
        m_.outputs.push_back({p.string(), sha256_hex(bytes)});
    }

    void error(const std::string& msg)
    {
        std::cerr << "cdimap: error: " << msg << "\n";
        ++errors_;
    }
    int errors() const { return errors_; }

    int finish(const fs::path& manifest_path)
    {
        m_.finished_utc = utc_timestamp();
        m_.exit_code = errors_ == 0 ? 0 : 1;
        atomic_write(manifest_path, encode_run_manifest(m_));
        return m_.exit_code;
    }

 private:
    RunManifest m_;
    int errors_ = 0;
};

std::uint64_t resolve_seed(const SeedOption& cli, std::optional<std::uint64_t> fallback, Run& run)
{
    if (cli.given()) {
        run.seed(cli.value, false);
        return cli.value;
    }
    if (fallback) {
        run.seed(*fallback, false);
        return *fallback;
    }
    const std::uint64_t s = entropy_seed();
    run.seed(s, true);
    std::clog << "cdimap: no seed given, using entropy seed " << s << "\n";
    return s;
}

std::string command_line(int argc, char** argv)
{
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i)
            s += ' ';
        s += argv[i];
    }
    return s;
}

void record_inputs(Run& run, const fs::path& dir, const MeasurementManifest& m)
{
    run.input(dir / kManifestName);
    for (const auto& e : m.entries)
        if (fs::exists(dir / e.file))
            run.input(dir / e.file);
}

MeasurementSet load_set(const fs::path& dir, Run& run)
{
    MeasurementSet set = read_measurement_set(dir);
    record_inputs(run, dir, set.manifest);
    for (const auto& e : set.errors)
        run.error(e);
    if (set.measurements.empty())
        throw FormatError(dir.string() + ": no readable measurement records");
    return set;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    fs::path config;
    fs::path out;
    SeedOption seed;
    bool binary = false;
};

int cmd_synth(const SynthArgs& a, Run& run)
{
    ScenarioConfig cfg = load_scenario_config(a.config);
    run.config(a.config);
    run.input(a.config);
    if (a.binary)
        cfg.encoding = MeasurementEncoding::binary;
    const std::uint64_t seed = resolve_seed(a.seed, cfg.seed, run);
    const SynthesisResult res = synthesize_campaign(cfg, seed);
    for (const auto& w : res.warnings)
        std::clog << "cdimap: warning: " << w << "\n";

    fs::create_directories(a.out);
    MeasurementManifest man;
    man.encoding = cfg.encoding;
    man.base_station = cfg.base_station;
    man.gamma_tx = cfg.link.gamma_tx;
    const bool bin = cfg.encoding == MeasurementEncoding::binary;
    for (const auto& m : res.measurements) {
        char name[64];
        std::snprintf(name, sizeof name, "loc_%04d.%s", m.location.id, bin ? "bin" : "csv");
        run.output(a.out / name, bin ? encode_measurement_binary(m) : encode_measurement_csv(m));
        man.entries.push_back({m.location, name});
    }
    run.output(a.out / kManifestName, encode_manifest(man));
    std::cout << "wrote " << res.measurements.size() << " measurement records ("
              << cfg.frequency.n_points << " points each) to " << a.out.string() << "\n";
    return run.finish(a.out / "run.json");
}

// ---- validate --------------------------------------------------------------

struct ValidateArgs {
    fs::path data;
    fs::path out;
    double threshold_db = -110.0;
    SeedOption seed;
};

double median(std::vector<double> v)
{
    if (v.empty())
        return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_validate(const ValidateArgs& a, Run& run)
{
    resolve_seed(a.seed, std::uint64_t{0}, run);
    const MeasurementSet set = load_set(a.data, run);
    std::ostringstream csv;
    csv << "location_id,x_m,y_m,z_m,peak_delay_ns,implied_distance_m,geometric_distance_m,"
           "mean_gain_db,free_space_gain_db,free_space_deviation_db,pathloss_exponent,"
           "coherence_bandwidth_mhz\n";
    std::vector<double> etas, bcs, devs;
    for (const auto& m : set.measurements) {
        try {
            const Cir cir = cir_from_cfr(m.sweep);
            const PeakInfo peak = cir_peak(cir);
            const double implied = peak.delay_s * kSpeedOfLight;
            const auto rho = fading_samples_from_cfr(m.sweep, m.location.id).rho;
            const double mean_gain_db =
                10.0 * std::log10(std::accumulate(rho.begin(), rho.end(), 0.0) / rho.size());
            double geo = std::nan(""), fs_db = std::nan(""), dev = std::nan("");
            if (set.manifest.base_station) {
                geo = distance(m.location, *set.manifest.base_station);
                fs_db = free_space_loss(geo, m.sweep.grid.center());
                dev = mean_gain_db - fs_db;
                devs.push_back(dev);
            }
            const double eta = fit_pathloss_exponent(m.sweep).eta;
            const double bc = coherence_bandwidth(cir, a.threshold_db);
            etas.push_back(eta);
            bcs.push_back(bc);
            csv << m.location.id << ',' << format_double(m.location.x) << ','
                << format_double(m.location.y) << ',' << format_double(m.location.z) << ','
                << format_double(peak.delay_s * 1e9) << ',' << format_double(implied) << ','
                << format_double(geo) << ',' << format_double(mean_gain_db) << ','
                << format_double(fs_db) << ',' << format_double(dev) << ',' << format_double(eta)
                << ',' << format_double(bc / 1e6) << '\n';
        } catch (const Error& e) {
            run.error("location " + std::to_string(m.location.id) + ": " + e.what());
        }
    }
    std::printf("locations validated: %zu of %zu\n", etas.size(), set.manifest.entries.size());
    if (!etas.empty()) {
        const auto [bmin, bmax] = std::minmax_element(bcs.begin(), bcs.end());
        const auto [emin, emax] = std::minmax_element(etas.begin(), etas.end());
        std::printf("pathloss exponent eta: median %.3f, range [%.3f, %.3f]\n", median(etas), *emin,
                    *emax);
        std::printf("coherence bandwidth (threshold %.1f dB): %.3f .. %.3f MHz\n", a.threshold_db,
                    *bmin / 1e6, *bmax / 1e6);
        if (!devs.empty())
            std::printf("mean gain minus free-space gain: median %.2f dB\n", median(devs));
    }
    if (!a.out.empty()) {
        run.output(a.out, csv.str());
        return run.finish(a.out.string() + ".run.json");
    }
    std::cout << csv.str();
    return run.errors() == 0 ? 0 : 1;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
    fs::path data;
    fs::path out;
    fs::path predictions;
    double epsilon = 0.01;
    std::size_t train = 0;
    SeedOption seed;
};

int cmd_fit(const FitArgs& a, Run& run)
{
    const std::uint64_t seed = resolve_seed(a.seed, std::nullopt, run);
    const MeasurementSet set = load_set(a.data, run);
    const World world = world_from_measurements(set.measurements);
    world.validate();
    if (a.train < 3 || a.train >= world.locations.size())
        throw InsufficientDataError("fit: --train must satisfy 3 <= D < " +
                                    std::to_string(world.locations.size()));
    RandomStream rng = RandomStream(seed).split(a.train);
    const IndexSplit split = split_indices(world.locations.size(), a.train, rng);
    std::vector<Location> locs;
    std::vector<FadingSampleSet> samples;
    for (std::size_t i : split.train) {
        locs.push_back(world.locations[i]);
        samples.push_back(world.samples[i]);
    }
    QuantileDataset data = build_quantile_dataset(locs, samples, a.epsilon);
    FitOptions fit;
    fit.seed = rng();
    const GpHyperparameters hp = fit_hyperparameters(data, fit);
    const QuantileMap map(std::move(data), hp);
    run.output(a.out, encode_map(map));
    std::printf("fitted map on %zu locations: mean %.4f, signal variance %.4g, length scale %.3f m, "
                "noise variance %.4g (log-gain units)\n",
                a.train, hp.mean_const, hp.signal_variance, hp.length_scale, hp.noise_variance);

    if (!a.predictions.empty()) {
        std::vector<bool> is_train(world.locations.size(), false);
        for (std::size_t i : split.train)
            is_train[i] = true;
        std::ostringstream csv;
        csv << "location_id,x_m,y_m,z_m,train,q_hat_log,q_hat_db,mu_log,sigma_log,mu_db\n";
        for (std::size_t i = 0; i < world.locations.size(); ++i) {
            const auto& l = world.locations[i];
            const double q = empirical_quantile_log(world.samples[i], a.epsilon).q_hat;
            const auto p = map.predict(l);
            const double to_db = 10.0 / std::log(10.0);
            csv << l.id << ',' << format_double(l.x) << ',' << format_double(l.y) << ','
                << format_double(l.z) << ',' << (is_train[i] ? 1 : 0) << ',' << format_double(q)
                << ',' << format_double(q * to_db) << ',' << format_double(p.mean) << ','
                << format_double(p.stddev()) << ',' << format_double(p.mean * to_db) << '\n';
        }
        run.output(a.predictions, csv.str());
    }
    return run.finish(a.out.string() + ".run.json");
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
    fs::path data;
    fs::path config;
    fs::path out;
    SeedOption seed;
    bool no_records = false;
    bool full = false;
    unsigned threads = 0;
};

int cmd_evaluate(const EvaluateArgs& a, Run& run)
{
    const fs::path report_path = a.out / "report.json";
    if (fs::exists(report_path))
        throw ConfigError(report_path.string() +
                          " already exists; refusing to overwrite a previous evaluation");
    EvalConfigFile file = load_eval_config(a.config);
    run.config(a.config);
    run.input(a.config);
    EvalConfig cfg = file.config;
    cfg.seed = resolve_seed(a.seed, file.has_seed ? std::optional(cfg.seed) : std::nullopt, run);
    cfg.keep_records = !a.no_records;
    if (a.full)
        cfg.repetitions = kFullRepetitions;
    if (a.threads)
        cfg.threads = a.threads;

    const MeasurementSet set = load_set(a.data, run);
    if (!file.has_gamma_tx) {
        if (!set.manifest.gamma_tx)
            throw ConfigError("gamma_tx is in neither the eval config nor the measurement manifest");
        cfg.gamma_tx = *set.manifest.gamma_tx;
    }
    const World world = world_from_measurements(set.measurements);
    const EvalReport report = run_campaign(world, cfg);

    fs::create_directories(a.out);
    run.output(report_path, encode_report(report));
    if (cfg.keep_records)
        run.output(a.out / "records.csv", encode_records_csv(report));
    for (const auto& c : report.campaigns) {
        for (const auto& f : c.failures)
            run.error("D=" + std::to_string(c.train_count) + " " + f);
        for (const auto& s : c.methods)
            std::printf("D=%-4zu %-18s meta-probability %.4f  mean normalized throughput %.4f\n",
                        c.train_count, std::string(to_string(s.method)).c_str(), s.meta_probability,
                        s.mean_throughput);
    }
    return run.finish(a.out / "run.json");
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
    fs::path report;
    fs::path out;
    SeedOption seed;
};

int cmd_report(const ReportArgs& a, Run& run)
{
    resolve_seed(a.seed, std::uint64_t{0}, run);
    run.input(a.report);
    const EvalReport r = decode_report(read_file(a.report), a.report.string());
    fs::create_directories(a.out);

    std::ostringstream summary, outage, meta, thr, loc;
    summary << "epsilon " << format_double(r.config.epsilon) << ", delta "
            << format_double(r.config.delta) << ", repetitions " << r.config.repetitions
            << ", locations " << r.locations.size() << ", samples per location "
            << r.samples_per_location << "\n";
    outage << "method,train_count,outage_probability,cdf\n";
    meta << "method,train_count,meta_probability,exceedances,records\n";
    thr << "method,train_count,normalized_throughput,cdf\n";
    loc << "method,train_count,location_id,x_m,y_m,z_m,meta_probability,exceedances,records\n";

    for (const auto& c : r.campaigns) {
        summary << "D = " << c.train_count << " (failed repetitions " << c.failed_repetitions
                << ")\n";
        for (const auto& s : c.methods) {
            const std::string name(to_string(s.method));
            char line[256];
            std::snprintf(line, sizeof line,
                          "  %-18s meta-probability %.4f (%zu / %zu)  mean normalized throughput "
                          "%.4f\n",
                          name.c_str(), s.meta_probability, s.exceedances, s.n_records,
                          s.mean_throughput);
            summary << line;
            const std::string key = name + "," + std::to_string(c.train_count) + ",";
            for (const auto& p : s.outage_curve)
                outage << key << format_double(p.x) << ',' << format_double(p.cdf) << '\n';
            for (const auto& p : s.throughput_curve)
                thr << key << format_double(p.x) << ',' << format_double(p.cdf) << '\n';
            meta << key << format_double(s.meta_probability) << ',' << s.exceedances << ','
                 << s.n_records << '\n';
            for (const auto& lm : s.location_meta) {
                const auto it = std::find_if(r.locations.begin(), r.locations.end(),
                                             [&](const Location& l) { return l.id == lm.location_id; });
                if (it == r.locations.end()) {
                    run.error("report lists unknown location " + std::to_string(lm.location_id));
                    continue;
                }
                loc << key << lm.location_id << ',' << format_double(it->x) << ','
                    << format_double(it->y) << ',' << format_double(it->z) << ','
                    << format_double(lm.probability) << ',' << lm.exceedances << ',' << lm.count
                    << '\n';
            }
        }
    }
    std::cout << summary.str();
    run.output(a.out / "summary.txt", summary.str());
    run.output(a.out / "outage_cdf.csv", outage.str());
    run.output(a.out / "meta_probability.csv", meta.str());
    run.output(a.out / "throughput_cdf.csv", thr.str());
    run.output(a.out / "location_meta.csv", loc.str());
    return run.finish(a.out / "run.json");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cdimap: spatial channel quantile maps and ultra-reliable rate selection"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Synthesize measurement records from a scenario config");
    s->add_option("--config", synth.config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option("--out", synth.out, "Output directory")->required();
    s->add_flag("--binary", synth.binary, "Write binary records instead of CSV");
    synth.seed.add(s);

    ValidateArgs val;
    auto* v = app.add_subcommand("validate", "Check measurement records and report channel statistics");
    v->add_option("--data", val.data, "Measurement directory")->required()->check(CLI::ExistingDirectory);
    v->add_option("--out", val.out, "Per-location CSV (default: stdout)");
    v->add_option("--threshold-db", val.threshold_db, "CIR power threshold for coherence bandwidth");
    val.seed.add(v);

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Fit a quantile map from a random subset of locations");
    f->add_option("--data", fit.data, "Measurement directory")->required()->check(CLI::ExistingDirectory);
    f->add_option("--train", fit.train, "Number of training locations D")->required();
    f->add_option("--epsilon", fit.epsilon, "Target outage probability");
    f->add_option("--out", fit.out, "Map file (JSON)")->required();
    f->add_option("--predictions", fit.predictions, "Optional per-location prediction CSV");
    fit.seed.add(f);

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "Run the Monte Carlo rate-selection campaign");
    e->add_option("--data", ev.data, "Measurement directory")->required()->check(CLI::ExistingDirectory);
    e->add_option("--config", ev.config, "Eval config (JSON)")->required()->check(CLI::ExistingFile);
    e->add_option("--out", ev.out, "Output directory")->required();
    e->add_flag("--no-records", ev.no_records, "Skip the per-record CSV");
    e->add_flag("--full", ev.full, "Use L = 10000 repetitions regardless of the config");
    e->add_option("--threads", ev.threads, "Worker threads (default: config, else all cores)");
    ev.seed.add(e);

    ReportArgs rep;
    auto* r = app.add_subcommand("report", "Summarize a report and write plot-ready CSVs");
    r->add_option("--report", rep.report, "report.json from evaluate")->required()->check(CLI::ExistingFile);
    r->add_option("--out", rep.out, "Output directory")->required();
    rep.seed.add(r);

    CLI11_PARSE(app, argc, argv);

    Run run(command_line(argc, argv));
    try {
        if (*s)
            return cmd_synth(synth, run);
        if (*v)
            return cmd_validate(val, run);
        if (*f)
            return cmd_fit(fit, run);
        if (*e)
            return cmd_evaluate(ev, run);
        return cmd_report(rep, run);
    } catch (const Error& err) {
        std::cerr << "cdimap: error: " << err.what() << "\n";
    } catch (const std::exception& err) {
        std::cerr << "cdimap: fatal: " << err.what() << "\n";
    }
    return 1;
}
