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

#include <json.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "cdimap/error.hpp"
#include "cdimap/io.hpp"

namespace cdimap {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// JSON has no NaN; encode it as null.
json num(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

double as_num(const json& j)
{
    return j.is_null() ? kNaN : j.get<double>();
}

json location_json(const Location& l)
{
    return json::array({l.id, l.x, l.y, l.z});
}

Location location_from(const json& j)
{
    return {j.at(0).get<int>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

json curve_json(const std::vector<CurvePoint>& c)
{
    json out = json::array();
    for (const auto& p : c)
        out.push_back(json::array({p.x, p.cdf, p.count_le}));
    return out;
}

std::vector<CurvePoint> curve_from(const json& j)
{
    std::vector<CurvePoint> out;
    for (const auto& p : j)
        out.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<std::size_t>()});
    return out;
}

json parse_or_throw(std::string_view text, std::string_view source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string(source) + ": " + e.what());
    }
}

void check_format(const json& j, std::string_view format, std::string_view source)
{
    if (!j.is_object() || j.value("format", "") != format)
        throw FormatError(std::string(source) + ": expected format '" + std::string(format) + "'");
    if (j.value("version", 0) != 1)
        throw FormatError(std::string(source) + ": unsupported version");
}

template <class F>
auto guarded(std::string_view source, F&& f)
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw FormatError(std::string(source) + ": " + e.what());
    }
}

}  // namespace

std::string encode_map(const QuantileMap& map)
{
    const auto& d = map.dataset();
    const auto& hp = map.hyperparameters();
    json j;
    j["format"] = "cdimap-map";
    j["version"] = 1;
    j["epsilon"] = d.epsilon;
    j["samples_per_location"] = d.samples_per_location;
    j["noise_floor_log2"] = d.noise_floor;
    j["hyperparameters"] = {{"mean_log", hp.mean_const},
                            {"signal_variance_log2", hp.signal_variance},
                            {"length_scale_m", hp.length_scale},
                            {"noise_variance_log2", hp.noise_variance}};
    j["jitter"] = map.jitter();
    json obs = json::array();
    for (const auto& e : d.entries)
        obs.push_back({{"location", location_json(e.location)},
                       {"q_hat_log", e.q_hat},
                       {"estimate_variance_log2", e.estimate_variance}});
    j["observations"] = std::move(obs);
    return j.dump(1) + "\n";
}

QuantileMap decode_map(std::string_view text, std::string_view source)
{
    const json j = parse_or_throw(text, source);
    check_format(j, "cdimap-map", source);
    return guarded(source, [&] {
        QuantileDataset d;
        d.epsilon = j.at("epsilon").get<double>();
        d.samples_per_location = j.at("samples_per_location").get<std::size_t>();
        d.noise_floor = j.at("noise_floor_log2").get<double>();
        for (const auto& o : j.at("observations"))
            d.entries.push_back({location_from(o.at("location")), o.at("q_hat_log").get<double>(),
                                 o.at("estimate_variance_log2").get<double>()});
        const auto& h = j.at("hyperparameters");
        GpHyperparameters hp{h.at("mean_log").get<double>(), h.at("signal_variance_log2").get<double>(),
                             h.at("length_scale_m").get<double>(),
                             h.at("noise_variance_log2").get<double>()};
        return QuantileMap(std::move(d), hp);
    });
}

std::string encode_report(const EvalReport& r)
{
    const auto& c = r.config;
    json j;
    j["format"] = "cdimap-report";
    j["version"] = 1;
    j["tool_version"] = kToolVersion;
    j["config"] = {{"epsilon", c.epsilon},
                   {"delta", c.delta},
                   {"train_counts", c.train_counts},
                   {"repetitions", c.repetitions},
                   {"baseline_samples", c.baseline_samples},
                   {"gamma_tx", c.gamma_tx},
                   {"seed", c.seed},
                   {"include_genie", c.include_genie},
                   {"fit",
                    {{"starts", c.fit.starts},
                     {"max_evaluations", c.fit.max_evaluations},
                     {"f_tol", c.fit.f_tol},
                     {"x_tol", c.fit.x_tol},
                     {"length_min_m", c.fit.box.length_min_m},
                     {"length_max_m", c.fit.box.length_max_m},
                     {"variance_min", c.fit.box.variance_min},
                     {"variance_max", c.fit.box.variance_max}}},
                   {"outage_grid", c.outage_grid},
                   {"throughput_grid", c.throughput_grid}};
    json locs = json::array();
    for (const auto& l : r.locations)
        locs.push_back(location_json(l));
    j["locations"] = std::move(locs);
    j["samples_per_location"] = r.samples_per_location;
    json camps = json::array();
    for (const auto& cr : r.campaigns) {
        json methods = json::array();
        for (const auto& m : cr.methods) {
            json meta = json::array();
            for (const auto& lm : m.location_meta)
                meta.push_back(json::array({lm.location_id, lm.probability, lm.exceedances, lm.count}));
            methods.push_back({{"method", std::string(to_string(m.method))},
                               {"n_records", m.n_records},
                               {"exceedances", m.exceedances},
                               {"meta_probability", num(m.meta_probability)},
                               {"mean_normalized_throughput", num(m.mean_throughput)},
                               {"throughput_excluded", m.throughput_excluded},
                               {"outage_curve", curve_json(m.outage_curve)},
                               {"throughput_curve", curve_json(m.throughput_curve)},
                               {"location_meta", std::move(meta)}});
        }
        camps.push_back({{"train_count", cr.train_count},
                         {"repetitions", cr.repetitions},
                         {"failed_repetitions", cr.failed_repetitions},
                         {"failures", cr.failures},
                         {"methods", std::move(methods)}});
    }
    j["campaigns"] = std::move(camps);
    return j.dump(1) + "\n";
}

EvalReport decode_report(std::string_view text, std::string_view source)
{
    const json j = parse_or_throw(text, source);
    check_format(j, "cdimap-report", source);
    return guarded(source, [&] {
        EvalReport r;
        const auto& c = j.at("config");
        r.config.epsilon = c.at("epsilon").get<double>();
        r.config.delta = c.at("delta").get<double>();
        r.config.train_counts = c.at("train_counts").get<std::vector<std::size_t>>();
        r.config.repetitions = c.at("repetitions").get<std::size_t>();
        r.config.baseline_samples = c.at("baseline_samples").get<std::size_t>();
        r.config.gamma_tx = c.at("gamma_tx").get<double>();
        r.config.seed = c.at("seed").get<std::uint64_t>();
        r.config.include_genie = c.at("include_genie").get<bool>();
        const auto& f = c.at("fit");
        r.config.fit.starts = f.at("starts").get<std::size_t>();
        r.config.fit.max_evaluations = f.at("max_evaluations").get<std::size_t>();
        r.config.fit.f_tol = f.at("f_tol").get<double>();
        r.config.fit.x_tol = f.at("x_tol").get<double>();
        r.config.fit.box = {f.at("length_min_m").get<double>(), f.at("length_max_m").get<double>(),
                            f.at("variance_min").get<double>(), f.at("variance_max").get<double>()};
        r.config.outage_grid = c.at("outage_grid").get<std::vector<double>>();
        r.config.throughput_grid = c.at("throughput_grid").get<std::vector<double>>();
        for (const auto& l : j.at("locations"))
            r.locations.push_back(location_from(l));
        r.samples_per_location = j.at("samples_per_location").get<std::size_t>();
        for (const auto& cj : j.at("campaigns")) {
            CampaignResult cr;
            cr.train_count = cj.at("train_count").get<std::size_t>();
            cr.repetitions = cj.at("repetitions").get<std::size_t>();
            cr.failed_repetitions = cj.at("failed_repetitions").get<std::size_t>();
            cr.failures = cj.at("failures").get<std::vector<std::string>>();
            for (const auto& mj : cj.at("methods")) {
                MethodSummary m;
                m.method = rate_method_from_string(mj.at("method").get<std::string>());
                m.n_records = mj.at("n_records").get<std::size_t>();
                m.exceedances = mj.at("exceedances").get<std::size_t>();
                m.meta_probability = as_num(mj.at("meta_probability"));
                m.mean_throughput = as_num(mj.at("mean_normalized_throughput"));
                m.throughput_excluded = mj.at("throughput_excluded").get<std::size_t>();
                m.outage_curve = curve_from(mj.at("outage_curve"));
                m.throughput_curve = curve_from(mj.at("throughput_curve"));
                for (const auto& lm : mj.at("location_meta"))
                    m.location_meta.push_back({lm.at(0).get<int>(), lm.at(1).get<double>(),
                                               lm.at(2).get<std::size_t>(), lm.at(3).get<std::size_t>()});
                cr.methods.push_back(std::move(m));
            }
            r.campaigns.push_back(std::move(cr));
        }
        return r;
    });
}

namespace {
constexpr std::string_view kRecordsHeader =
    "train_count,repetition,location_id,method,rate_bits_per_s_hz,p_out,r_eps_bits_per_s_hz,"
    "normalized_throughput";
}

std::string encode_records_csv(const EvalReport& report)
{
    std::string out;
    out += kRecordsHeader;
    out += '\n';
    for (const auto& c : report.campaigns) {
        const std::string d = std::to_string(c.train_count) + ",";
        for (const auto& rec : c.records) {
            out += d;
            out += std::to_string(rec.repetition);
            out += ',';
            out += std::to_string(rec.location_id);
            out += ',';
            out += to_string(rec.method);
            out += ',';
            out += format_double(rec.rate);
            out += ',';
            out += format_double(rec.p_out);
            out += ',';
            out += format_double(rec.r_eps);
            out += ',';
            out += std::isnan(rec.normalized_throughput) ? std::string("nan")
                                                          : format_double(rec.normalized_throughput);
            out += '\n';
        }
    }
    return out;
}

void write_records_csv(const std::filesystem::path& path, const EvalReport& report)
{
    atomic_write(path, encode_records_csv(report));
}

void read_records_csv(const std::filesystem::path& path, EvalReport& report)
{
    const std::string text = read_file(path);
    std::istringstream is(text);
    std::string line;
    const std::string source = path.string();
    if (!std::getline(is, line) || line != kRecordsHeader)
        throw FormatError(source + ": missing records header");
    std::map<std::size_t, CampaignResult*> by_count;
    for (auto& c : report.campaigns) {
        c.records.clear();
        by_count[c.train_count] = &c;
    }
    std::size_t n = 1;
    while (std::getline(is, line)) {
        ++n;
        if (line.empty())
            continue;
        const std::string at = source + ":" + std::to_string(n);
        std::vector<std::string> f;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');)
            f.push_back(cell);
        if (f.size() != 8)
            throw FormatError(at + ": expected 8 columns");
        const auto d = static_cast<std::size_t>(parse_double(f[0], at));
        const auto it = by_count.find(d);
        if (it == by_count.end())
            throw FormatError(at + ": no campaign with train_count " + f[0]);
        EvalRecord rec;
        rec.repetition = static_cast<std::uint32_t>(parse_double(f[1], at));
        rec.location_id = static_cast<int>(parse_double(f[2], at));
        rec.method = rate_method_from_string(f[3]);
        rec.rate = parse_double(f[4], at);
        rec.p_out = parse_double(f[5], at);
        rec.r_eps = parse_double(f[6], at);
        rec.normalized_throughput = f[7] == "nan" ? kNaN : parse_double(f[7], at);
        it->second->records.push_back(rec);
    }
}

std::string encode_run_manifest(const RunManifest& m)
{
    auto digests = [](const std::vector<FileDigest>& v) {
        json out = json::array();
        for (const auto& d : v)
            out.push_back({{"path", d.path}, {"sha256", d.sha256}});
        return out;
    };
    json j{{"format", "cdimap-run"},
           {"version", 1},
           {"tool_version", m.tool_version},
           {"command", m.command},
           {"config_sha256", m.config_sha256},
           {"seed", m.seed},
           {"seed_from_entropy", m.seed_from_entropy},
           {"started_utc", m.started_utc},
           {"finished_utc", m.finished_utc},
           {"inputs", digests(m.inputs)},
           {"outputs", digests(m.outputs)},
           {"exit_code", m.exit_code}};
    return j.dump(1) + "\n";
}

}  // namespace cdimap
