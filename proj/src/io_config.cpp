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

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>
#include <string>

#include "cdimap/error.hpp"
#include "cdimap/io.hpp"

namespace cdimap {

namespace {

using nlohmann::json;

// Dotted-path access into a JSON document with field-named diagnostics.
class Fields {
 public:
    Fields(const json& root, std::string_view source) : root_(root), source_(source) {}

    const json* find(std::string_view path) const
    {
        const json* node = &root_;
        std::size_t start = 0;
        while (start <= path.size()) {
            const std::size_t dot = path.find('.', start);
            const std::string key(path.substr(start, dot == std::string_view::npos ? path.size() - start
                                                                                   : dot - start));
            if (!node->is_object())
                return nullptr;
            const auto it = node->find(key);
            if (it == node->end())
                return nullptr;
            node = &*it;
            if (dot == std::string_view::npos)
                break;
            start = dot + 1;
        }
        return node;
    }

    bool has(std::string_view path) const { return find(path) != nullptr; }

    const json& require(std::string_view path) const
    {
        const json* n = find(path);
        if (n == nullptr)
            fail("missing required field '" + std::string(path) + "'");
        return *n;
    }

    double number(std::string_view path) const { return as_number(require(path), path); }
    double number(std::string_view path, double fallback) const
    {
        const json* n = find(path);
        return n ? as_number(*n, path) : fallback;
    }

    std::int64_t integer(std::string_view path) const { return as_integer(require(path), path); }
    std::int64_t integer(std::string_view path, std::int64_t fallback) const
    {
        const json* n = find(path);
        return n ? as_integer(*n, path) : fallback;
    }

    std::uint64_t unsigned_integer(std::string_view path) const
    {
        const json& n = require(path);
        if (!n.is_number_unsigned() && !(n.is_number_integer() && n.get<std::int64_t>() >= 0))
            fail("field '" + std::string(path) + "' must be a non-negative integer");
        return n.get<std::uint64_t>();
    }

    bool boolean(std::string_view path, bool fallback) const
    {
        const json* n = find(path);
        if (!n)
            return fallback;
        if (!n->is_boolean())
            fail("field '" + std::string(path) + "' must be true or false");
        return n->get<bool>();
    }

    std::string string(std::string_view path) const
    {
        const json& n = require(path);
        if (!n.is_string())
            fail("field '" + std::string(path) + "' must be a string");
        return n.get<std::string>();
    }

    Location point(std::string_view path) const
    {
        const json& n = require(path);
        return as_point(n, path);
    }

    Location point(std::string_view path, Location fallback) const
    {
        const json* n = find(path);
        return n ? as_point(*n, path) : fallback;
    }

    // Rejects keys of the object at `path` that are not in `allowed`.
    void only(std::string_view path, std::initializer_list<std::string_view> allowed) const
    {
        const json* n = path.empty() ? &root_ : find(path);
        if (!n)
            return;
        if (!n->is_object())
            fail("field '" + std::string(path) + "' must be an object");
        for (const auto& [key, value] : n->items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                fail("unknown field '" + (path.empty() ? key : std::string(path) + "." + key) + "'");
        }
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError(std::string(source_) + ": " + msg);
    }

 private:
    double as_number(const json& n, std::string_view path) const
    {
        if (!n.is_number())
            fail("field '" + std::string(path) + "' must be a number");
        return n.get<double>();
    }

    std::int64_t as_integer(const json& n, std::string_view path) const
    {
        if (!n.is_number_integer())
            fail("field '" + std::string(path) + "' must be an integer");
        return n.get<std::int64_t>();
    }

    Location as_point(const json& n, std::string_view path) const
    {
        if (!n.is_array() || n.size() != 3 || !n[0].is_number() || !n[1].is_number() ||
            !n[2].is_number())
            fail("field '" + std::string(path) + "' must be an array [x, y, z] in meters");
        return {0, n[0].get<double>(), n[1].get<double>(), n[2].get<double>()};
    }

    const json& root_;
    std::string_view source_;
};

json parse_json(std::string_view text, std::string_view source)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string(source) + ": syntax error: " + e.what());
    }
}

void check_header(const Fields& f, std::string_view format)
{
    const std::string got = f.string("format");
    if (got != format)
        f.fail("field 'format' must be \"" + std::string(format) + "\", got \"" + got + "\"");
    const std::int64_t version = f.integer("version");
    if (version != 1)
        f.fail("unsupported version " + std::to_string(version) + " (expected 1)");
}

template <class F>
void wrap_contract(const Fields& fields, F&& f)
{
    try {
        f();
    } catch (const ConfigError& e) {
        fields.fail(e.what());
    }
}

}  // namespace

std::string_view to_string(MeasurementEncoding e)
{
    return e == MeasurementEncoding::csv ? "csv" : "binary";
}

std::vector<Location> ScenarioConfig::locations() const
{
    return shape == GridShape::hexagonal ? generate_hexagonal_grid(hexagonal)
                                         : generate_triangular_grid(triangular);
}

ScenarioConfig parse_scenario_config(std::string_view text, std::string_view source)
{
    const json root = parse_json(text, source);
    const Fields f(root, source);
    if (!root.is_object())
        f.fail("top level must be an object");
    f.only("", {"format", "version", "seed", "grid", "base_station_m", "link_budget", "frequency",
                "environment", "output"});
    check_header(f, "cdimap-scenario");

    ScenarioConfig cfg;
    if (f.has("seed"))
        cfg.seed = f.unsigned_integer("seed");

    f.only("grid", {"shape", "rows", "cols", "rings", "side_m", "origin_m"});
    const std::string shape = f.string("grid.shape");
    const Location origin = f.point("grid.origin_m", Location{});
    if (shape == "hexagonal") {
        cfg.shape = GridShape::hexagonal;
        cfg.hexagonal.center = origin;
        cfg.hexagonal.rings = static_cast<int>(f.integer("grid.rings"));
        cfg.hexagonal.side = f.number("grid.side_m");
        wrap_contract(f, [&] { cfg.hexagonal.validate(); });
    } else if (shape == "triangular") {
        cfg.shape = GridShape::triangular;
        cfg.triangular.origin = origin;
        cfg.triangular.rows = static_cast<int>(f.integer("grid.rows"));
        cfg.triangular.cols = static_cast<int>(f.integer("grid.cols"));
        cfg.triangular.side = f.number("grid.side_m");
        wrap_contract(f, [&] { cfg.triangular.validate(); });
    } else {
        f.fail("field 'grid.shape' must be \"hexagonal\" or \"triangular\"");
    }

    cfg.base_station = f.point("base_station_m");
    cfg.base_station.id = -1;

    f.only("link_budget", {"gamma_tx", "p_tx_dbm", "bandwidth_hz", "n0_w_per_hz"});
    if (f.has("link_budget.gamma_tx")) {
        cfg.link.gamma_tx = f.number("link_budget.gamma_tx");
        wrap_contract(f, [&] { cfg.link.validate(); });
    } else if (f.has("link_budget.p_tx_dbm")) {
        const double p = f.number("link_budget.p_tx_dbm");
        const double b = f.number("link_budget.bandwidth_hz");
        const double n0 = f.number("link_budget.n0_w_per_hz");
        wrap_contract(f, [&] { cfg.link = LinkBudget::from_power(p, b, n0); });
    } else {
        f.require("link_budget.gamma_tx");
    }

    f.only("frequency", {"f_min_hz", "f_max_hz", "n_points"});
    cfg.frequency.f_min_hz = f.number("frequency.f_min_hz");
    cfg.frequency.f_max_hz = f.number("frequency.f_max_hz");
    const std::int64_t n_points = f.integer("frequency.n_points");
    if (n_points < 2)
        f.fail("field 'frequency.n_points' must be >= 2");
    cfg.frequency.n_points = static_cast<std::size_t>(n_points);
    wrap_contract(f, [&] { cfg.frequency.validate(); });

    f.only("environment", {"scatterers", "line_of_sight", "k_factor_mean_db", "k_factor_std_db",
                           "shadowing_std_db", "correlation_length_m", "delay_spread_min_s",
                           "delay_spread_max_s", "free_space_pathloss", "gain_offset_db",
                           "allow_coarse_frequency_sampling"});
    auto& env = cfg.environment;
    const std::int64_t scatterers = f.integer("environment.scatterers", static_cast<std::int64_t>(env.scatterers));
    if (scatterers < 0)
        f.fail("field 'environment.scatterers' must be >= 0");
    env.scatterers = static_cast<std::size_t>(scatterers);
    env.line_of_sight = f.boolean("environment.line_of_sight", env.line_of_sight);
    env.k_factor_mean_db = f.number("environment.k_factor_mean_db", env.k_factor_mean_db);
    env.k_factor_std_db = f.number("environment.k_factor_std_db", env.k_factor_std_db);
    env.shadowing_std_db = f.number("environment.shadowing_std_db", env.shadowing_std_db);
    env.correlation_length_m = f.number("environment.correlation_length_m", env.correlation_length_m);
    env.delay_spread_min_s = f.number("environment.delay_spread_min_s", env.delay_spread_min_s);
    env.delay_spread_max_s = f.number("environment.delay_spread_max_s", env.delay_spread_max_s);
    env.free_space_pathloss = f.boolean("environment.free_space_pathloss", env.free_space_pathloss);
    env.gain_offset_db = f.number("environment.gain_offset_db", env.gain_offset_db);
    cfg.allow_coarse_frequency_sampling =
        f.boolean("environment.allow_coarse_frequency_sampling", false);
    wrap_contract(f, [&] { env.validate(); });

    f.only("output", {"encoding"});
    if (f.has("output.encoding")) {
        const std::string enc = f.string("output.encoding");
        if (enc == "csv")
            cfg.encoding = MeasurementEncoding::csv;
        else if (enc == "binary")
            cfg.encoding = MeasurementEncoding::binary;
        else
            f.fail("field 'output.encoding' must be \"csv\" or \"binary\"");
    }
    return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path)
{
    std::string text;
    try {
        text = read_file(path);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
    return parse_scenario_config(text, path.string());
}

EvalConfigFile parse_eval_config(std::string_view text, std::string_view source)
{
    const json root = parse_json(text, source);
    const Fields f(root, source);
    if (!root.is_object())
        f.fail("top level must be an object");
    f.only("", {"format", "version", "epsilon", "delta", "train_counts", "repetitions",
                "baseline_samples", "gamma_tx", "seed", "include_genie", "threads", "fit"});
    check_header(f, "cdimap-eval");

    EvalConfigFile out;
    EvalConfig& c = out.config;
    c.epsilon = f.number("epsilon", c.epsilon);
    c.delta = f.number("delta", c.delta);
    if (f.has("train_counts")) {
        const json& tc = f.require("train_counts");
        if (!tc.is_array() || tc.empty())
            f.fail("field 'train_counts' must be a non-empty array of integers");
        c.train_counts.clear();
        for (const auto& v : tc) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
                f.fail("field 'train_counts' must contain positive integers");
            c.train_counts.push_back(v.get<std::size_t>());
        }
    }
    const std::int64_t reps = f.integer("repetitions", static_cast<std::int64_t>(c.repetitions));
    if (reps < 1)
        f.fail("field 'repetitions' must be >= 1");
    c.repetitions = static_cast<std::size_t>(reps);
    const std::int64_t m = f.integer("baseline_samples", static_cast<std::int64_t>(c.baseline_samples));
    if (m < 1)
        f.fail("field 'baseline_samples' must be >= 1");
    c.baseline_samples = static_cast<std::size_t>(m);
    if (f.has("gamma_tx")) {
        c.gamma_tx = f.number("gamma_tx");
        out.has_gamma_tx = true;
    }
    if (f.has("seed")) {
        c.seed = f.unsigned_integer("seed");
        out.has_seed = true;
    }
    c.include_genie = f.boolean("include_genie", c.include_genie);
    const std::int64_t threads = f.integer("threads", 0);
    if (threads < 0)
        f.fail("field 'threads' must be >= 0");
    c.threads = static_cast<unsigned>(threads);

    f.only("fit", {"starts", "max_evaluations", "f_tol", "x_tol", "length_min_m", "length_max_m",
                   "variance_min", "variance_max"});
    const std::int64_t starts = f.integer("fit.starts", static_cast<std::int64_t>(c.fit.starts));
    const std::int64_t evals = f.integer("fit.max_evaluations", static_cast<std::int64_t>(c.fit.max_evaluations));
    if (starts < 1 || evals < 4)
        f.fail("fields 'fit.starts' >= 1 and 'fit.max_evaluations' >= 4 required");
    c.fit.starts = static_cast<std::size_t>(starts);
    c.fit.max_evaluations = static_cast<std::size_t>(evals);
    c.fit.f_tol = f.number("fit.f_tol", c.fit.f_tol);
    c.fit.x_tol = f.number("fit.x_tol", c.fit.x_tol);
    c.fit.box.length_min_m = f.number("fit.length_min_m", c.fit.box.length_min_m);
    c.fit.box.length_max_m = f.number("fit.length_max_m", c.fit.box.length_max_m);
    c.fit.box.variance_min = f.number("fit.variance_min", c.fit.box.variance_min);
    c.fit.box.variance_max = f.number("fit.variance_max", c.fit.box.variance_max);

    if (!(c.epsilon > 0.0 && c.epsilon < 1.0))
        f.fail("field 'epsilon' must lie in (0, 1)");
    if (!(c.delta > 0.0 && c.delta < 1.0))
        f.fail("field 'delta' must lie in (0, 1)");
    return out;
}

EvalConfigFile load_eval_config(const std::filesystem::path& path)
{
    std::string text;
    try {
        text = read_file(path);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
    return parse_eval_config(text, path.string());
}

}  // namespace cdimap
