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

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>
#include <string>

#include "cdimap/error.hpp"
#include "cdimap/io.hpp"

namespace cdimap {

namespace {

constexpr std::string_view kCsvMagic = "# cdimap measurement v1";
constexpr std::string_view kCsvHeader = "location_id,x_m,y_m,z_m,f_min_hz,f_max_hz,n_points";
constexpr std::string_view kBinaryMagic = "CDIMEAS1";
constexpr std::size_t kBinaryHeaderBytes = 64;

void put_u64(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v)
{
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t get_u64(std::string_view bytes, std::size_t offset)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    return v;
}

double get_f64(std::string_view bytes, std::size_t offset)
{
    return std::bit_cast<double>(get_u64(bytes, offset));
}

// Line reader over a text buffer, tracking line numbers for diagnostics.
class Lines {
 public:
    explicit Lines(std::string_view text) : text_(text) {}

    bool next(std::string_view& line)
    {
        if (pos_ >= text_.size())
            return false;
        const std::size_t end = text_.find('\n', pos_);
        line = text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        pos_ = end == std::string_view::npos ? text_.size() : end + 1;
        ++number_;
        return true;
    }

    std::size_t number() const { return number_; }

 private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t number_ = 0;
};

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t p = s.find(sep, start);
        out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos)
            break;
        start = p + 1;
    }
    return out;
}

std::int64_t parse_int(std::string_view s, std::string_view what)
{
    const double v = parse_double(s, what);
    if (v != std::floor(v) || std::abs(v) > 9.0e15)
        throw FormatError(std::string(what) + ": expected an integer, got '" + std::string(s) + "'");
    return static_cast<std::int64_t>(v);
}

std::string where(std::string_view source, std::size_t line)
{
    return std::string(source) + ":" + std::to_string(line);
}

Measurement decode_binary(std::string_view bytes, std::string_view source)
{
    if (bytes.size() < kBinaryHeaderBytes)
        throw FormatError(std::string(source) + ": truncated binary header");
    Measurement m;
    m.location.id = static_cast<int>(static_cast<std::int64_t>(get_u64(bytes, 8)));
    m.location.x = get_f64(bytes, 16);
    m.location.y = get_f64(bytes, 24);
    m.location.z = get_f64(bytes, 32);
    m.sweep.grid.f_min_hz = get_f64(bytes, 40);
    m.sweep.grid.f_max_hz = get_f64(bytes, 48);
    const std::uint64_t n = get_u64(bytes, 56);
    if (n > (bytes.size() - kBinaryHeaderBytes) / 16 || bytes.size() != kBinaryHeaderBytes + 16 * n)
        throw FormatError(std::string(source) + ": payload size does not match n_points = " +
                          std::to_string(n));
    m.sweep.grid.n_points = static_cast<std::size_t>(n);
    m.sweep.values.resize(m.sweep.grid.n_points);
    for (std::size_t i = 0; i < m.sweep.grid.n_points; ++i) {
        const std::size_t off = kBinaryHeaderBytes + 16 * i;
        m.sweep.values[i] = {get_f64(bytes, off), get_f64(bytes, off + 8)};
    }
    return m;
}

Measurement decode_csv(std::string_view text, std::string_view source)
{
    Lines lines(text);
    std::string_view line;
    auto expect = [&](std::string_view want) {
        if (!lines.next(line) || line != want)
            throw FormatError(where(source, lines.number()) + ": expected '" + std::string(want) + "'");
    };
    expect(kCsvMagic);
    expect(kCsvHeader);
    if (!lines.next(line))
        throw FormatError(where(source, lines.number()) + ": missing header values");
    const auto h = split(line, ',');
    if (h.size() != 7)
        throw FormatError(where(source, lines.number()) + ": header needs 7 values, got " +
                          std::to_string(h.size()));
    const std::string at = where(source, lines.number());
    Measurement m;
    m.location.id = static_cast<int>(parse_int(h[0], at));
    m.location.x = parse_double(h[1], at);
    m.location.y = parse_double(h[2], at);
    m.location.z = parse_double(h[3], at);
    m.sweep.grid.f_min_hz = parse_double(h[4], at);
    m.sweep.grid.f_max_hz = parse_double(h[5], at);
    const std::int64_t n = parse_int(h[6], at);
    if (n < 0)
        throw FormatError(at + ": negative n_points");
    m.sweep.grid.n_points = static_cast<std::size_t>(n);
    expect("re,im");
    m.sweep.values.reserve(m.sweep.grid.n_points);
    while (lines.next(line)) {
        if (line.empty())
            continue;
        const auto f = split(line, ',');
        const std::string here = where(source, lines.number());
        if (f.size() != 2)
            throw FormatError(here + ": expected 're,im'");
        m.sweep.values.emplace_back(parse_double(f[0], here), parse_double(f[1], here));
    }
    if (m.sweep.values.size() != m.sweep.grid.n_points)
        throw FormatError(std::string(source) + ": header says " + std::to_string(n) +
                          " points, file has " + std::to_string(m.sweep.values.size()));
    return m;
}

}  // namespace

std::string encode_measurement_csv(const Measurement& m)
{
    m.sweep.validate();
    std::string out;
    out.reserve(48 * m.sweep.values.size() + 256);
    out += kCsvMagic;
    out += '\n';
    out += kCsvHeader;
    out += '\n';
    out += std::to_string(m.location.id) + "," + format_double(m.location.x) + "," +
           format_double(m.location.y) + "," + format_double(m.location.z) + "," +
           format_double(m.sweep.grid.f_min_hz) + "," + format_double(m.sweep.grid.f_max_hz) + "," +
           std::to_string(m.sweep.grid.n_points) + "\n";
    out += "re,im\n";
    for (const auto& v : m.sweep.values) {
        out += format_double(v.real());
        out += ',';
        out += format_double(v.imag());
        out += '\n';
    }
    return out;
}

std::string encode_measurement_binary(const Measurement& m)
{
    m.sweep.validate();
    std::string out;
    out.reserve(kBinaryHeaderBytes + 16 * m.sweep.values.size());
    out += kBinaryMagic;
    put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(m.location.id)));
    put_f64(out, m.location.x);
    put_f64(out, m.location.y);
    put_f64(out, m.location.z);
    put_f64(out, m.sweep.grid.f_min_hz);
    put_f64(out, m.sweep.grid.f_max_hz);
    put_u64(out, m.sweep.grid.n_points);
    for (const auto& v : m.sweep.values) {
        put_f64(out, v.real());
        put_f64(out, v.imag());
    }
    return out;
}

Measurement decode_measurement(std::string_view bytes, std::string_view source)
{
    Measurement m = bytes.substr(0, kBinaryMagic.size()) == kBinaryMagic ? decode_binary(bytes, source)
                                                                         : decode_csv(bytes, source);
    try {
        m.sweep.validate();
    } catch (const Error& e) {
        throw FormatError(std::string(source) + ": " + e.what());
    }
    return m;
}

Measurement read_measurement(const std::filesystem::path& path)
{
    return decode_measurement(read_file(path), path.string());
}

std::string encode_manifest(const MeasurementManifest& m)
{
    std::ostringstream os;
    os << "cdimap-manifest " << m.version << "\n";
    os << "encoding " << to_string(m.encoding) << "\n";
    if (m.base_station)
        os << "base_station " << format_double(m.base_station->x) << " "
           << format_double(m.base_station->y) << " " << format_double(m.base_station->z) << "\n";
    if (m.gamma_tx)
        os << "gamma_tx " << format_double(*m.gamma_tx) << "\n";
    os << "locations " << m.entries.size() << "\n";
    os << "# id x_m y_m z_m file\n";
    for (const auto& e : m.entries)
        os << e.location.id << " " << format_double(e.location.x) << " "
           << format_double(e.location.y) << " " << format_double(e.location.z) << " " << e.file
           << "\n";
    return os.str();
}

MeasurementManifest decode_manifest(std::string_view text, std::string_view source)
{
    MeasurementManifest m;
    Lines lines(text);
    std::string_view line;
    std::optional<std::size_t> expected;
    bool header = false;
    while (lines.next(line)) {
        if (line.empty() || line.front() == '#')
            continue;
        const auto w = split(line, ' ');
        const std::string at = where(source, lines.number());
        if (!header) {
            if (w.size() != 2 || w[0] != "cdimap-manifest")
                throw FormatError(at + ": expected 'cdimap-manifest <version>'");
            m.version = static_cast<int>(parse_int(w[1], at));
            if (m.version != 1)
                throw FormatError(at + ": unsupported manifest version " + std::to_string(m.version));
            header = true;
        } else if (w[0] == "encoding" && w.size() == 2) {
            if (w[1] == "csv")
                m.encoding = MeasurementEncoding::csv;
            else if (w[1] == "binary")
                m.encoding = MeasurementEncoding::binary;
            else
                throw FormatError(at + ": unknown encoding '" + std::string(w[1]) + "'");
        } else if (w[0] == "base_station" && w.size() == 4) {
            m.base_station = Location{-1, parse_double(w[1], at), parse_double(w[2], at),
                                      parse_double(w[3], at)};
        } else if (w[0] == "gamma_tx" && w.size() == 2) {
            m.gamma_tx = parse_double(w[1], at);
        } else if (w[0] == "locations" && w.size() == 2) {
            expected = static_cast<std::size_t>(parse_int(w[1], at));
        } else if (w.size() == 5) {
            m.entries.push_back({{static_cast<int>(parse_int(w[0], at)), parse_double(w[1], at),
                                  parse_double(w[2], at), parse_double(w[3], at)},
                                 std::string(w[4])});
        } else {
            throw FormatError(at + ": cannot parse manifest line '" + std::string(line) + "'");
        }
    }
    if (!header)
        throw FormatError(std::string(source) + ": empty manifest");
    if (!expected)
        throw FormatError(std::string(source) + ": missing 'locations <n>' line");
    if (*expected != m.entries.size())
        throw FormatError(std::string(source) + ": 'locations " + std::to_string(*expected) +
                          "' but " + std::to_string(m.entries.size()) + " entries listed");
    return m;
}

MeasurementSet read_measurement_set(const std::filesystem::path& dir)
{
    MeasurementSet set;
    const auto manifest_path = dir / kManifestName;
    set.manifest = decode_manifest(read_file(manifest_path), manifest_path.string());
    for (const auto& e : set.manifest.entries) {
        const auto path = dir / e.file;
        try {
            Measurement m = read_measurement(path);
            if (m.location.id != e.location.id)
                throw FormatError(path.string() + ": location id " + std::to_string(m.location.id) +
                                  " does not match manifest id " + std::to_string(e.location.id));
            set.measurements.push_back(std::move(m));
        } catch (const Error& err) {
            set.errors.push_back(err.what());
        }
    }
    return set;
}

World world_from_measurements(const std::vector<Measurement>& measurements)
{
    World w;
    w.locations.reserve(measurements.size());
    w.samples.reserve(measurements.size());
    for (const auto& m : measurements) {
        w.locations.push_back(m.location);
        w.samples.push_back(fading_samples_from_cfr(m.sweep, m.location.id));
    }
    return w;
}

}  // namespace cdimap
