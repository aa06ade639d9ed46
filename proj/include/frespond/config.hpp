// SPDX-License-Identifier: Apache-2.0
//
// frespond: body-shadowing diffraction and passive detection toolkit
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "frespond/antenna.hpp"
#include "frespond/diffraction.hpp"
#include "frespond/errors.hpp"
#include "frespond/geometry.hpp"
#include "frespond/scenario.hpp"

namespace frespond {

using json = nlohmann::json;

inline constexpr int spec_schema_version = 1;

/// Which antenna pair an experiment uses.
enum class AntennaModel {
    as_specified, // tx/rx exactly as in the spec
    omni,         // isotropic at both ends
    dir,          // spec tx and rx patterns
    mixed,        // spec tx pattern, isotropic rx
};

inline AntennaModel parse_antenna_model(const std::string& s)
{
    if (s == "omni")
        return AntennaModel::omni;
    if (s == "dir")
        return AntennaModel::dir;
    if (s == "mixed")
        return AntennaModel::mixed;
    if (s.empty() || s == "spec")
        return AntennaModel::as_specified;
    throw validation_error("unknown model '" + s + "' (expected omni, dir or mixed)");
}

inline std::string to_string(AntennaModel m)
{
    switch (m) {
    case AntennaModel::omni: return "omni";
    case AntennaModel::dir: return "dir";
    case AntennaModel::mixed: return "mixed";
    default: return "spec";
    }
}

/// 64-bit FNV-1a, used to fingerprint configurations and output files.
inline std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

/// Parsed experiment spec file.
struct ExperimentSpec {
    ScenarioConfig scenario;  // antennas as specified
    AntennaPattern omni_pattern = AntennaPattern::isotropic();
    std::optional<MembershipRule> membership;
    std::optional<double> membership_freq_hz;
    json document;            // normalized input document
    std::string config_hash;  // fnv1a64 of the normalized document

    ScenarioConfig scenario_for(AntennaModel model) const
    {
        ScenarioConfig cfg = scenario;
        switch (model) {
        case AntennaModel::omni:
            cfg.tx_pat = omni_pattern;
            cfg.rx_pat = omni_pattern;
            break;
        case AntennaModel::mixed:
            cfg.rx_pat = omni_pattern;
            break;
        default:
            break;
        }
        return cfg;
    }

    double classification_wavelength() const
    {
        return wavelength_of(membership_freq_hz ? *membership_freq_hz : scenario.mean_frequency());
    }

    MembershipSplit split() const
    {
        if (!membership)
            throw validation_error("/membership: section required for detection");
        return classify_positions(scenario.grid, scenario.geom, classification_wavelength(), *membership);
    }
};

namespace detail {

/// Reads one JSON object, tracking consumed keys so leftovers can be rejected.
class StrictObject {
public:
    StrictObject(const json& j, std::string pointer) : j_(j), ptr_(std::move(pointer))
    {
        if (!j.is_object())
            fail(ptr_, "expected an object");
    }

    [[noreturn]] static void fail(const std::string& ptr, const std::string& what)
    {
        throw validation_error((ptr.empty() ? std::string("/") : ptr) + ": " + what);
    }

    std::string path(const std::string& key) const { return ptr_ + "/" + key; }
    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            fail(path(key), "required key is missing");
        return j_.at(key);
    }

    double number(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_number())
            fail(path(key), "expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : touch(key, fallback); }

    std::int64_t integer(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_number_integer())
            fail(path(key), "expected an integer");
        return v.get<std::int64_t>();
    }
    std::int64_t integer(const std::string& key, std::int64_t fallback)
    {
        return has(key) ? integer(key) : touch(key, fallback);
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
    {
        if (!has(key))
            return touch(key, fallback);
        const json& v = raw(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            fail(path(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string string(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_string())
            fail(path(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<int> id_list(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_array())
            fail(path(key), "expected an array of position ids");
        std::vector<int> ids;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer())
                fail(path(key) + "/" + std::to_string(i), "expected an integer");
            ids.push_back(v[i].get<int>());
        }
        return ids;
    }

    std::vector<double> number_list(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_array())
            fail(path(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                fail(path(key) + "/" + std::to_string(i), "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    StrictObject object(const std::string& key) { return {raw(key), path(key)}; }

    /// Rejects keys that were never read.
    void finish() const
    {
        for (const auto& [key, value] : j_.items())
            if (seen_.count(key) == 0)
                fail(path(key), "unknown key");
    }

    const std::string& pointer() const { return ptr_; }

private:
    template <class T>
    T touch(const std::string& key, T v)
    {
        seen_.insert(key);
        return v;
    }

    const json& j_;
    std::string ptr_;
    std::set<std::string> seen_;
};

template <class Fn>
auto rethrow_at(const std::string& ptr, Fn&& fn)
{
    try {
        return fn();
    } catch (const load_error&) {
        throw;
    } catch (const validation_error& e) {
        const std::string what = e.what();
        if (!what.empty() && what.front() == '/')
            throw;
        throw validation_error(ptr + ": " + what);
    }
}

inline AntennaPattern parse_pattern(StrictObject obj, const std::filesystem::path& base_dir)
{
    const std::string kind = obj.string("kind");
    const double gain = obj.number("gain_dbi", 0.0);
    AntennaPattern p;
    if (kind == "isotropic") {
        p = AntennaPattern::isotropic(gain);
    } else if (kind == "gaussian_beam") {
        const double az = obj.number("hpbw_az_deg");
        const double el = obj.number("hpbw_el_deg");
        p = rethrow_at(obj.pointer(), [&] { return AntennaPattern::gaussian_beam(az, el, gain); });
    } else if (kind == "cosine_power") {
        const double na = obj.number("n_az");
        const double ne = obj.number("n_el");
        p = rethrow_at(obj.pointer(), [&] { return AntennaPattern::cosine_power(na, ne, gain); });
    } else if (kind == "tabulated") {
        std::filesystem::path file = obj.string("path");
        if (file.is_relative())
            file = base_dir / file;
        p = load_tabulated(file.string());
    } else {
        StrictObject::fail(obj.path("kind"),
                           "unknown pattern kind '" + kind + "' (isotropic, gaussian_beam, cosine_power, tabulated)");
    }
    obj.finish();
    return p;
}

inline MembershipRule parse_membership(StrictObject obj, double body_width_m, std::optional<double>& freq_hz)
{
    const std::string rule = obj.string("rule");
    if (obj.has("freq_hz")) {
        freq_hz = obj.number("freq_hz");
        if (!(*freq_hz > 0.0))
            StrictObject::fail(obj.path("freq_hz"), "must be > 0");
    }
    MembershipRule out;
    if (rule == "barycenter") {
        out = membership::Barycenter{};
    } else if (rule == "sheet_overlap") {
        out = membership::SheetOverlap{body_width_m, obj.number("margin_m", 0.0)};
    } else if (rule == "fresnel_band") {
        membership::FresnelBand b{obj.number("inside_scale"), obj.number("outside_scale")};
        if (!(b.inside_scale > 0.0) || b.outside_scale < b.inside_scale)
            StrictObject::fail(obj.pointer(), "fresnel_band needs 0 < inside_scale <= outside_scale");
        out = b;
    } else if (rule == "explicit") {
        out = membership::Explicit{obj.id_list("inside_ids"), obj.id_list("outside_ids")};
    } else {
        StrictObject::fail(obj.path("rule"),
                           "unknown rule '" + rule + "' (barycenter, sheet_overlap, fresnel_band, explicit)");
    }
    obj.finish();
    return out;
}

} // namespace detail

inline ExperimentSpec parse_experiment_spec(const json& doc, const std::filesystem::path& base_dir = ".")
{
    using detail::StrictObject;
    ExperimentSpec spec;
    StrictObject root(doc, "");

    const auto version = root.integer("schema");
    if (version != spec_schema_version)
        StrictObject::fail("/schema", "unsupported schema version " + std::to_string(version));

    ScenarioConfig& cfg = spec.scenario;
    {
        auto link = root.object("link");
        const double d = link.number("d_m");
        const double h = link.number("h_m");
        link.finish();
        cfg.geom = detail::rethrow_at("/link", [&] { return LinkGeometry(d, h); });
    }
    {
        auto body = root.object("body");
        cfg.body_height_m = body.number("height_m");
        cfg.body_width_m = body.number("width_m");
        body.finish();
        if (!(cfg.body_height_m > 0.0) || !(cfg.body_width_m > 0.0))
            StrictObject::fail("/body", "height_m and width_m must be > 0");
    }
    {
        auto grid = root.object("grid");
        const auto n_along = grid.integer("n_along");
        const auto n_across = grid.integer("n_across");
        const double sa = grid.number("spacing_along_m");
        const double sx = grid.number("spacing_across_m");
        const double ox = grid.number("origin_x_m");
        grid.finish();
        if (n_along < 1 || n_across < 1)
            StrictObject::fail("/grid", "empty grid: n_along and n_across must be >= 1");
        cfg.grid = detail::rethrow_at("/grid", [&] {
            return MeasurementGrid(static_cast<int>(n_along), static_cast<int>(n_across), sa, sx, ox);
        });
    }
    {
        auto ant = root.object("antennas");
        cfg.tx_pat = detail::parse_pattern(ant.object("tx"), base_dir);
        cfg.rx_pat = detail::parse_pattern(ant.object("rx"), base_dir);
        if (ant.has("omni"))
            spec.omni_pattern = detail::parse_pattern(ant.object("omni"), base_dir);
        ant.finish();
    }
    {
        auto fr = root.object("frequencies");
        if (fr.has("list_hz")) {
            cfg.freqs = fr.number_list("list_hz");
            if (cfg.freqs.empty())
                StrictObject::fail(fr.path("list_hz"), "needs at least one frequency");
        } else {
            const double start = fr.number("start_hz");
            const double stop = fr.number("stop_hz");
            const auto count = fr.integer("count");
            cfg.freqs = detail::rethrow_at("/frequencies",
                                           [&] { return frequency_sweep(start, stop, static_cast<int>(count)); });
        }
        fr.finish();
        for (double f : cfg.freqs)
            if (!(f > 0.0))
                StrictObject::fail("/frequencies", "frequencies must be > 0");
    }
    if (root.has("jitter")) {
        auto j = root.object("jitter");
        cfg.jitter.delta_m = j.number("delta_m", cfg.jitter.delta_m);
        cfg.jitter.n_p = static_cast<int>(j.integer("n_p", cfg.jitter.n_p));
        cfg.jitter.seed = j.unsigned_integer("seed", cfg.jitter.seed);
        j.finish();
        if (cfg.jitter.n_p < 1)
            StrictObject::fail("/jitter/n_p", "must be >= 1");
        if (!(cfg.jitter.delta_m >= 0.0))
            StrictObject::fail("/jitter/delta_m", "must be >= 0");
    }
    if (root.has("quadrature")) {
        auto q = root.object("quadrature");
        cfg.quad.step_m = q.number("step_m", 0.0);
        cfg.quad.max_phase_step_rad = q.number("max_phase_step_rad", cfg.quad.max_phase_step_rad);
        cfg.quad.max_samples = q.unsigned_integer("max_samples", cfg.quad.max_samples);
        q.finish();
        if (cfg.quad.step_m < 0.0)
            StrictObject::fail("/quadrature/step_m", "must be >= 0 (0 selects automatic sizing)");
        if (!(cfg.quad.max_phase_step_rad > 0.0))
            StrictObject::fail("/quadrature/max_phase_step_rad", "must be > 0");
    }
    if (root.has("noise")) {
        auto n = root.object("noise");
        cfg.noise.sigma0_db = n.number("sigma0_db", 0.0);
        cfg.noise.delta_h_t_db = n.number("delta_h_t_db", 0.0);
        cfg.noise.delta_sigma_t_db = n.number("delta_sigma_t_db", 0.0);
        n.finish();
        if (cfg.noise.sigma0_db < 0.0 || cfg.noise.delta_sigma_t_db < 0.0)
            StrictObject::fail("/noise", "deviations must be >= 0");
    }
    if (root.has("diffraction")) {
        auto d = root.object("diffraction");
        cfg.diffraction.attenuation_cap_db = d.number("attenuation_cap_db", cfg.diffraction.attenuation_cap_db);
        cfg.diffraction.near_field_directional_m =
            d.number("near_field_directional_m", cfg.diffraction.near_field_directional_m);
        cfg.diffraction.near_field_omni_m = d.number("near_field_omni_m", cfg.diffraction.near_field_omni_m);
        d.finish();
    }
    if (root.has("membership"))
        spec.membership = detail::parse_membership(root.object("membership"), cfg.body_width_m,
                                                   spec.membership_freq_hz);
    root.finish();

    spec.document = doc;
    spec.config_hash = hex64(fnv1a64(doc.dump()));
    return spec;
}

/// Line and column (1-based) of a byte offset in `text`.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline json parse_json_text(const std::string& text, const std::string& origin)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // byte is 1-based and points at the offending character.
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, col] = line_column(text, offset);
        throw validation_error(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                               ": JSON parse error: " + e.what());
    }
}

inline ExperimentSpec load_experiment_spec(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw validation_error("cannot open spec file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const json doc = parse_json_text(ss.str(), path.string());
    return parse_experiment_spec(doc, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

} // namespace frespond
