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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "frespond/errors.hpp"
#include "frespond/geometry.hpp"

namespace frespond {

inline constexpr double deg_per_rad = 180.0 / pi;

/// Angles of a ray relative to an antenna's boresight, in degrees.
/// Azimuth is measured in the horizontal plane, elevation from it.
struct Direction {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

/// Direction of `target` seen from an antenna at `antenna_pos` pointed along `boresight`.
/// `boresight` must not be vertical. Positive azimuth is counter-clockwise seen from above.
inline Direction direction_to(const Point3& antenna_pos, const Point3& boresight, const Point3& target)
{
    const Point3 v = target - antenna_pos;
    const double len = norm(v);
    if (!(len > 0.0))
        throw domain_error("direction_to: zero-length ray");

    const double bl = norm(boresight);
    const Point3 fwd{boresight.x / bl, boresight.y / bl, boresight.z / bl};
    // left = up x fwd, up' = fwd x left
    Point3 left{-fwd.y, fwd.x, 0.0};
    const double ll = norm(left);
    if (!(ll > 0.0))
        throw domain_error("direction_to: vertical boresight has no horizontal reference");
    left = {left.x / ll, left.y / ll, 0.0};
    const Point3 up{fwd.y * left.z - fwd.z * left.y, fwd.z * left.x - fwd.x * left.z, fwd.x * left.y - fwd.y * left.x};

    const double vf = dot(v, fwd);
    const double vl = dot(v, left);
    const double vu = dot(v, up);
    const double horiz = std::hypot(vf, vl);
    Direction dir;
    dir.azimuth_deg = (horiz > 0.0) ? std::atan2(vl, vf) * deg_per_rad : 0.0;
    dir.elevation_deg = std::atan2(vu, horiz) * deg_per_rad;
    return dir;
}

namespace pattern {

struct Isotropic {};

/// Separable angular Gaussian in power: exp(-ln2 [(2 az / hpbw_az)^2 + (2 el / hpbw_el)^2]).
struct GaussianBeam {
    double hpbw_az_deg = 60.0;
    double hpbw_el_deg = 76.0;
};

/// cos^n_az(az) cos^n_el(el) in the forward hemisphere, zero behind.
struct CosinePower {
    double n_az = 1.0;
    double n_el = 1.0;
};

/// Rectangular az x el table, bilinear between nodes, nearest edge outside.
struct Tabulated {
    std::vector<double> az_deg;   // strictly increasing
    std::vector<double> el_deg;   // strictly increasing
    std::vector<double> values;   // row-major [az][el]

    double at(std::size_t ia, std::size_t ie) const { return values[ia * el_deg.size() + ie]; }
};

} // namespace pattern

using PatternKind = std::variant<pattern::Isotropic, pattern::GaussianBeam, pattern::CosinePower, pattern::Tabulated>;

/// Normalized radiation pattern f in [0, 1]. The boresight is fixed when the
/// pattern is attached to a link end, so patterns themselves are orientation-free.
class AntennaPattern {
public:
    AntennaPattern() = default;

    static AntennaPattern isotropic(double gain_dbi = 0.0) { return AntennaPattern(pattern::Isotropic{}, gain_dbi); }

    static AntennaPattern gaussian_beam(double hpbw_az_deg, double hpbw_el_deg, double gain_dbi = 0.0)
    {
        if (!(hpbw_az_deg > 0.0) || !(hpbw_el_deg > 0.0))
            throw validation_error("gaussian beam needs positive half-power beamwidths");
        return AntennaPattern(pattern::GaussianBeam{hpbw_az_deg, hpbw_el_deg}, gain_dbi);
    }

    static AntennaPattern cosine_power(double n_az, double n_el, double gain_dbi = 0.0)
    {
        if (!(n_az >= 0.0) || !(n_el >= 0.0))
            throw validation_error("cosine power exponents must be >= 0");
        return AntennaPattern(pattern::CosinePower{n_az, n_el}, gain_dbi);
    }

    /// Values are clamped to [0, 1]. Throws on NaN cells or a non-rectangular layout.
    static AntennaPattern tabulated(std::vector<double> az_deg, std::vector<double> el_deg, std::vector<double> values,
                                    double gain_dbi = 0.0)
    {
        if (az_deg.empty() || el_deg.empty() || values.size() != az_deg.size() * el_deg.size())
            throw validation_error("tabulated pattern: values must form an az x el grid");
        for (std::size_t k = 1; k < az_deg.size(); ++k)
            if (!(az_deg[k] > az_deg[k - 1]))
                throw validation_error("tabulated pattern: azimuth nodes must be strictly increasing");
        for (std::size_t k = 1; k < el_deg.size(); ++k)
            if (!(el_deg[k] > el_deg[k - 1]))
                throw validation_error("tabulated pattern: elevation nodes must be strictly increasing");
        for (double& v : values) {
            if (std::isnan(v))
                throw validation_error("tabulated pattern: NaN value");
            v = std::clamp(v, 0.0, 1.0);
        }
        return AntennaPattern(pattern::Tabulated{std::move(az_deg), std::move(el_deg), std::move(values)}, gain_dbi);
    }

    const PatternKind& kind() const { return kind_; }
    bool is_isotropic() const { return std::holds_alternative<pattern::Isotropic>(kind_); }
    double gain_dbi() const { return gain_dbi_; }

    double operator()(const Direction& dir) const;

private:
    AntennaPattern(PatternKind kind, double gain_dbi) : kind_(std::move(kind)), gain_dbi_(gain_dbi) {}

    PatternKind kind_ = pattern::Isotropic{};
    double gain_dbi_ = 0.0;
};

namespace detail {

inline double interp_index(const std::vector<double>& nodes, double v, std::size_t& lo)
{
    if (nodes.size() == 1 || v <= nodes.front()) {
        lo = 0;
        return 0.0;
    }
    if (v >= nodes.back()) {
        lo = nodes.size() - 2;
        return 1.0;
    }
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), v);
    lo = static_cast<std::size_t>(it - nodes.begin()) - 1;
    return (v - nodes[lo]) / (nodes[lo + 1] - nodes[lo]);
}

inline double evaluate(const pattern::Isotropic&, const Direction&) { return 1.0; }

inline double evaluate(const pattern::GaussianBeam& g, const Direction& dir)
{
    const double a = 2.0 * dir.azimuth_deg / g.hpbw_az_deg;
    const double e = 2.0 * dir.elevation_deg / g.hpbw_el_deg;
    return std::exp(-std::log(2.0) * (a * a + e * e));
}

inline double evaluate(const pattern::CosinePower& c, const Direction& dir)
{
    if (std::abs(dir.azimuth_deg) >= 90.0 || std::abs(dir.elevation_deg) >= 90.0)
        return 0.0;
    const double ca = std::cos(dir.azimuth_deg / deg_per_rad);
    const double ce = std::cos(dir.elevation_deg / deg_per_rad);
    return std::pow(ca, c.n_az) * std::pow(ce, c.n_el);
}

inline double evaluate(const pattern::Tabulated& t, const Direction& dir)
{
    std::size_t ia = 0;
    std::size_t ie = 0;
    const double fa = interp_index(t.az_deg, dir.azimuth_deg, ia);
    const double fe = interp_index(t.el_deg, dir.elevation_deg, ie);
    const std::size_t ia1 = t.az_deg.size() == 1 ? ia : ia + 1;
    const std::size_t ie1 = t.el_deg.size() == 1 ? ie : ie + 1;
    const double v00 = t.at(ia, ie);
    const double v01 = t.at(ia, ie1);
    const double v10 = t.at(ia1, ie);
    const double v11 = t.at(ia1, ie1);
    const double v = (1.0 - fa) * ((1.0 - fe) * v00 + fe * v01) + fa * ((1.0 - fe) * v10 + fe * v11);
    return std::clamp(v, 0.0, 1.0);
}

} // namespace detail

inline double AntennaPattern::operator()(const Direction& dir) const
{
    return std::visit([&](const auto& k) { return detail::evaluate(k, dir); }, kind_);
}

inline double normalized_gain(const AntennaPattern& pat, const Direction& dir) { return pat(dir); }

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

inline std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline bool parse_double(const std::string& text, double& out)
{
    const std::string t = trim(text);
    if (t.empty())
        return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

} // namespace detail

/// Parses a tabulated pattern from CSV text with header `az_deg,el_deg,f`.
/// The peak is renormalized to exactly 1.
inline AntennaPattern parse_tabulated(std::istream& in, const std::string& origin = "<stream>")
{
    auto fail = [&](std::size_t line, const std::string& what) -> AntennaPattern {
        throw load_error(origin + ":" + std::to_string(line) + ": " + what);
    };

    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    std::map<double, std::map<double, double>> cells;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (detail::trim(line).empty())
            continue;
        const auto parts = detail::split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (parts.size() == 3 && detail::trim(parts[0]) == "az_deg" && detail::trim(parts[1]) == "el_deg" &&
                detail::trim(parts[2]) == "f")
                continue;
            // A header-less file is accepted when the first row is numeric.
        }
        if (parts.size() != 3)
            return fail(lineno, "expected 3 columns, got " + std::to_string(parts.size()));
        double az = 0.0;
        double el = 0.0;
        double f = 0.0;
        if (!detail::parse_double(parts[0], az))
            return fail(lineno, "column 1 (az_deg) is not a number");
        if (!detail::parse_double(parts[1], el))
            return fail(lineno, "column 2 (el_deg) is not a number");
        if (!detail::parse_double(parts[2], f))
            return fail(lineno, "column 3 (f) is not a number");
        if (std::isnan(az) || std::isnan(el) || std::isnan(f))
            return fail(lineno, "NaN value");
        if (f < 0.0 || std::isinf(f))
            return fail(lineno, "column 3 (f) must be finite and >= 0");
        if (az < -180.0 || az > 180.0 || el < -90.0 || el > 90.0)
            return fail(lineno, "angle out of range");
        if (!cells[az].emplace(el, f).second)
            return fail(lineno, "duplicate node (" + parts[0] + ", " + parts[1] + ")");
        ++rows;
    }
    if (rows == 0)
        return fail(lineno, "no pattern rows");

    std::vector<double> az;
    std::vector<double> el;
    for (const auto& [a, col] : cells)
        az.push_back(a);
    for (const auto& [e, v] : cells.begin()->second)
        el.push_back(e);
    for (const auto& [a, col] : cells) {
        if (col.size() != el.size())
            return fail(lineno, "non-rectangular grid: azimuth " + std::to_string(a) + " has " +
                                    std::to_string(col.size()) + " elevations, expected " + std::to_string(el.size()));
        std::size_t k = 0;
        for (const auto& [e, v] : col)
            if (e != el[k++])
                return fail(lineno, "non-rectangular grid: azimuth " + std::to_string(a) +
                                        " has a different elevation set");
    }
    if (az.front() > 0.0 || az.back() < 0.0 || el.front() > 0.0 || el.back() < 0.0)
        return fail(lineno, "table does not cover the boresight direction (0, 0)");

    std::vector<double> values;
    values.reserve(az.size() * el.size());
    double peak = 0.0;
    for (const auto& [a, col] : cells)
        for (const auto& [e, v] : col) {
            values.push_back(v);
            peak = std::max(peak, v);
        }
    if (!(peak > 0.0))
        return fail(lineno, "all pattern values are zero");
    for (double& v : values)
        v /= peak;
    return AntennaPattern::tabulated(std::move(az), std::move(el), std::move(values));
}

inline AntennaPattern load_tabulated(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw load_error("cannot open pattern file " + path);
    return parse_tabulated(in, path);
}

} // namespace frespond
