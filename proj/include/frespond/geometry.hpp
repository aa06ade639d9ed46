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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "frespond/errors.hpp"

namespace frespond {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double speed_of_light = 299'792'458.0; // m/s

inline double wavelength_of(double freq_hz) { return speed_of_light / freq_hz; }

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend bool operator==(const Point3&, const Point3&) = default;
};

inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }

/// Canonical link frame: x along the LOS from TX, y lateral, z up from the floor.
/// TX sits at (0, 0, h) and RX at (d, 0, h).
class LinkGeometry {
public:
    LinkGeometry(double d_m, double h_m) : d_(d_m), h_(h_m)
    {
        if (!(d_m > 0.0) || !std::isfinite(d_m))
            throw validation_error("link length d must be > 0, got " + std::to_string(d_m));
        if (!(h_m >= 0.0) || !std::isfinite(h_m))
            throw validation_error("LOS height h must be >= 0, got " + std::to_string(h_m));
    }

    double d() const { return d_; }
    double h() const { return h_; }
    Point3 tx_pos() const { return {0.0, 0.0, h_}; }
    Point3 rx_pos() const { return {d_, 0.0, h_}; }

    friend bool operator==(const LinkGeometry&, const LinkGeometry&) = default;

private:
    double d_;
    double h_;
};

/// Absorbing rectangle standing on the floor, orthogonal to the LOS.
/// Covers z in [0, H] and lateral offsets [y - W/2, y + W/2] in the plane at abscissa x.
struct BodySheet {
    double height_m = 0.0;
    double width_m = 0.0;
    double x_m = 0.0;
    double y_m = 0.0;

    BodySheet() = default;
    BodySheet(double height, double width, double x, double y) : height_m(height), width_m(width), x_m(x), y_m(y)
    {
        if (!(height > 0.0) || !(width > 0.0))
            throw validation_error("body sheet needs H > 0 and W > 0");
    }

    BodySheet moved_to(double x, double y) const { return {height_m, width_m, x, y}; }
    BodySheet mirrored_lateral() const { return {height_m, width_m, x_m, -y_m}; }
};

struct GridPosition {
    int id = 0; // 1-based
    double x_m = 0.0;
    double y_m = 0.0;
};

/// Rectangular grid of marked target positions, numbered column-major:
/// ids 1..n_across form the column closest to TX, lateral offset increasing with id.
class MeasurementGrid {
public:
    MeasurementGrid(int n_along, int n_across, double spacing_along_m, double spacing_across_m, double origin_x_m)
        : n_along_(n_along), n_across_(n_across), spacing_along_(spacing_along_m),
          spacing_across_(spacing_across_m), origin_x_(origin_x_m)
    {
        if (n_along < 1 || n_across < 1)
            throw validation_error("measurement grid must have at least one position");
        if (!(spacing_along_m > 0.0) || !(spacing_across_m > 0.0))
            throw validation_error("grid spacings must be > 0");
        positions_.reserve(static_cast<std::size_t>(n_along) * static_cast<std::size_t>(n_across));
        const double centre = 0.5 * static_cast<double>(n_across - 1);
        for (int c = 0; c < n_along; ++c) {
            for (int i = 0; i < n_across; ++i) {
                GridPosition p;
                p.id = c * n_across + i + 1;
                p.x_m = origin_x_ + static_cast<double>(c) * spacing_along_;
                p.y_m = (static_cast<double>(i) - centre) * spacing_across_;
                positions_.push_back(p);
            }
        }
    }

    /// 15 x 5 marks, 0.25 m along and 0.30 m across, first column 0.25 m from TX.
    static MeasurementGrid paper_default() { return {15, 5, 0.25, 0.30, 0.25}; }

    int n_along() const { return n_along_; }
    int n_across() const { return n_across_; }
    double spacing_along() const { return spacing_along_; }
    double spacing_across() const { return spacing_across_; }
    double origin_x() const { return origin_x_; }
    const std::vector<GridPosition>& positions() const { return positions_; }
    std::size_t size() const { return positions_.size(); }

    bool contains(int id) const { return id >= 1 && id <= static_cast<int>(positions_.size()); }
    const GridPosition& at(int id) const
    {
        if (!contains(id))
            throw validation_error("position id " + std::to_string(id) + " is not on the grid");
        return positions_[static_cast<std::size_t>(id - 1)];
    }

    /// Ids of the 1-based column `column` (constant x).
    std::vector<int> column_ids(int column) const
    {
        if (column < 1 || column > n_along_)
            throw validation_error("column " + std::to_string(column) + " outside 1.." + std::to_string(n_along_));
        std::vector<int> ids;
        for (int i = 0; i < n_across_; ++i)
            ids.push_back((column - 1) * n_across_ + i + 1);
        return ids;
    }

private:
    int n_along_;
    int n_across_;
    double spacing_along_;
    double spacing_across_;
    double origin_x_;
    std::vector<GridPosition> positions_;
};

/// First Fresnel zone radius sqrt(lambda d1 d2 / d) at abscissa x.
inline double fresnel_radius(const LinkGeometry& geom, double x_m, double wavelength_m)
{
    if (!(x_m > 0.0 && x_m < geom.d()))
        throw domain_error("fresnel_radius: x = " + std::to_string(x_m) + " outside (0, d)");
    if (!(wavelength_m > 0.0))
        throw domain_error("fresnel_radius: wavelength must be > 0");
    const double d1 = x_m;
    const double d2 = geom.d() - x_m;
    return std::sqrt(wavelength_m * d1 * d2 / geom.d());
}

namespace membership {

/// Inside iff the barycenter lies within the first Fresnel radius.
struct Barycenter {};

/// Inside iff the near sheet edge overlaps the zone; outside iff it clears the zone by more than `margin_m`.
struct SheetOverlap {
    double width_m = 0.0;
    double margin_m = 0.0;
};

/// Inside iff |y| < inside_scale * r(x); outside iff |y| > outside_scale * r(x); else excluded.
struct FresnelBand {
    double inside_scale = 1.0;
    double outside_scale = 1.0;
};

struct Explicit {
    std::vector<int> inside_ids;
    std::vector<int> outside_ids;
};

} // namespace membership

using MembershipRule = std::variant<membership::Barycenter, membership::SheetOverlap, membership::FresnelBand,
                                    membership::Explicit>;

/// Partition of grid ids into F1 (inside), F0 (outside) and excluded.
struct MembershipSplit {
    std::set<int> inside_ids;
    std::set<int> outside_ids;
    std::set<int> excluded_ids;
};

inline MembershipSplit classify_positions(const MeasurementGrid& grid, const LinkGeometry& geom, double wavelength_m,
                                          const MembershipRule& rule)
{
    MembershipSplit split;
    if (grid.size() == 0)
        throw validation_error("classify_positions: empty grid");

    // Positions outside (0, d) have no Fresnel zone and are outside.
    auto radius_at = [&](const GridPosition& p) {
        return (p.x_m > 0.0 && p.x_m < geom.d()) ? fresnel_radius(geom, p.x_m, wavelength_m) : -1.0;
    };

    if (const auto* ex = std::get_if<membership::Explicit>(&rule)) {
        for (int id : ex->inside_ids) {
            if (!grid.contains(id))
                throw validation_error("explicit membership: inside id " + std::to_string(id) + " is not on the grid");
            split.inside_ids.insert(id);
        }
        for (int id : ex->outside_ids) {
            if (!grid.contains(id))
                throw validation_error("explicit membership: outside id " + std::to_string(id) + " is not on the grid");
            if (split.inside_ids.count(id) != 0)
                throw validation_error("explicit membership: id " + std::to_string(id) + " is both inside and outside");
            split.outside_ids.insert(id);
        }
        for (const auto& p : grid.positions())
            if (split.inside_ids.count(p.id) == 0 && split.outside_ids.count(p.id) == 0)
                split.excluded_ids.insert(p.id);
        return split;
    }

    for (const auto& p : grid.positions()) {
        const double r = radius_at(p);
        const double ay = std::abs(p.y_m);
        if (const auto* so = std::get_if<membership::SheetOverlap>(&rule)) {
            const double gap = ay - 0.5 * so->width_m;
            if (r >= 0.0 && gap < r)
                split.inside_ids.insert(p.id);
            else if (r < 0.0 || gap > r + so->margin_m)
                split.outside_ids.insert(p.id);
            else
                split.excluded_ids.insert(p.id);
        } else if (const auto* fb = std::get_if<membership::FresnelBand>(&rule)) {
            if (r >= 0.0 && ay < fb->inside_scale * r)
                split.inside_ids.insert(p.id);
            else if (r < 0.0 || ay > fb->outside_scale * r)
                split.outside_ids.insert(p.id);
            else
                split.excluded_ids.insert(p.id);
        } else {
            if (r >= 0.0 && ay < r)
                split.inside_ids.insert(p.id);
            else
                split.outside_ids.insert(p.id);
        }
    }
    return split;
}

/// Midpoint-rule tiling of a body sheet. Cell (i, j) has its center at
/// (x, y - W/2 + (j + 1/2) dy, (i + 1/2) dz) and area dy * dz.
struct SheetTiling {
    double x_m = 0.0;
    double y0_m = 0.0;
    double dy_m = 0.0;
    double dz_m = 0.0;
    std::size_t n_lateral = 0;
    std::size_t n_vertical = 0;

    std::size_t size() const { return n_lateral * n_vertical; }
    double cell_area() const { return dy_m * dz_m; }
    double lateral(std::size_t j) const { return y0_m + (static_cast<double>(j) + 0.5) * dy_m; }
    double vertical(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dz_m; }
    Point3 center(std::size_t i, std::size_t j) const { return {x_m, lateral(j), vertical(i)}; }
};

namespace detail {
inline std::size_t cells_for(double extent, double step)
{
    // Tolerate round-off so that 0.55 / 0.01 yields 55 cells, not 56.
    const double n = std::ceil(extent / step - 1e-9);
    return n < 1.0 ? std::size_t{1} : static_cast<std::size_t>(n);
}
} // namespace detail

inline SheetTiling tile_sheet(const BodySheet& sheet, double step_m)
{
    if (!(step_m > 0.0))
        throw domain_error("sheet tiling step must be > 0");
    SheetTiling t;
    t.x_m = sheet.x_m;
    t.y0_m = sheet.y_m - 0.5 * sheet.width_m;
    t.n_lateral = detail::cells_for(sheet.width_m, step_m);
    t.n_vertical = detail::cells_for(sheet.height_m, step_m);
    t.dy_m = sheet.width_m / static_cast<double>(t.n_lateral);
    t.dz_m = sheet.height_m / static_cast<double>(t.n_vertical);
    return t;
}

struct SheetSample {
    Point3 point;
    double area_m2 = 0.0;
};

/// Midpoint sample centers covering the sheet exactly; the areas sum to H * W.
inline std::vector<SheetSample> sheet_sample_points(const BodySheet& sheet, double step_m)
{
    const SheetTiling t = tile_sheet(sheet, step_m);
    std::vector<SheetSample> out;
    out.reserve(t.size());
    for (std::size_t i = 0; i < t.n_vertical; ++i)
        for (std::size_t j = 0; j < t.n_lateral; ++j)
            out.push_back({t.center(i, j), t.cell_area()});
    return out;
}

/// Smallest distance from `p` to any point of the sheet.
inline double distance_to_sheet(const BodySheet& sheet, const Point3& p)
{
    const double cy = std::clamp(p.y, sheet.y_m - 0.5 * sheet.width_m, sheet.y_m + 0.5 * sheet.width_m);
    const double cz = std::clamp(p.z, 0.0, sheet.height_m);
    return norm(Point3{sheet.x_m, cy, cz} - p);
}

} // namespace frespond
