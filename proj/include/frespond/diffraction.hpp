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
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "frespond/antenna.hpp"
#include "frespond/errors.hpp"
#include "frespond/geometry.hpp"
#include "frespond/parallel.hpp"

namespace frespond {

/// Midpoint-rule quadrature over the sheet. A positive `step_m` fixes the
/// cell size; otherwise the step is resolved from `max_phase_step_rad`.
struct QuadratureSpec {
    double step_m = 0.0;
    double max_phase_step_rad = pi / 8.0;
    std::size_t max_samples = 400'000'000;

    static QuadratureSpec fixed(double step)
    {
        QuadratureSpec q;
        q.step_m = step;
        return q;
    }
    static QuadratureSpec automatic(double max_phase_step = pi / 8.0)
    {
        QuadratureSpec q;
        q.max_phase_step_rad = max_phase_step;
        return q;
    }
    bool is_auto() const { return !(step_m > 0.0); }
};

struct DiffractionOptions {
    double attenuation_cap_db = 150.0;
    double near_field_directional_m = 0.25;
    double near_field_omni_m = 0.15;
    unsigned threads = 1;
};

/// -10 log10 |v|^2, saturating at `cap_db` (including |v| = 0).
inline double attenuation_db(std::complex<double> value, double cap_db = 150.0)
{
    const double p = std::norm(value);
    if (!(p > 0.0))
        return cap_db;
    return std::min(cap_db, -10.0 * std::log10(p));
}

/// E/E0 (or V/V0) together with its extra-attenuation in dB.
struct FieldRatio {
    std::complex<double> value{1.0, 0.0};
    double attenuation_db = 0.0;
    bool near_field = false;

    static FieldRatio from(std::complex<double> v, double cap_db = 150.0)
    {
        return {v, frespond::attenuation_db(v, cap_db), false};
    }
};

inline double attenuation_db(const FieldRatio& ratio, double cap_db = 150.0)
{
    return attenuation_db(ratio.value, cap_db);
}

/// Largest in-plane gradient of the excess path r1 + r2 - d over the sheet.
/// Both in-plane gradients equal the transverse offset rho, so |grad| =
/// rho (1/r1 + 1/r2), which grows with rho and peaks at the far corner.
inline double max_excess_gradient(const LinkGeometry& geom, const BodySheet& sheet)
{
    const double x = sheet.x_m;
    const double dy = std::max(std::abs(sheet.y_m - 0.5 * sheet.width_m), std::abs(sheet.y_m + 0.5 * sheet.width_m));
    const double dz = std::max(std::abs(geom.h()), std::abs(sheet.height_m - geom.h()));
    const double rho = std::hypot(dy, dz);
    const double r1 = std::hypot(x, rho);
    const double r2 = std::hypot(geom.d() - x, rho);
    return rho * (1.0 / r1 + 1.0 / r2);
}

/// Cell size for the shortest wavelength considered. AUTO caps the phase
/// increment between neighbouring cells at max_phase_step; every step is
/// limited to lambda / 4.
inline double resolve_step(const QuadratureSpec& quad, const LinkGeometry& geom, const BodySheet& sheet,
                           double wavelength_m)
{
    if (!(wavelength_m > 0.0))
        throw domain_error("resolve_step: wavelength must be > 0");
    const double quarter = 0.25 * wavelength_m;
    if (!quad.is_auto())
        return std::min(quad.step_m, quarter);
    if (!(quad.max_phase_step_rad > 0.0))
        throw validation_error("quadrature: max_phase_step_rad must be > 0");
    const double g = max_excess_gradient(geom, sheet);
    if (!(g > 0.0))
        return quarter;
    const double k = 2.0 * pi / wavelength_m;
    return std::min(quad.max_phase_step_rad / (k * g), quarter);
}

/// Result of one quadrature pass shared by all frequencies of a sweep.
struct FieldSweep {
    std::vector<FieldRatio> ratios; // one per frequency, input order
    double step_m = 0.0;
    std::size_t samples = 0;
    bool near_field = false;
};

namespace detail {

// Uniform grids allow a phasor recurrence across frequencies instead of one sincos per frequency.
inline bool uniformly_spaced(std::span<const double> f)
{
    if (f.size() < 3)
        return false;
    const double step = (f.back() - f.front()) / static_cast<double>(f.size() - 1);
    if (!(step > 0.0))
        return false;
    for (std::size_t m = 0; m < f.size(); ++m)
        if (std::abs(f[m] - (f.front() + static_cast<double>(m) * step)) > 1e-9 * f.back())
            return false;
    return true;
}

inline double near_field_limit(const AntennaPattern& p, const DiffractionOptions& opt)
{
    return p.is_isotropic() ? opt.near_field_omni_m : opt.near_field_directional_m;
}

/// Sum over the sheet of w(p) dS / (r1 r2) exp(-j k (r1 + r2 - d)) for each
/// wavenumber, where `weight` returns sqrt(f_t f_r). Rows (constant z) are
/// summed independently and reduced in row order, so the result does not
/// depend on the number of workers.
template <class Weight>
std::vector<std::complex<double>> huygens_sums(const LinkGeometry& geom, const SheetTiling& tiling,
                                               std::span<const double> freqs, const Weight& weight, unsigned threads)
{
    const std::size_t nf = freqs.size();
    const std::size_t ny = tiling.n_lateral;
    const std::size_t nz = tiling.n_vertical;
    const double d = geom.d();
    const double h = geom.h();
    const double x = tiling.x_m;
    const double x2 = d - x;
    const double area = tiling.cell_area();
    const bool recurrence = uniformly_spaced(freqs);

    std::vector<double> wavenumber(nf);
    for (std::size_t m = 0; m < nf; ++m)
        wavenumber[m] = 2.0 * pi * freqs[m] / speed_of_light;
    const double k0 = nf ? wavenumber.front() : 0.0;
    const double dk = recurrence ? (wavenumber.back() - k0) / static_cast<double>(nf - 1) : 0.0;

    std::vector<double> row_re(nz * nf, 0.0);
    std::vector<double> row_im(nz * nf, 0.0);

    parallel_for(nz, threads, [&](std::size_t i) {
        const double z = tiling.vertical(i);
        const double dz = z - h;
        double* acc_re = row_re.data() + i * nf;
        double* acc_im = row_im.data() + i * nf;

        std::vector<double> amp(ny);
        std::vector<double> excess(ny);
        for (std::size_t j = 0; j < ny; ++j) {
            const double y = tiling.lateral(j);
            const double rho2 = y * y + dz * dz;
            const double r1 = std::sqrt(x * x + rho2);
            const double r2 = std::sqrt(x2 * x2 + rho2);
            excess[j] = rho2 / (r1 + x) + rho2 / (r2 + x2);
            amp[j] = weight(Point3{x, y, z}) * (area / (r1 * r2));
        }

        if (recurrence) {
            std::vector<double> c(ny);
            std::vector<double> s(ny);
            std::vector<double> cs(ny);
            std::vector<double> ss(ny);
            for (std::size_t j = 0; j < ny; ++j) {
                const double p0 = k0 * excess[j];
                const double ps = dk * excess[j];
                c[j] = amp[j] * std::cos(p0);
                s[j] = -amp[j] * std::sin(p0);
                cs[j] = std::cos(ps);
                ss[j] = -std::sin(ps);
            }
            for (std::size_t m = 0; m < nf; ++m) {
                double sr = 0.0;
                double si = 0.0;
                for (std::size_t j = 0; j < ny; ++j) {
                    sr += c[j];
                    si += s[j];
                }
                acc_re[m] = sr;
                acc_im[m] = si;
                for (std::size_t j = 0; j < ny; ++j) {
                    const double cn = c[j] * cs[j] - s[j] * ss[j];
                    const double sn = c[j] * ss[j] + s[j] * cs[j];
                    c[j] = cn;
                    s[j] = sn;
                }
            }
        } else {
            for (std::size_t m = 0; m < nf; ++m) {
                const double k = wavenumber[m];
                double sr = 0.0;
                double si = 0.0;
                for (std::size_t j = 0; j < ny; ++j) {
                    const double ph = k * excess[j];
                    sr += amp[j] * std::cos(ph);
                    si -= amp[j] * std::sin(ph);
                }
                acc_re[m] = sr;
                acc_im[m] = si;
            }
        }
    });

    std::vector<std::complex<double>> sums(nf);
    for (std::size_t m = 0; m < nf; ++m) {
        double sr = 0.0;
        double si = 0.0;
        for (std::size_t i = 0; i < nz; ++i) {
            sr += row_re[i * nf + m];
            si += row_im[i * nf + m];
        }
        sums[m] = {sr, si};
    }
    return sums;
}

template <class Weight>
FieldSweep field_sweep_with(const LinkGeometry& geom, const BodySheet& sheet, std::span<const double> freqs,
                            const QuadratureSpec& quad, const DiffractionOptions& opt, const Weight& weight,
                            double near_tx_m, double near_rx_m)
{
    if (!(sheet.x_m > 0.0 && sheet.x_m < geom.d()))
        throw domain_error("sheet at x = " + std::to_string(sheet.x_m) + " m is not strictly between the antennas (0, " +
                           std::to_string(geom.d()) + ")");
    if (freqs.empty())
        throw validation_error("field ratio needs at least one frequency");
    double f_max = 0.0;
    for (double f : freqs) {
        if (!(f > 0.0) || !std::isfinite(f))
            throw validation_error("frequencies must be finite and > 0");
        f_max = std::max(f_max, f);
    }

    FieldSweep out;
    out.step_m = resolve_step(quad, geom, sheet, wavelength_of(f_max));
    const SheetTiling tiling = tile_sheet(sheet, out.step_m);
    const double count = static_cast<double>(tiling.n_lateral) * static_cast<double>(tiling.n_vertical);
    if (count > static_cast<double>(quad.max_samples))
        throw resource_error("quadrature step " + std::to_string(out.step_m) + " m needs " +
                             std::to_string(static_cast<unsigned long long>(count)) + " samples, budget is " +
                             std::to_string(quad.max_samples));
    out.samples = tiling.size();
    out.near_field = distance_to_sheet(sheet, geom.tx_pos()) < near_tx_m ||
                     distance_to_sheet(sheet, geom.rx_pos()) < near_rx_m;

    const auto sums = huygens_sums(geom, tiling, freqs, weight, opt.threads);
    out.ratios.reserve(freqs.size());
    for (std::size_t m = 0; m < freqs.size(); ++m) {
        const double scale = geom.d() / wavelength_of(freqs[m]);
        // 1 - j scale (re + j im) = (1 + scale im) - j scale re
        const std::complex<double> v{1.0 + scale * sums[m].imag(), -scale * sums[m].real()};
        FieldRatio r = FieldRatio::from(v, opt.attenuation_cap_db);
        r.near_field = out.near_field;
        out.ratios.push_back(r);
    }
    return out;
}

struct UnitWeight {
    double operator()(const Point3&) const { return 1.0; }
};

} // namespace detail

/// Field ratio for isotropic antennas at both ends over a frequency list.
inline FieldSweep isotropic_field_sweep(const LinkGeometry& geom, const BodySheet& sheet, std::span<const double> freqs,
                                        const QuadratureSpec& quad, const DiffractionOptions& opt = {})
{
    return detail::field_sweep_with(geom, sheet, freqs, quad, opt, detail::UnitWeight{}, opt.near_field_omni_m,
                                    opt.near_field_omni_m);
}

/// Voltage ratio V/V0 with the TX pattern pointed at RX and the RX pattern
/// pointed at TX: each Huygens source is weighted by sqrt(f_t f_r).
/// Isotropic patterns contribute an exact factor 1, so this reduces to the
/// isotropic sweep bit for bit.
inline FieldSweep field_ratio_sweep(const LinkGeometry& geom, const BodySheet& sheet, std::span<const double> freqs,
                                    const AntennaPattern& tx_pat, const AntennaPattern& rx_pat,
                                    const QuadratureSpec& quad, const DiffractionOptions& opt = {})
{
    const Point3 tx = geom.tx_pos();
    const Point3 rx = geom.rx_pos();
    const Point3 tx_bore{1.0, 0.0, 0.0};
    const Point3 rx_bore{-1.0, 0.0, 0.0};
    const bool tx_iso = tx_pat.is_isotropic();
    const bool rx_iso = rx_pat.is_isotropic();
    auto weight = [&](const Point3& p) {
        const double ft = tx_iso ? 1.0 : tx_pat(direction_to(tx, tx_bore, p));
        const double fr = rx_iso ? 1.0 : rx_pat(direction_to(rx, rx_bore, p));
        return std::sqrt(ft * fr);
    };
    return detail::field_sweep_with(geom, sheet, freqs, quad, opt, weight, detail::near_field_limit(tx_pat, opt),
                                    detail::near_field_limit(rx_pat, opt));
}

inline FieldRatio field_ratio(const LinkGeometry& geom, const BodySheet& sheet, double freq_hz,
                              const AntennaPattern& tx_pat, const AntennaPattern& rx_pat, const QuadratureSpec& quad,
                              const DiffractionOptions& opt = {})
{
    const double f[1] = {freq_hz};
    return field_ratio_sweep(geom, sheet, f, tx_pat, rx_pat, quad, opt).ratios.front();
}

inline FieldRatio isotropic_field_ratio(const LinkGeometry& geom, const BodySheet& sheet, double freq_hz,
                                        const QuadratureSpec& quad, const DiffractionOptions& opt = {})
{
    const double f[1] = {freq_hz};
    return isotropic_field_sweep(geom, sheet, f, quad, opt).ratios.front();
}

} // namespace frespond
