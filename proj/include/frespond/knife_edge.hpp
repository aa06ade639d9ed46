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

#include <cmath>
#include <complex>
#include <limits>
#include <utility>

#include "frespond/diffraction.hpp"
#include "frespond/geometry.hpp"

namespace frespond {

/// Fresnel integrals C(x) = int_0^x cos(pi t^2 / 2) dt and S(x) likewise with sin.
/// Power series for |x| <= 1.5, modified Lentz continued fraction above.
inline std::pair<double, double> fresnel_integrals(double x)
{
    constexpr double eps = 1e-16;
    constexpr double fpmin = 1e-300;
    constexpr int max_iter = 200;
    constexpr double x_series = 1.5;

    const double ax = std::abs(x);
    double c = 0.0;
    double s = 0.0;
    if (ax < 1e-150) {
        c = ax;
    } else if (ax <= x_series) {
        double sum = 0.0;
        double sums = 0.0;
        double sumc = ax;
        double sign = 1.0;
        const double fact = 0.5 * pi * ax * ax;
        bool odd = true;
        double term = ax;
        int n = 3;
        for (int k = 1; k <= max_iter; ++k) {
            term *= fact / k;
            sum += sign * term / n;
            const double test = std::abs(sum) * eps;
            if (odd) {
                sign = -sign;
                sums = sum;
                sum = sumc;
            } else {
                sumc = sum;
                sum = sums;
            }
            if (term < test)
                break;
            odd = !odd;
            n += 2;
        }
        s = sums;
        c = sumc;
    } else {
        using cd = std::complex<double>;
        const double pix2 = pi * ax * ax;
        cd b{1.0, -pix2};
        cd cc{1.0 / fpmin, 0.0};
        cd d = 1.0 / b;
        cd h = d;
        int n = -1;
        for (int k = 2; k <= max_iter; ++k) {
            n += 2;
            const double a = -static_cast<double>(n * (n + 1));
            b += 4.0;
            d = 1.0 / (a * d + b);
            cc = b + a / cc;
            const cd del = cc * d;
            h *= del;
            if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps)
                break;
        }
        h *= cd{ax, -ax};
        const cd cs = cd{0.5, 0.5} * (1.0 - cd{std::cos(0.5 * pix2), std::sin(0.5 * pix2)} * h);
        c = cs.real();
        s = cs.imag();
    }
    if (x < 0.0) {
        c = -c;
        s = -s;
    }
    return {c, s};
}

/// Field behind an absorbing half-plane relative to free space, at Fresnel parameter v.
/// v > 0 means the edge is above the LOS.
inline std::complex<double> knife_edge_field(double v)
{
    const auto [c, s] = fresnel_integrals(v);
    // (1 + j)/2 * int_v^inf exp(-j pi t^2 / 2) dt
    const std::complex<double> tail{0.5 - c, -(0.5 - s)};
    return std::complex<double>{0.5, 0.5} * tail;
}

/// Knife-edge diffraction loss in dB. Tends to 0 for v -> -inf and equals 6.02 dB at v = 0.
inline double knife_edge_oracle(double v)
{
    if (v == -std::numeric_limits<double>::infinity())
        return 0.0;
    return attenuation_db(knife_edge_field(v));
}

/// Fresnel parameter of an edge `clearance_m` above the LOS at abscissa x.
inline double fresnel_parameter(const LinkGeometry& geom, double x_m, double clearance_m, double wavelength_m)
{
    return clearance_m * std::sqrt(2.0) / fresnel_radius(geom, x_m, wavelength_m);
}

} // namespace frespond
