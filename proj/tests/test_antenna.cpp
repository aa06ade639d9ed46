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
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "frespond/antenna.hpp"
#include "support.hpp"

using namespace frespond;

namespace {

AntennaPattern parse(const std::string& text) {
    std::istringstream in(text);
    return parse_tabulated(in, "pattern.csv");
}

std::string load_message(const std::string& text)
{
    try {
        parse(text);
    } catch (const load_error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(DirectionTo, Boresight)
{
    const auto d = direction_to({0, 0, 1}, {1, 0, 0}, {3, 0, 1});
    EXPECT_NEAR(d.azimuth_deg, 0.0, 1e-12);
    EXPECT_NEAR(d.elevation_deg, 0.0, 1e-12);
}

TEST(DirectionTo, StraightUp)
{
    const auto d = direction_to({0, 0, 1}, {1, 0, 0}, {0, 0, 2});
    EXPECT_NEAR(d.elevation_deg, 90.0, 1e-12);
    EXPECT_NEAR(d.azimuth_deg, 0.0, 1e-12);
}

TEST(DirectionTo, FortyFiveDegreesLeft)
{
    const auto d = direction_to({0, 0, 0}, {1, 0, 0}, {1, 1, 0});
    EXPECT_NEAR(d.azimuth_deg, 45.0, 1e-12);
    EXPECT_NEAR(d.elevation_deg, 0.0, 1e-12);
}

TEST(DirectionTo, ReversedBoresight)
{
    // RX looking back along -x: a target at +y is on its right.
    const auto d = direction_to({4, 0, 1}, {-1, 0, 0}, {3, 1, 1});
    EXPECT_NEAR(d.azimuth_deg, -45.0, 1e-12);
    const auto below = direction_to({4, 0, 1}, {-1, 0, 0}, {3, 0, 0});
    EXPECT_NEAR(below.elevation_deg, -45.0, 1e-12);
}

TEST(DirectionTo, ZeroLengthRay)
{
    EXPECT_THROW(direction_to({1, 2, 3}, {1, 0, 0}, {1, 2, 3}), domain_error);
}

TEST(GaussianBeam, HalfPowerAtHalfBeamwidth)
{
    const auto p = AntennaPattern::gaussian_beam(60, 76);
    EXPECT_DOUBLE_EQ(normalized_gain(p, {0, 0}), 1.0);
    EXPECT_NEAR(normalized_gain(p, {30, 0}), 0.5, 1e-15);
    EXPECT_NEAR(normalized_gain(p, {-30, 0}), 0.5, 1e-15);
    EXPECT_NEAR(normalized_gain(p, {0, 38}), 0.5, 1e-15);
    EXPECT_NEAR(normalized_gain(p, {30, 38}), 0.25, 1e-15);
}

TEST(Patterns, BoundedEvenAndPeakedAtBoresight)
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> az(-180, 180);
    std::uniform_real_distribution<double> el(-90, 90);
    const AntennaPattern pats[] = {AntennaPattern::isotropic(), AntennaPattern::gaussian_beam(60, 76),
                                   AntennaPattern::gaussian_beam(20, 120), AntennaPattern::cosine_power(2, 1),
                                   AntennaPattern::cosine_power(0.5, 4)};
    for (const auto& p : pats) {
        EXPECT_DOUBLE_EQ(p({0, 0}), 1.0);
        for (int k = 0; k < 500; ++k) {
            const Direction d{az(gen), el(gen)};
            const double g = p(d);
            EXPECT_GE(g, 0.0);
            EXPECT_LE(g, 1.0);
            EXPECT_DOUBLE_EQ(g, p({-d.azimuth_deg, d.elevation_deg}));
        }
    }
}

TEST(Patterns, MonotoneAwayFromBoresight)
{
    const AntennaPattern pats[] = {AntennaPattern::gaussian_beam(60, 76), AntennaPattern::cosine_power(2, 3)};
    for (const auto& p : pats) {
        for (double a = 0; a < 89; a += 1.0) {
            EXPECT_GE(p({a, 0}), p({a + 1, 0}));
            EXPECT_GE(p({0, a}), p({0, a + 1}));
        }
    }
}

TEST(CosinePower, ZeroBehind)
{
    const auto p = AntennaPattern::cosine_power(1, 1);
    EXPECT_NEAR(p({60, 0}), 0.5, 1e-15);
    EXPECT_EQ(p({120, 0}), 0.0);
    EXPECT_EQ(p({-179, 10}), 0.0);
}

TEST(Factories, RejectBadParameters)
{
    EXPECT_THROW(AntennaPattern::gaussian_beam(0, 76), validation_error);
    EXPECT_THROW(AntennaPattern::gaussian_beam(60, -1), validation_error);
    EXPECT_THROW(AntennaPattern::cosine_power(-1, 1), validation_error);
    EXPECT_THROW(AntennaPattern::tabulated({0, 0}, {0}, {1, 1}), validation_error);
    EXPECT_THROW(AntennaPattern::tabulated({0}, {0}, {std::nan("")}), validation_error);
    EXPECT_THROW(AntennaPattern::tabulated({0, 1}, {0}, {1}), validation_error);
}

TEST(Tabulated, SingleRowIsFlat)
{
    const auto p = parse("0,0,1.0\n");
    EXPECT_EQ(p({0, 0}), 1.0);
    EXPECT_EQ(p({170, -80}), 1.0);
    EXPECT_EQ(p({-90, 45}), 1.0);
}

TEST(Tabulated, HeaderAndRenormalisation)
{
    const auto p = parse("az_deg,el_deg,f\n-10,0,1\n0,0,2\n10,0,1\n");
    EXPECT_DOUBLE_EQ(p({0, 0}), 1.0);
    EXPECT_DOUBLE_EQ(p({5, 0}), 0.75);
    EXPECT_DOUBLE_EQ(p({-40, 30}), 0.5);
}

TEST(Tabulated, RoundTripGaussianAtOneDegree)
{
    const auto g = AntennaPattern::gaussian_beam(60, 76);
    testing_support::TempDir dir("pattern");
    std::ostringstream csv;
    csv.precision(17);
    csv << "az_deg,el_deg,f\n";
    for (int a = -180; a <= 180; ++a)
        for (int e = -90; e <= 90; ++e)
            csv << a << "," << e << "," << g({double(a), double(e)}) << "\n";
    const auto path = dir / "gauss.csv";
    testing_support::write_text(path, csv.str());
    const auto t = load_tabulated(path.string());

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> az(-180, 180);
    std::uniform_real_distribution<double> el(-90, 90);
    double worst = 0.0;
    for (int k = 0; k < 20000; ++k) {
        const Direction d{az(gen), el(gen)};
        worst = std::max(worst, std::abs(t(d) - g(d)));
    }
    for (double a = -30; a <= 30; a += 0.25)
        for (double e = -38; e <= 38; e += 0.25)
            worst = std::max(worst, std::abs(t({a, e}) - g({a, e})));
    EXPECT_LT(worst, 1e-3);
}

TEST(Tabulated, LoadErrors)
{
    EXPECT_NE(load_message("0,0,nan\n").find("pattern.csv:1: NaN"), std::string::npos);
    EXPECT_NE(load_message("az_deg,el_deg,f\n0,0,1\n0,1\n").find("pattern.csv:3: expected 3 columns"),
              std::string::npos);
    EXPECT_NE(load_message("0,0,1\n0,0,-0.5\n").find(":2:"), std::string::npos);
    EXPECT_NE(load_message("0,0,1\n0,0,0.5\n").find("duplicate"), std::string::npos);
    EXPECT_NE(load_message("0,0,1\n0,10,1\n10,0,1\n").find("non-rectangular"), std::string::npos);
    EXPECT_NE(load_message("10,0,1\n20,0,1\n").find("boresight"), std::string::npos);
    EXPECT_NE(load_message("0,0,1\n200,0,1\n").find("out of range"), std::string::npos);
    EXPECT_NE(load_message("0,x,1\n").find("not a number"), std::string::npos);
    EXPECT_NE(load_message("").find("no pattern rows"), std::string::npos);
    EXPECT_NE(load_message("0,0,0\n").find("zero"), std::string::npos);
    EXPECT_THROW(load_tabulated("/nonexistent/pattern.csv"), load_error);
}
