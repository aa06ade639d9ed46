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

#include <gtest/gtest.h>

#include "frespond/detection.hpp"

using namespace frespond;

namespace {

AttenuationMap map_of(const std::vector<double>& values)
{
    AttenuationMap map;
    int id = 1;
    for (double v : values) {
        PositionAttenuation p;
        p.id = id++;
        p.mean_db = v;
        p.per_freq_db = {v - 1.0, v + 1.0};
        map.positions.push_back(p);
    }
    return map;
}

MembershipSplit split_of(std::set<int> inside, std::set<int> outside) { return {inside, outside, {}}; }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double norm_quantile(double p)
{
    double lo = -40.0;
    double hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (norm_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double simpson_kl(const GaussianHypothesis& f0, const GaussianHypothesis& f1)
{
    const double a = f0.mu() - 14.0 * f0.sigma();
    const double b = f0.mu() + 14.0 * f0.sigma();
    const int n = 200000;
    const double h = (b - a) / n;
    auto g = [&](double x) {
        // log p0 - log p1 in closed form avoids underflow in the tails.
        const double z0 = (x - f0.mu()) / f0.sigma();
        const double z1 = (x - f1.mu()) / f1.sigma();
        return f0.pdf(x) * (std::log(f1.sigma() / f0.sigma()) - 0.5 * z0 * z0 + 0.5 * z1 * z1);
    };
    double s = g(a) + g(b);
    for (int i = 1; i < n; ++i)
        s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

TEST(Hypothesis, RejectsZeroSpread)
{
    EXPECT_THROW(GaussianHypothesis(1.0, 0.0), degenerate_hypothesis_error);
    EXPECT_THROW(GaussianHypothesis(1.0, -1.0), degenerate_hypothesis_error);
    EXPECT_THROW(GaussianHypothesis(std::nan(""), 1.0), degenerate_hypothesis_error);
}

TEST(FitHypotheses, HandArithmetic)
{
    const auto map = map_of({0.0, 2.0, 5.0, 9.0});
    const auto fit = fit_hypotheses(map, split_of({3, 4}, {1, 2}));
    EXPECT_EQ(fit.f0.mu(), 1.0);
    EXPECT_EQ(fit.f0.sigma(), 1.0);
    EXPECT_EQ(fit.f1.mu(), 7.0);
    EXPECT_EQ(fit.f1.sigma(), 2.0);
    EXPECT_EQ(fit.l0, 2u);
    EXPECT_EQ(fit.l1, 2u);
    EXPECT_EQ(fit.separation_db(), 6.0);
}

TEST(FitHypotheses, ZeroVarianceIsDegenerate)
{
    const auto map = map_of({2.0, 2.0, 2.0, 5.0, 6.0});
    EXPECT_THROW(fit_hypotheses(map, split_of({4, 5}, {1, 2, 3})), degenerate_hypothesis_error);
    FitOptions floor;
    floor.variance_floor_db = 0.5;
    const auto fit = fit_hypotheses(map, split_of({4, 5}, {1, 2, 3}), floor);
    EXPECT_EQ(fit.f0.sigma(), 0.5);
    EXPECT_EQ(fit.f1.sigma(), 0.5);
}

TEST(FitHypotheses, EmptySetAndUnknownIds)
{
    const auto map = map_of({0.0, 2.0});
    EXPECT_THROW(fit_hypotheses(map, split_of({}, {1, 2})), validation_error);
    EXPECT_THROW(fit_hypotheses(map, split_of({1}, {})), validation_error);
    EXPECT_THROW(fit_hypotheses(map, split_of({1, 7}, {2})), validation_error);
}

TEST(FitHypotheses, PerFrequencyPoolsSamples)
{
    // Each position contributes v - 1 and v + 1.
    const auto map = map_of({0.0, 0.0, 4.0, 4.0});
    FitOptions opt;
    opt.per_frequency = true;
    const auto fit = fit_hypotheses(map, split_of({3, 4}, {1, 2}), opt);
    EXPECT_EQ(fit.f0.mu(), 0.0);
    EXPECT_EQ(fit.f0.sigma(), 1.0);
    EXPECT_EQ(fit.f1.mu(), 4.0);
    EXPECT_EQ(fit.l0, 2u);
}

TEST(Llr, Examples)
{
    const GaussianHypothesis f0(0.0, 1.0);
    const GaussianHypothesis f1(2.0, 1.0);
    EXPECT_EQ(llr(2.0, f0, f1), 2.0);
    EXPECT_EQ(llr(1.0, f0, f1), 0.0);
    for (double a : {-3.0, 0.0, 1.7, 12.0})
        EXPECT_EQ(llr(a, f0, f0), 0.0);
    const GaussianHypothesis g0(3.0, 2.5);
    const GaussianHypothesis g1(9.0, 1.5);
    for (double a : {-3.0, 0.0, 6.0, 12.0})
        EXPECT_NEAR(llr(a, g0, g1), std::log(g1.pdf(a) / g0.pdf(a)), 1e-12);
}

TEST(Kl, ClosedFormAgainstQuadrature)
{
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> mu(-10.0, 20.0);
    std::uniform_real_distribution<double> sd(0.3, 6.0);
    for (int k = 0; k < 25; ++k) {
        const GaussianHypothesis f0(mu(gen), sd(gen));
        const GaussianHypothesis f1(mu(gen), sd(gen));
        EXPECT_NEAR(kl_divergence(f0, f1), simpson_kl(f0, f1), 1e-6);
    }
}

TEST(Kl, ZeroForIdenticalAndNonNegative)
{
    for (double s : {0.1, 1.0, 7.0})
        EXPECT_NEAR(kl_divergence({4.0, s}, {4.0, s}), 0.0, 1e-15);
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    for (int k = 0; k < 200; ++k)
        EXPECT_GE(kl_divergence({u(gen), u(gen)}, {u(gen), u(gen)}), 0.0);
}

TEST(Roc, IdenticalHypothesesAreTheTrivialDetector)
{
    const GaussianHypothesis f(3.0, 2.0);
    const auto a = roc(f, f);
    EXPECT_EQ(a.auc, 0.5);
    for (double p : {0.0, 0.1, 0.5, 0.9, 1.0})
        EXPECT_NEAR(pd_at(a, p), p, 1e-12);
    const auto mc = roc(f, f, RocMonteCarlo{100000, 3});
    EXPECT_NEAR(mc.auc, 0.5, 0.01);
}

TEST(Roc, WellSeparatedHypotheses)
{
    const auto a = roc({0.0, 1.0}, {10.0, 1.0});
    EXPECT_GT(a.auc, 0.999);
    EXPECT_LE(a.auc, 1.0);
}

TEST(Roc, EndpointsAndMonotone)
{
    const auto a = roc({2.0, 3.0}, {10.0, 1.5});
    ASSERT_GE(a.points.size(), 3u);
    EXPECT_EQ(a.points.front().pfa, 0.0);
    EXPECT_EQ(a.points.front().pd, 0.0);
    EXPECT_EQ(a.points.back().pfa, 1.0);
    EXPECT_EQ(a.points.back().pd, 1.0);
    for (std::size_t i = 1; i < a.points.size(); ++i) {
        EXPECT_GE(a.points[i].pfa, a.points[i - 1].pfa);
        EXPECT_GE(a.points[i].pd, a.points[i - 1].pd);
        EXPECT_GE(a.points[i].pd, a.points[i].pfa - 1e-12);
    }
}

TEST(Roc, EqualVarianceBinormal)
{
    const double dprime = 1.7;
    const auto a = roc({1.0, 2.0}, {1.0 + 2.0 * dprime, 2.0});
    std::size_t checked = 0;
    for (const auto& p : a.points) {
        if (p.pfa > 1e-12 && p.pfa < 1.0 - 1e-12) {
            EXPECT_NEAR(p.pd, norm_cdf(norm_quantile(p.pfa) + dprime), 1e-6) << p.pfa;
            ++checked;
        }
    }
    EXPECT_GT(checked, 500u);
    // Between nodes the curve is interpolated linearly.
    for (double pfa : {0.01, 0.05, 0.1, 0.3, 0.5, 0.8})
        EXPECT_NEAR(pd_at(a, pfa), norm_cdf(norm_quantile(pfa) + dprime), 1e-4) << pfa;
    EXPECT_NEAR(a.auc, norm_cdf(dprime / std::sqrt(2.0)), 1e-5);
}

TEST(Roc, MajorizesMonteCarloWithinSampling)
{
    const GaussianHypothesis f0(1.0, 3.0);
    const GaussianHypothesis f1(6.0, 1.2);
    const auto t = roc_thresholds(f0, f1, 401);
    const auto a = roc(f0, f1, RocAnalytic{}, t);
    const std::size_t n = 200000;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto m = roc(f0, f1, RocMonteCarlo{n, seed}, t);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double pd = a.points[i].pd;
            const double se = std::sqrt(std::max(pd * (1.0 - pd), 1.0 / n) / n);
            EXPECT_LE(m.points[i].pd, pd + 3.0 * se + 1e-12);
        }
    }
}

TEST(Roc, ShiftInvariance)
{
    const std::vector<double> values{0.5, 1.5, 3.0, 2.2, 9.0, 11.5, 10.1, 12.7};
    std::vector<double> shifted;
    for (double v : values)
        shifted.push_back(v - 42.0);
    const auto split = split_of({5, 6, 7, 8}, {1, 2, 3, 4});
    const auto a = fit_hypotheses(map_of(values), split);
    const auto b = fit_hypotheses(map_of(shifted), split);
    EXPECT_NEAR(b.f0.mu(), a.f0.mu() - 42.0, 1e-12);
    EXPECT_NEAR(b.f1.mu(), a.f1.mu() - 42.0, 1e-12);
    EXPECT_NEAR(b.f0.sigma(), a.f0.sigma(), 1e-12);
    EXPECT_NEAR(b.f1.sigma(), a.f1.sigma(), 1e-12);
    EXPECT_NEAR(kl_divergence(a.f0, a.f1), kl_divergence(b.f0, b.f1), 1e-10);
    const auto ra = roc(a.f0, a.f1);
    const auto rb = roc(b.f0, b.f1);
    EXPECT_NEAR(ra.auc, rb.auc, 1e-9);
    for (double pfa : {0.01, 0.1, 0.4, 0.9})
        EXPECT_NEAR(pd_at(ra, pfa), pd_at(rb, pfa), 1e-6);
}

TEST(Roc, LargerSeparationDominates)
{
    const GaussianHypothesis f0(0.0, 2.0);
    double prev_auc = 0.5;
    for (double mu1 : {1.0, 2.0, 4.0, 8.0}) {
        const auto near = roc(f0, {mu1, 2.0});
        const auto far = roc(f0, {mu1 + 1.0, 2.0});
        for (double pfa = 0.0; pfa <= 1.0; pfa += 0.05)
            EXPECT_GE(pd_at(far, pfa) + 1e-9, pd_at(near, pfa));
        EXPECT_GT(near.auc, prev_auc);
        prev_auc = near.auc;
    }
}

TEST(DecisionRegion, TwoIntervalsAgainstBruteForce)
{
    const GaussianHypothesis pairs[][2] = {
        {{0.0, 1.0}, {2.0, 3.0}}, {{5.0, 3.0}, {4.0, 0.8}}, {{0.0, 2.0}, {0.0, 1.0}}, {{2.0, 1.5}, {6.0, 1.5}}};
    for (const auto& pr : pairs) {
        const auto& f0 = pr[0];
        const auto& f1 = pr[1];
        const DecisionRegion region(f0, f1);
        for (double t : {-2.0, -0.5, 0.0, 0.7, 2.0, 5.0}) {
            for (const auto* h : {&f0, &f1}) {
                // Midpoint sum of the density over {llr > t}.
                const double lo = h->mu() - 12.0 * h->sigma();
                const double hi = h->mu() + 12.0 * h->sigma();
                const int n = 400000;
                const double dx = (hi - lo) / n;
                double mass = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double a = lo + (i + 0.5) * dx;
                    if (llr(a, f0, f1) > t)
                        mass += h->pdf(a) * dx;
                }
                EXPECT_NEAR(region.probability(*h, t), mass, 2e-4) << "t = " << t;
            }
        }
    }
}

TEST(Roc, AnalyticAgreesWithMonteCarlo)
{
    const GaussianHypothesis f0(2.1, 2.4);
    const GaussianHypothesis f1(11.4, 2.9);
    const auto t = roc_thresholds(f0, f1);
    const auto a = roc(f0, f1, RocAnalytic{}, t);
    const auto m = roc(f0, f1, RocMonteCarlo{1000000, 7}, t);
    ASSERT_EQ(a.points.size(), m.points.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        worst = std::max(worst, std::abs(a.points[i].pd - m.points[i].pd));
    EXPECT_LT(worst, 0.005);
    EXPECT_NEAR(a.auc, m.auc, 0.005);
}

TEST(Roc, MonteCarloRejectsNoDraws)
{
    EXPECT_THROW(roc({0.0, 1.0}, {1.0, 1.0}, RocMonteCarlo{0, 1}), validation_error);
}
