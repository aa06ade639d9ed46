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
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "frespond/errors.hpp"
#include "frespond/geometry.hpp"
#include "frespond/scenario.hpp"
#include "frespond/stats.hpp"

namespace frespond {

/// Gaussian likelihood of the observed attenuation (dB) under one hypothesis.
class GaussianHypothesis {
public:
    GaussianHypothesis(double mu_db, double sigma_db) : mu_(mu_db), sigma_(sigma_db)
    {
        if (!std::isfinite(mu_db) || !(sigma_db > 0.0) || !std::isfinite(sigma_db))
            throw degenerate_hypothesis_error("hypothesis needs finite mu and sigma > 0 (got sigma = " +
                                              std::to_string(sigma_db) + ")");
    }

    double mu() const { return mu_; }
    double sigma() const { return sigma_; }

    double pdf(double a) const
    {
        const double z = (a - mu_) / sigma_;
        return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * pi));
    }
    double cdf(double a) const { return 0.5 * std::erfc(-(a - mu_) / (sigma_ * std::sqrt(2.0))); }

    friend bool operator==(const GaussianHypothesis&, const GaussianHypothesis&) = default;

private:
    double mu_;
    double sigma_;
};

struct HypothesisFit {
    GaussianHypothesis f0; // target outside the ellipsoid
    GaussianHypothesis f1; // target inside
    std::size_t l0 = 0;
    std::size_t l1 = 0;

    /// mu_F1 - mu_F0: positive when the body inside the zone attenuates more.
    double separation_db() const { return f1.mu() - f0.mu(); }
};

struct FitOptions {
    double variance_floor_db = 0.0; // sigma is raised to at least this value when > 0
    bool per_frequency = false;     // pool A_S(l, k) samples instead of per-position means
};

namespace detail {

inline GaussianHypothesis fit_one(const AttenuationMap& map, const std::set<int>& ids, const FitOptions& opt,
                                  const char* name)
{
    if (ids.empty())
        throw validation_error(std::string("membership set ") + name + " is empty");
    std::vector<double> values;
    for (int id : ids) {
        const auto& p = map.at(id);
        if (opt.per_frequency)
            values.insert(values.end(), p.per_freq_db.begin(), p.per_freq_db.end());
        else
            values.push_back(p.mean_db);
    }
    const double mu = stats::mean(values);
    double sigma = stats::population_stddev(values);
    if (opt.variance_floor_db > 0.0)
        sigma = std::max(sigma, opt.variance_floor_db);
    if (!(sigma > 0.0))
        throw degenerate_hypothesis_error(std::string("hypothesis ") + name + " has zero spread (all " +
                                          std::to_string(values.size()) + " values equal " + std::to_string(mu) +
                                          " dB)");
    return {mu, sigma};
}

} // namespace detail

/// Mean and 1/L root-mean-square deviation of the attenuations in each membership set.
inline HypothesisFit fit_hypotheses(const AttenuationMap& map, const MembershipSplit& split,
                                    const FitOptions& opt = {})
{
    auto f0 = detail::fit_one(map, split.outside_ids, opt, "F0 (outside)");
    auto f1 = detail::fit_one(map, split.inside_ids, opt, "F1 (inside)");
    return {f0, f1, split.outside_ids.size(), split.inside_ids.size()};
}

/// Log-likelihood ratio log[p(a | F1) / p(a | F0)] for Gaussian likelihoods, natural log.
inline double llr(double a_s_db, const GaussianHypothesis& f0, const GaussianHypothesis& f1)
{
    const double z0 = (a_s_db - f0.mu()) / f0.sigma();
    const double z1 = (a_s_db - f1.mu()) / f1.sigma();
    return 0.5 * z0 * z0 - 0.5 * z1 * z1 - std::log(f1.sigma() / f0.sigma());
}

/// KL(F0 || F1) in nats.
inline double kl_divergence(const GaussianHypothesis& f0, const GaussianHypothesis& f1)
{
    const double dmu = f0.mu() - f1.mu();
    return std::log(f1.sigma() / f0.sigma()) +
           (f0.sigma() * f0.sigma() + dmu * dmu) / (2.0 * f1.sigma() * f1.sigma()) - 0.5;
}

struct RocPoint {
    double threshold = 0.0;
    double pfa = 0.0;
    double pd = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points; // pfa non-decreasing, (0,0) first and (1,1) last
    double auc = 0.0;
};

struct RocAnalytic {};

struct RocMonteCarlo {
    std::size_t n = 1'000'000;
    std::uint64_t seed = 1;
};

/// Decision region {a : llr(a) > t} as at most two intervals.
class DecisionRegion {
public:
    DecisionRegion(const GaussianHypothesis& f0, const GaussianHypothesis& f1)
    {
        const double p0 = 1.0 / (f0.sigma() * f0.sigma());
        const double p1 = 1.0 / (f1.sigma() * f1.sigma());
        c2_ = 0.5 * (p0 - p1);
        c1_ = f1.mu() * p1 - f0.mu() * p0;
        c0_ = 0.5 * (f0.mu() * f0.mu() * p0 - f1.mu() * f1.mu() * p1) - std::log(f1.sigma() / f0.sigma());
        // Equal spreads make the quadratic term vanish exactly in theory; clean residual round-off.
        if (std::abs(c2_) <= 1e-14 * std::max(p0, p1))
            c2_ = 0.0;
    }

    /// Probability mass of {llr > t} under hypothesis h.
    double probability(const GaussianHypothesis& h, double t) const
    {
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (t == inf)
            return 0.0;
        if (t == -inf)
            return 1.0;
        const double c = c0_ - t;
        if (c2_ == 0.0) {
            if (c1_ > 0.0)
                return 1.0 - h.cdf(-c / c1_);
            if (c1_ < 0.0)
                return h.cdf(-c / c1_);
            return c > 0.0 ? 1.0 : 0.0;
        }
        const double disc = c1_ * c1_ - 4.0 * c2_ * c;
        if (disc <= 0.0)
            return c2_ > 0.0 ? 1.0 : 0.0;
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (c1_ + (c1_ >= 0.0 ? sq : -sq));
        double r1 = q / c2_;
        double r2 = c / q;
        if (r1 > r2)
            std::swap(r1, r2);
        if (c2_ > 0.0)
            return h.cdf(r1) + (1.0 - h.cdf(r2));
        return h.cdf(r2) - h.cdf(r1);
    }

    double c2() const { return c2_; }
    double c1() const { return c1_; }
    double c0() const { return c0_; }

private:
    double c2_ = 0.0;
    double c1_ = 0.0;
    double c0_ = 0.0;
};

/// LLR thresholds that sample the ROC densely, in decreasing order, bracketed by +inf and -inf.
inline std::vector<double> roc_thresholds(const GaussianHypothesis& f0, const GaussianHypothesis& f1,
                                          std::size_t n_grid = 2001)
{
    const double lo = std::min(f0.mu() - 8.0 * f0.sigma(), f1.mu() - 8.0 * f1.sigma());
    const double hi = std::max(f0.mu() + 8.0 * f0.sigma(), f1.mu() + 8.0 * f1.sigma());
    std::vector<double> t;
    t.reserve(n_grid + 3);
    for (std::size_t i = 0; i < n_grid; ++i) {
        const double a = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_grid - 1);
        t.push_back(llr(a, f0, f1));
    }
    const DecisionRegion region(f0, f1);
    if (region.c2() != 0.0)
        t.push_back(llr(-region.c1() / (2.0 * region.c2()), f0, f1));
    std::sort(t.begin(), t.end(), std::greater<>());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    constexpr double inf = std::numeric_limits<double>::infinity();
    t.insert(t.begin(), inf);
    t.push_back(-inf);
    return t;
}

namespace detail {

inline double trapezoid_auc(const std::vector<RocPoint>& pts)
{
    double auc = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        auc += (pts[i].pfa - pts[i - 1].pfa) * 0.5 * (pts[i].pd + pts[i - 1].pd);
    return auc;
}

inline std::vector<double> llr_draws(const GaussianHypothesis& h, const GaussianHypothesis& f0,
                                     const GaussianHypothesis& f1, std::size_t n, std::mt19937_64& gen)
{
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> g(n);
    for (double& v : g)
        v = llr(h.mu() + h.sigma() * unit(gen), f0, f1);
    std::sort(g.begin(), g.end());
    return g;
}

inline double fraction_above(const std::vector<double>& sorted, double t)
{
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

inline RocCurve finish(std::vector<RocPoint> pts)
{
    // Thresholds run high to low, so pfa and pd are already non-decreasing.
    pts.front().pfa = 0.0;
    pts.front().pd = 0.0;
    pts.back().pfa = 1.0;
    pts.back().pd = 1.0;
    RocCurve roc;
    roc.auc = trapezoid_auc(pts);
    roc.points = std::move(pts);
    return roc;
}

} // namespace detail

/// Exact ROC of the LLR detector at the given thresholds (decreasing).
inline RocCurve roc(const GaussianHypothesis& f0, const GaussianHypothesis& f1, RocAnalytic,
                    const std::vector<double>& thresholds)
{
    const DecisionRegion region(f0, f1);
    std::vector<RocPoint> pts;
    pts.reserve(thresholds.size());
    for (double t : thresholds)
        pts.push_back({t, region.probability(f0, t), region.probability(f1, t)});
    return detail::finish(std::move(pts));
}

/// ROC estimated from `n` draws per hypothesis.
inline RocCurve roc(const GaussianHypothesis& f0, const GaussianHypothesis& f1, const RocMonteCarlo& mc,
                    const std::vector<double>& thresholds)
{
    if (mc.n < 1)
        throw validation_error("Monte Carlo ROC needs n >= 1");
    auto gen0 = detail::substream(mc.seed, 0);
    auto gen1 = detail::substream(mc.seed, 1);
    const auto g0 = detail::llr_draws(f0, f0, f1, mc.n, gen0);
    const auto g1 = detail::llr_draws(f1, f0, f1, mc.n, gen1);
    std::vector<RocPoint> pts;
    pts.reserve(thresholds.size());
    for (double t : thresholds)
        pts.push_back({t, detail::fraction_above(g0, t), detail::fraction_above(g1, t)});
    return detail::finish(std::move(pts));
}

inline RocCurve roc(const GaussianHypothesis& f0, const GaussianHypothesis& f1, RocAnalytic mode = {})
{
    return roc(f0, f1, mode, roc_thresholds(f0, f1));
}

inline RocCurve roc(const GaussianHypothesis& f0, const GaussianHypothesis& f1, const RocMonteCarlo& mc)
{
    return roc(f0, f1, mc, roc_thresholds(f0, f1));
}

/// pd of the curve at a given pfa: linear between points, the upper value on vertical steps.
inline double pd_at(const RocCurve& curve, double pfa)
{
    const auto& p = curve.points;
    double best = -1.0;
    for (const auto& q : p)
        if (q.pfa == pfa)
            best = std::max(best, q.pd);
    if (best >= 0.0)
        return best;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i].pfa > pfa) {
            const double t = (pfa - p[i - 1].pfa) / (p[i].pfa - p[i - 1].pfa);
            return p[i - 1].pd + t * (p[i].pd - p[i - 1].pd);
        }
    }
    return 1.0;
}

} // namespace frespond
