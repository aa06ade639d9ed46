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
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "frespond/antenna.hpp"
#include "frespond/diffraction.hpp"
#include "frespond/errors.hpp"
#include "frespond/format.hpp"
#include "frespond/geometry.hpp"
#include "frespond/parallel.hpp"
#include "frespond/stats.hpp"

namespace frespond {

/// `count` equally spaced frequencies from start to stop inclusive.
inline std::vector<double> frequency_sweep(double start_hz, double stop_hz, int count)
{
    if (count < 1)
        throw validation_error("frequency sweep needs at least one point");
    if (!(start_hz > 0.0) || stop_hz < start_hz)
        throw validation_error("frequency sweep needs 0 < start <= stop");
    std::vector<double> f(static_cast<std::size_t>(count));
    if (count == 1) {
        f[0] = start_hz;
        return f;
    }
    const double step = (stop_hz - start_hz) / static_cast<double>(count - 1);
    for (int k = 0; k < count; ++k)
        f[static_cast<std::size_t>(k)] = start_hz + static_cast<double>(k) * step;
    f.back() = stop_hz;
    return f;
}

struct JitterSpec {
    double delta_m = 0.06;  // offsets uniform on [-delta/2, delta/2] in x and y
    int n_p = 150;
    std::uint64_t seed = 1;
};

/// Stochastic terms of the received-power model, all in dB.
struct NoiseSpec {
    double sigma0_db = 0.0;
    double delta_h_t_db = 0.0;
    double delta_sigma_t_db = 0.0;
};

struct ScenarioConfig {
    LinkGeometry geom{4.0, 0.99};
    double body_height_m = 2.0;
    double body_width_m = 0.55;
    MeasurementGrid grid = MeasurementGrid::paper_default();
    AntennaPattern tx_pat = AntennaPattern::isotropic();
    AntennaPattern rx_pat = AntennaPattern::isotropic();
    std::vector<double> freqs = frequency_sweep(2.4e9, 2.5e9, 81);
    JitterSpec jitter;
    QuadratureSpec quad;
    NoiseSpec noise;
    DiffractionOptions diffraction;
    unsigned threads = 0;
    bool keep_samples = false;

    BodySheet sheet_at(double x, double y) const { return {body_height_m, body_width_m, x, y}; }

    double mean_frequency() const { return stats::mean(freqs); }

    void validate() const
    {
        if (!(body_height_m > 0.0) || !(body_width_m > 0.0))
            throw validation_error("body sheet needs H > 0 and W > 0");
        if (freqs.empty())
            throw validation_error("no frequencies configured");
        for (double f : freqs)
            if (!(f > 0.0) || !std::isfinite(f))
                throw validation_error("frequencies must be finite and > 0");
        if (jitter.n_p < 1)
            throw validation_error("jitter n_p must be >= 1");
        if (!(jitter.delta_m >= 0.0))
            throw validation_error("jitter delta must be >= 0");
        if (noise.sigma0_db < 0.0 || noise.delta_sigma_t_db < 0.0)
            throw validation_error("noise deviations must be >= 0");
    }
};

/// Attenuation record of one grid position.
struct PositionAttenuation {
    int id = 0;
    double x_m = 0.0;
    double y_m = 0.0;
    std::vector<double> per_freq_db;  // A_S(l, k): mean over jitter, or the measured value
    double mean_db = 0.0;             // A_S^(p)(l) or A_S^(m)(l)
    double band_lo_db = 0.0;          // 20th percentile of the underlying samples
    double band_hi_db = 0.0;          // 80th percentile
    bool near_field = false;
    std::vector<double> samples_db;   // optional, [jitter][freq] row-major
};

struct AttenuationMap {
    std::string source = "model";  // "model" or "measurement"
    std::vector<double> freqs_hz;
    std::vector<PositionAttenuation> positions;
    std::uint64_t seed = 0;
    std::string config_hash;

    const PositionAttenuation& at(int id) const
    {
        for (const auto& p : positions)
            if (p.id == id)
                return p;
        throw validation_error("attenuation map has no position " + std::to_string(id));
    }
    bool contains(int id) const
    {
        for (const auto& p : positions)
            if (p.id == id)
                return true;
        return false;
    }
};

inline constexpr double band_lo_percentile = 20.0;
inline constexpr double band_hi_percentile = 80.0;

namespace detail {

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

inline double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

} // namespace detail

/// Horizontal body offsets for position `id`, drawn from the (seed, id) substream
/// so they do not depend on evaluation order.
inline std::vector<std::pair<double, double>> jitter_offsets(const JitterSpec& jitter, int id)
{
    auto gen = detail::substream(jitter.seed, static_cast<std::uint64_t>(id));
    std::vector<std::pair<double, double>> out(static_cast<std::size_t>(jitter.n_p));
    for (auto& [dx, dy] : out) {
        dx = (detail::unit_uniform(gen) - 0.5) * jitter.delta_m;
        dy = (detail::unit_uniform(gen) - 0.5) * jitter.delta_m;
    }
    return out;
}

/// Predicted attenuation map: Monte Carlo over body jitter and a sweep
/// over the configured frequencies at every selected grid position.
/// An empty `ids` selects the whole grid.
inline AttenuationMap predict_map(const ScenarioConfig& cfg, const std::vector<int>& ids = {})
{
    cfg.validate();
    std::vector<GridPosition> selected;
    if (ids.empty()) {
        selected = cfg.grid.positions();
    } else {
        for (int id : ids)
            selected.push_back(cfg.grid.at(id));
    }
    for (const auto& p : selected)
        if (!(p.x_m > 0.0 && p.x_m < cfg.geom.d()))
            throw domain_error("position " + std::to_string(p.id) + " at x = " + std::to_string(p.x_m) +
                               " m is not strictly between the antennas");

    const std::size_t np = static_cast<std::size_t>(cfg.jitter.n_p);
    const std::size_t nf = cfg.freqs.size();
    std::vector<std::vector<std::pair<double, double>>> offsets;
    offsets.reserve(selected.size());
    for (const auto& p : selected)
        offsets.push_back(jitter_offsets(cfg.jitter, p.id));

    // samples[(pos * np + k) * nf + m]
    std::vector<double> samples(selected.size() * np * nf);
    std::vector<char> near(selected.size() * np, 0);
    DiffractionOptions opt = cfg.diffraction;
    opt.threads = 1;

    parallel_for(selected.size() * np, cfg.threads, [&](std::size_t task) {
        const std::size_t pi_ = task / np;
        const std::size_t k = task % np;
        const auto& pos = selected[pi_];
        const auto [dx, dy] = offsets[pi_][k];
        const BodySheet sheet = cfg.sheet_at(pos.x_m + dx, pos.y_m + dy);
        FieldSweep sweep;
        try {
            sweep = field_ratio_sweep(cfg.geom, sheet, cfg.freqs, cfg.tx_pat, cfg.rx_pat, cfg.quad, opt);
        } catch (const domain_error& e) {
            throw domain_error("position " + std::to_string(pos.id) + ", jitter sample " + std::to_string(k) + ": " +
                               e.what());
        } catch (const resource_error& e) {
            throw resource_error("position " + std::to_string(pos.id) + ", jitter sample " + std::to_string(k) +
                                 ": " + e.what());
        }
        double* out = samples.data() + task * nf;
        for (std::size_t m = 0; m < nf; ++m)
            out[m] = sweep.ratios[m].attenuation_db;
        near[task] = sweep.near_field ? 1 : 0;
    });

    AttenuationMap map;
    map.source = "model";
    map.freqs_hz = cfg.freqs;
    map.seed = cfg.jitter.seed;
    map.positions.reserve(selected.size());
    for (std::size_t p = 0; p < selected.size(); ++p) {
        PositionAttenuation rec;
        rec.id = selected[p].id;
        rec.x_m = selected[p].x_m;
        rec.y_m = selected[p].y_m;
        const double* block = samples.data() + p * np * nf;
        rec.per_freq_db.assign(nf, 0.0);
        double total = 0.0;
        for (std::size_t k = 0; k < np; ++k) {
            double fsum = 0.0;
            for (std::size_t m = 0; m < nf; ++m) {
                rec.per_freq_db[m] += block[k * nf + m];
                fsum += block[k * nf + m];
            }
            total += fsum / static_cast<double>(nf);
            rec.near_field = rec.near_field || near[p * np + k] != 0;
        }
        for (double& v : rec.per_freq_db)
            v /= static_cast<double>(np);
        rec.mean_db = total / static_cast<double>(np);
        std::vector<double> all(block, block + np * nf);
        rec.band_lo_db = stats::percentile(all, band_lo_percentile);
        rec.band_hi_db = stats::percentile(all, band_hi_percentile);
        if (cfg.keep_samples)
            rec.samples_db = std::move(all);
        map.positions.push_back(std::move(rec));
    }
    return map;
}

/// Attenuation of the un-jittered sheet at (x, y), per configured frequency.
inline std::vector<double> nominal_attenuation(const ScenarioConfig& cfg, double x, double y)
{
    DiffractionOptions opt = cfg.diffraction;
    opt.threads = cfg.threads;
    const auto sweep = field_ratio_sweep(cfg.geom, cfg.sheet_at(x, y), cfg.freqs, cfg.tx_pat, cfg.rx_pat, cfg.quad, opt);
    std::vector<double> a;
    a.reserve(sweep.ratios.size());
    for (const auto& r : sweep.ratios)
        a.push_back(r.attenuation_db);
    return a;
}

namespace detail {

inline std::vector<double> draw_power(double mean, double sigma, std::size_t n, std::mt19937_64& gen)
{
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> out(n);
    for (double& v : out)
        v = mean + sigma * unit(gen);
    return out;
}

inline void check_draws(std::size_t n)
{
    if (n < 1)
        throw validation_error("simulate_received_power needs n_draws >= 1");
}

} // namespace detail

/// Draws of received power (dBm). Free space: P0 + w0 with w0 ~ N(0, sigma0^2).
/// With a target: P0 - A_S + wT with wT ~ N(delta_h_t, sigma0^2 + delta_sigma_t^2),
/// A_S being the frequency-mean attenuation of the sheet at the target.
inline std::vector<double> simulate_received_power(const ScenarioConfig& cfg, double p0_dbm,
                                                   std::optional<std::pair<double, double>> target,
                                                   std::size_t n_draws, std::uint64_t seed)
{
    detail::check_draws(n_draws);
    cfg.validate();
    auto gen = detail::substream(seed, 0x90e5ULL);
    if (!target)
        return detail::draw_power(p0_dbm, cfg.noise.sigma0_db, n_draws, gen);
    const auto a = nominal_attenuation(cfg, target->first, target->second);
    const double a_mean = stats::mean(a);
    const double sigma_t = std::hypot(cfg.noise.sigma0_db, cfg.noise.delta_sigma_t_db);
    return detail::draw_power(p0_dbm - a_mean + cfg.noise.delta_h_t_db, sigma_t, n_draws, gen);
}

/// Per-frequency variant: result[m] holds the draws at cfg.freqs[m], using A_S(f_m).
inline std::vector<std::vector<double>> simulate_received_power_per_frequency(
    const ScenarioConfig& cfg, double p0_dbm, std::optional<std::pair<double, double>> target, std::size_t n_draws,
    std::uint64_t seed)
{
    detail::check_draws(n_draws);
    cfg.validate();
    auto gen = detail::substream(seed, 0x90e5ULL);
    std::vector<double> a(cfg.freqs.size(), 0.0);
    double mu = 0.0;
    double sigma = cfg.noise.sigma0_db;
    if (target) {
        a = nominal_attenuation(cfg, target->first, target->second);
        mu = cfg.noise.delta_h_t_db;
        sigma = std::hypot(cfg.noise.sigma0_db, cfg.noise.delta_sigma_t_db);
    }
    std::vector<std::vector<double>> out;
    out.reserve(a.size());
    for (double am : a)
        out.push_back(detail::draw_power(p0_dbm - am + mu, sigma, n_draws, gen));
    return out;
}

// ---- measurement CSV ingestion ------------------------------------------

struct PowerRow {
    int position_id = 0;
    double freq_hz = 0.0;
    double p_dbm = 0.0;
};

struct FreeSpaceRow {
    double freq_hz = 0.0;
    double p0_dbm = 0.0;
};

namespace detail {

inline std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::vector<std::string>& header,
                                                      const std::string& origin, std::vector<std::size_t>& lines)
{
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty())
            continue;
        auto cells = split_csv_line(line);
        for (auto& c : cells)
            c = trim(c);
        if (!have_header) {
            if (cells != header) {
                std::string want;
                for (const auto& h : header)
                    want += (want.empty() ? "" : ",") + h;
                throw ingestion_error(origin + ":" + std::to_string(lineno) + ": expected header '" + want + "'");
            }
            have_header = true;
            continue;
        }
        if (cells.size() != header.size())
            throw ingestion_error(origin + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(header.size()) + " columns, got " + std::to_string(cells.size()));
        rows.push_back(std::move(cells));
        lines.push_back(lineno);
    }
    if (!have_header)
        throw ingestion_error(origin + ": empty file");
    return rows;
}

inline double cell_number(const std::string& cell, const std::string& origin, std::size_t line, std::size_t col)
{
    double v = 0.0;
    if (!parse_double(cell, v) || !std::isfinite(v))
        throw ingestion_error(origin + ":" + std::to_string(line) + ": column " + std::to_string(col) +
                              " is not a finite number: '" + cell + "'");
    return v;
}

} // namespace detail

inline std::vector<PowerRow> read_power_csv(std::istream& in, const std::string& origin = "<power>")
{
    std::vector<std::size_t> lines;
    const auto rows = detail::read_csv(in, {"position_id", "freq_hz", "p_dbm"}, origin, lines);
    std::vector<PowerRow> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double id = detail::cell_number(rows[r][0], origin, lines[r], 1);
        if (id != std::floor(id) || id < 0.0)
            throw ingestion_error(origin + ":" + std::to_string(lines[r]) + ": position_id must be an integer >= 0");
        out.push_back({static_cast<int>(id), detail::cell_number(rows[r][1], origin, lines[r], 2),
                       detail::cell_number(rows[r][2], origin, lines[r], 3)});
    }
    return out;
}

inline std::vector<FreeSpaceRow> read_freespace_csv(std::istream& in, const std::string& origin = "<free-space>")
{
    std::vector<std::size_t> lines;
    const auto rows = detail::read_csv(in, {"freq_hz", "p0_dbm"}, origin, lines);
    std::vector<FreeSpaceRow> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.push_back({detail::cell_number(rows[r][0], origin, lines[r], 1),
                       detail::cell_number(rows[r][1], origin, lines[r], 2)});
    return out;
}

inline void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows)
{
    out << "position_id,freq_hz,p_dbm\n";
    for (const auto& r : rows)
        out << r.position_id << ',' << exact(r.freq_hz) << ',' << exact(r.p_dbm) << '\n';
}

inline void write_freespace_csv(std::ostream& out, const std::vector<FreeSpaceRow>& rows)
{
    out << "freq_hz,p0_dbm\n";
    for (const auto& r : rows)
        out << exact(r.freq_hz) << ',' << exact(r.p0_dbm) << '\n';
}

/// Measured attenuation map: A_S,k(l) = P0(f_k) - P(f_k, l) in dB over the
/// frequencies common to both files, averaged per position, with the
/// 20th/80th percentile band over frequency.
inline AttenuationMap ingest_measurements(const std::vector<PowerRow>& power, const std::vector<FreeSpaceRow>& free,
                                          const MeasurementGrid& grid)
{
    std::map<double, double> p0;
    for (const auto& r : free)
        if (!p0.emplace(r.freq_hz, r.p0_dbm).second)
            throw ingestion_error("free-space data: duplicate frequency " + exact(r.freq_hz) + " Hz");

    std::map<int, std::map<double, double>> meas;
    std::set<double> power_freqs;
    for (const auto& r : power) {
        if (!grid.contains(r.position_id))
            throw ingestion_error("measurement data: position " + std::to_string(r.position_id) +
                                  " is not on the grid");
        if (!meas[r.position_id].emplace(r.freq_hz, r.p_dbm).second)
            throw ingestion_error("measurement data: duplicate row for position " + std::to_string(r.position_id) +
                                  " at " + exact(r.freq_hz) + " Hz");
        power_freqs.insert(r.freq_hz);
    }

    std::vector<double> common;
    for (double f : power_freqs)
        if (p0.count(f) != 0)
            common.push_back(f);
    if (common.empty())
        throw ingestion_error("measurement and free-space frequency grids do not overlap");

    AttenuationMap map;
    map.source = "measurement";
    map.freqs_hz = common;
    for (const auto& pos : grid.positions()) {
        const auto it = meas.find(pos.id);
        if (it == meas.end())
            throw ingestion_error("measurement data: position " + std::to_string(pos.id) + " is missing");
        PositionAttenuation rec;
        rec.id = pos.id;
        rec.x_m = pos.x_m;
        rec.y_m = pos.y_m;
        for (double f : common) {
            const auto fit = it->second.find(f);
            if (fit == it->second.end())
                throw ingestion_error("measurement data: position " + std::to_string(pos.id) + " has no row at " +
                                      exact(f) + " Hz");
            rec.per_freq_db.push_back(p0.at(f) - fit->second);
        }
        rec.mean_db = stats::mean(rec.per_freq_db);
        rec.band_lo_db = stats::percentile(rec.per_freq_db, band_lo_percentile);
        rec.band_hi_db = stats::percentile(rec.per_freq_db, band_hi_percentile);
        map.positions.push_back(std::move(rec));
    }
    return map;
}

/// Reads both CSVs. Without a free-space stream, P0 comes from the rows of
/// the power file with position_id 0.
inline AttenuationMap ingest_measurements(std::istream& power_csv, std::istream* freespace_csv,
                                          const MeasurementGrid& grid)
{
    auto power = read_power_csv(power_csv);
    std::vector<FreeSpaceRow> free;
    if (freespace_csv != nullptr) {
        free = read_freespace_csv(*freespace_csv);
    } else {
        std::vector<PowerRow> targets;
        for (const auto& r : power) {
            if (r.position_id == 0)
                free.push_back({r.freq_hz, r.p_dbm});
            else
                targets.push_back(r);
        }
        if (free.empty())
            throw ingestion_error("no free-space file and no position_id 0 rows in the measurement file");
        power = std::move(targets);
    }
    return ingest_measurements(power, free, grid);
}

} // namespace frespond
