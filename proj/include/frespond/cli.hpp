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
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "frespond/config.hpp"
#include "frespond/detection.hpp"
#include "frespond/diffraction.hpp"
#include "frespond/errors.hpp"
#include "frespond/io.hpp"
#include "frespond/scenario.hpp"

namespace frespond::cli {

/// Process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 2,
    exit_runtime = 3,
};

struct CommonOptions {
    std::filesystem::path spec_path;
    std::filesystem::path out_dir = ".";
    AntennaModel model = AntennaModel::as_specified;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
};

struct CutsOptions {
    CommonOptions common;
    std::vector<int> columns{1, 4};
};

struct DetectOptions {
    CommonOptions common;
    std::vector<std::filesystem::path> measurements; // power csv, optional free-space csv
    bool per_frequency = false;
};

/// --threads, then FRESPOND_THREADS, then all hardware threads.
inline unsigned thread_count(const std::optional<unsigned>& flag)
{
    if (flag)
        return *flag;
    if (const char* env = std::getenv("FRESPOND_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<unsigned>(v);
        throw validation_error(std::string("FRESPOND_THREADS must be a positive integer, got '") + env + "'");
    }
    return 0;
}

/// Maps library exceptions onto the exit-code contract.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn)
{
    try {
        return fn();
    } catch (const validation_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

namespace detail {

struct Prepared {
    ExperimentSpec spec;
    ScenarioConfig cfg;
};

inline Prepared prepare(const CommonOptions& o)
{
    Prepared p{load_experiment_spec(o.spec_path), {}};
    p.cfg = p.spec.scenario_for(o.model);
    p.cfg.threads = thread_count(o.threads);
    if (o.seed)
        p.cfg.jitter.seed = *o.seed;
    return p;
}

inline json run_info(const CommonOptions& o, const ScenarioConfig& cfg)
{
    return {{"model", to_string(o.model)}, {"spec", o.spec_path.filename().string()}, {"n_p", cfg.jitter.n_p},
            {"n_freqs", cfg.freqs.size()}};
}

} // namespace detail

inline int cmd_map(const CommonOptions& o, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        auto [spec, cfg] = detail::prepare(o);
        AttenuationMap map = predict_map(cfg);
        map.config_hash = spec.config_hash;

        OutputSet files(o.out_dir, "map");
        files.add("map.csv", map_csv(map));
        files.add("map.json", map_json(map, to_string(o.model)).dump(1) + "\n");
        files.commit(spec.config_hash, cfg.jitter.seed, detail::run_info(o, cfg));

        const auto peak = std::max_element(map.positions.begin(), map.positions.end(),
                                           [](const auto& a, const auto& b) { return a.mean_db < b.mean_db; });
        out << "map: " << map.positions.size() << " positions written to " << o.out_dir.string() << "; peak "
            << std::fixed << std::setprecision(2) << peak->mean_db << " dB at position " << peak->id << '\n';
        return int{exit_ok};
    });
}

inline int cmd_cuts(const CutsOptions& opt, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        auto [spec, cfg] = detail::prepare(opt.common);
        if (opt.columns.empty())
            throw validation_error("--columns: at least one column required");
        std::vector<int> ids;
        for (int c : opt.columns) {
            if (c < 1 || c > cfg.grid.n_along())
                throw validation_error("--columns: unknown column " + std::to_string(c) + " (grid has 1.." +
                                       std::to_string(cfg.grid.n_along()) + ")");
            for (int id : cfg.grid.column_ids(c))
                ids.push_back(id);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        AttenuationMap map = predict_map(cfg, ids);
        map.config_hash = spec.config_hash;

        OutputSet files(opt.common.out_dir, "cuts");
        for (int c : opt.columns) {
            const auto col = cfg.grid.column_ids(c);
            const std::string name = "cut_col" + std::to_string(c) + ".csv";
            files.add(name, cut_csv(map, col));
            out << "cut column " << c << " (x = " << exact(map.at(col.front()).x_m) << " m): " << name << '\n';
        }
        files.commit(spec.config_hash, cfg.jitter.seed, detail::run_info(opt.common, cfg));
        return int{exit_ok};
    });
}

inline int cmd_detect(const DetectOptions& opt, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        auto [spec, cfg] = detail::prepare(opt.common);
        if (opt.measurements.size() > 2)
            throw validation_error("--measurements takes a power CSV and an optional free-space CSV");
        const MembershipSplit split = spec.split();
        FitOptions fit_opt;
        fit_opt.per_frequency = opt.per_frequency;

        AttenuationMap map = predict_map(cfg);
        map.config_hash = spec.config_hash;
        const DetectionReport model = detection_report(map, split, fit_opt);

        json report = {{"schema", 1},
                       {"model", to_string(opt.common.model)},
                       {"observations", opt.per_frequency ? "per_frequency" : "per_position"},
                       {"membership",
                        {{"inside", split.inside_ids.size()},
                         {"outside", split.outside_ids.size()},
                         {"excluded", split.excluded_ids.size()}}},
                       {"predicted", to_json(model)}};

        OutputSet files(opt.common.out_dir, "detect");
        files.add("roc_model.csv", roc_csv(model.roc));

        std::optional<DetectionReport> measured;
        if (!opt.measurements.empty()) {
            std::ifstream power(opt.measurements[0]);
            if (!power)
                throw ingestion_error("cannot open " + opt.measurements[0].string());
            std::ifstream free;
            if (opt.measurements.size() == 2) {
                free.open(opt.measurements[1]);
                if (!free)
                    throw ingestion_error("cannot open " + opt.measurements[1].string());
            }
            const AttenuationMap mmap =
                ingest_measurements(power, opt.measurements.size() == 2 ? &free : nullptr, cfg.grid);
            measured = detection_report(mmap, split, fit_opt);
            report["measured"] = to_json(*measured);
            files.add("roc_measured.csv", roc_csv(measured->roc));
        }
        files.add("detect.json", report.dump(2) + "\n");
        files.commit(spec.config_hash, cfg.jitter.seed, detail::run_info(opt.common, cfg));

        auto line = [&](const char* tag, const DetectionReport& r) {
            out << tag << ": mu_F0 = " << std::fixed << std::setprecision(2) << r.fit.f0.mu()
                << " dB, sigma_F0 = " << r.fit.f0.sigma() << " dB, mu_F1 = " << r.fit.f1.mu()
                << " dB, sigma_F1 = " << r.fit.f1.sigma() << " dB, separation = " << r.fit.separation_db()
                << " dB, KL = " << std::setprecision(3) << r.kl << ", AUC = " << std::setprecision(4) << r.roc.auc
                << '\n';
        };
        line("predicted", model);
        if (measured)
            line("measured ", *measured);
        return int{exit_ok};
    });
}

/// Schema check, near-field warnings and a cost estimate. Warnings keep exit code 0.
inline int cmd_validate(const CommonOptions& o, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        auto [spec, cfg] = detail::prepare(o);
        out << "schema: OK (config " << spec.config_hash << ")\n";
        int warnings = 0;
        int errors = 0;
        const double near_tx =
            cfg.tx_pat.is_isotropic() ? cfg.diffraction.near_field_omni_m : cfg.diffraction.near_field_directional_m;
        const double near_rx =
            cfg.rx_pat.is_isotropic() ? cfg.diffraction.near_field_omni_m : cfg.diffraction.near_field_directional_m;
        std::size_t max_samples = 0;
        double max_step = 0.0;
        GridPosition costliest = cfg.grid.positions().front();
        const double lambda_min = wavelength_of(*std::max_element(cfg.freqs.begin(), cfg.freqs.end()));
        for (const auto& p : cfg.grid.positions()) {
            if (!(p.x_m > 0.0 && p.x_m < cfg.geom.d())) {
                out << "error: position " << p.id << " at x = " << exact(p.x_m)
                    << " m is not strictly between the antennas\n";
                ++errors;
                continue;
            }
            const BodySheet sheet = cfg.sheet_at(p.x_m, p.y_m);
            const double dtx = distance_to_sheet(sheet, cfg.geom.tx_pos());
            const double drx = distance_to_sheet(sheet, cfg.geom.rx_pos());
            if (dtx < near_tx || drx < near_rx) {
                out << "warning: position " << p.id << " (x = " << exact(p.x_m) << " m): sheet is "
                    << std::setprecision(3) << std::min(dtx, drx)
                    << " m from an antenna, inside its near-field region\n";
                ++warnings;
            }
            const double step = resolve_step(cfg.quad, cfg.geom, sheet, lambda_min);
            const auto tiling = tile_sheet(sheet, step);
            if (tiling.size() > max_samples) {
                max_samples = tiling.size();
                max_step = step;
                costliest = p;
            }
        }
        if (spec.membership) {
            const auto split = spec.split();
            out << "membership: " << split.inside_ids.size() << " inside, " << split.outside_ids.size()
                << " outside, " << split.excluded_ids.size() << " excluded\n";
            if (split.inside_ids.empty() || split.outside_ids.empty()) {
                out << "warning: a membership set is empty; detection will fail\n";
                ++warnings;
            }
        }
        if (errors == 0) {
            // Calibrate the kernel on the costliest position.
            const auto& p = costliest;
            DiffractionOptions d1 = cfg.diffraction;
            d1.threads = 1;
            const auto t0 = std::chrono::steady_clock::now();
            (void)field_ratio_sweep(cfg.geom, cfg.sheet_at(p.x_m, p.y_m), cfg.freqs, cfg.tx_pat, cfg.rx_pat, cfg.quad,
                                    d1);
            const double per_sweep = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const double sweeps = static_cast<double>(cfg.grid.size()) * cfg.jitter.n_p;
            const unsigned workers = resolve_threads(cfg.threads);
            out << "cost: up to " << max_samples << " samples per field ratio (step " << std::setprecision(4)
                << max_step * 1e3 << " mm), " << cfg.freqs.size() << " frequencies, "
                << static_cast<long long>(sweeps) << " sweeps; projected map runtime " << std::setprecision(1)
                << std::fixed << per_sweep * sweeps / workers << " s on " << workers << " thread(s)\n";
        }
        out << (errors ? "FAILED" : (warnings ? "OK with warnings" : "OK")) << " (" << errors << " error(s), "
            << warnings << " warning(s))\n";
        return errors ? int{exit_validation} : int{exit_ok};
    });
}

} // namespace frespond::cli
