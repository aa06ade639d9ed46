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

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "frespond/config.hpp"
#include "frespond/detection.hpp"
#include "frespond/errors.hpp"
#include "frespond/format.hpp"
#include "frespond/scenario.hpp"

namespace frespond {

inline constexpr const char* tool_version = "1.0.0";

// ---- map ----------------------------------------------------------------

inline std::string map_csv(const AttenuationMap& map)
{
    std::ostringstream out;
    out << "position_id,x_m,y_m,a_s_db\n";
    for (const auto& p : map.positions)
        out << p.id << ',' << exact(p.x_m) << ',' << exact(p.y_m) << ',' << exact(p.mean_db) << '\n';
    return out.str();
}

struct MapRow {
    int position_id = 0;
    double x_m = 0.0;
    double y_m = 0.0;
    double a_s_db = 0.0;
};

inline std::vector<MapRow> read_map_csv(std::istream& in, const std::string& origin = "<map>")
{
    std::vector<std::size_t> lines;
    const auto rows = detail::read_csv(in, {"position_id", "x_m", "y_m", "a_s_db"}, origin, lines);
    std::vector<MapRow> out;
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.push_back({static_cast<int>(detail::cell_number(rows[r][0], origin, lines[r], 1)),
                       detail::cell_number(rows[r][1], origin, lines[r], 2),
                       detail::cell_number(rows[r][2], origin, lines[r], 3),
                       detail::cell_number(rows[r][3], origin, lines[r], 4)});
    return out;
}

inline json map_json(const AttenuationMap& map, const std::string& model)
{
    json positions = json::array();
    for (const auto& p : map.positions) {
        json rec = {{"id", p.id},
                    {"x_m", p.x_m},
                    {"y_m", p.y_m},
                    {"a_s_db", p.mean_db},
                    {"band_lo_db", p.band_lo_db},
                    {"band_hi_db", p.band_hi_db},
                    {"near_field", p.near_field},
                    {"per_freq_db", p.per_freq_db}};
        if (!p.samples_db.empty())
            rec["samples_db"] = p.samples_db;
        positions.push_back(std::move(rec));
    }
    return {{"schema", 1},
            {"source", map.source},
            {"model", model},
            {"config_hash", map.config_hash},
            {"seed", map.seed},
            {"band_percentiles", {band_lo_percentile, band_hi_percentile}},
            {"freqs_hz", map.freqs_hz},
            {"positions", std::move(positions)}};
}

// ---- cuts ---------------------------------------------------------------

inline std::string cut_csv(const AttenuationMap& map, const std::vector<int>& ids)
{
    std::ostringstream out;
    out << "position_id,x_m,y_m,a_s_db,band_lo_db,band_hi_db\n";
    for (int id : ids) {
        const auto& p = map.at(id);
        out << p.id << ',' << exact(p.x_m) << ',' << exact(p.y_m) << ',' << exact(p.mean_db) << ','
            << exact(p.band_lo_db) << ',' << exact(p.band_hi_db) << '\n';
    }
    return out.str();
}

// ---- detection ----------------------------------------------------------

inline std::string roc_csv(const RocCurve& roc)
{
    std::ostringstream out;
    out << "pfa,pd\n";
    for (const auto& p : roc.points)
        out << exact(p.pfa) << ',' << exact(p.pd) << '\n';
    return out.str();
}

inline std::vector<std::pair<double, double>> read_roc_csv(std::istream& in, const std::string& origin = "<roc>")
{
    std::vector<std::size_t> lines;
    const auto rows = detail::read_csv(in, {"pfa", "pd"}, origin, lines);
    std::vector<std::pair<double, double>> out;
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.emplace_back(detail::cell_number(rows[r][0], origin, lines[r], 1),
                         detail::cell_number(rows[r][1], origin, lines[r], 2));
    return out;
}

struct DetectionReport {
    HypothesisFit fit;
    double kl = 0.0;
    RocCurve roc;
};

inline DetectionReport detection_report(const AttenuationMap& map, const MembershipSplit& split,
                                        const FitOptions& opt = {})
{
    DetectionReport r{fit_hypotheses(map, split, opt), 0.0, {}};
    r.kl = kl_divergence(r.fit.f0, r.fit.f1);
    r.roc = roc(r.fit.f0, r.fit.f1);
    return r;
}

inline json to_json(const GaussianHypothesis& h) { return {{"mu_db", h.mu()}, {"sigma_db", h.sigma()}}; }

inline json to_json(const DetectionReport& r)
{
    return {{"f0", to_json(r.fit.f0)},
            {"f1", to_json(r.fit.f1)},
            {"l0", r.fit.l0},
            {"l1", r.fit.l1},
            {"separation_db", r.fit.separation_db()},
            {"mu_f0_minus_mu_f1_db", r.fit.f0.mu() - r.fit.f1.mu()},
            {"kl_f0_f1", r.kl},
            {"auc", r.roc.auc}};
}

// ---- manifest -----------------------------------------------------------

/// UTC timestamp; honours SOURCE_DATE_EPOCH so manifests can be reproducible too.
inline std::string utc_timestamp()
{
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0')
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Collects output files in memory and writes them together with their manifest.
class OutputSet {
public:
    OutputSet(std::filesystem::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command))
    {
        started_ = utc_timestamp();
    }

    void add(const std::string& name, std::string contents) { files_.emplace_back(name, std::move(contents)); }

    /// Writes every file plus manifest.json. Returns the file names written.
    std::vector<std::string> commit(const std::string& config_hash, std::uint64_t seed, json extra = json::object())
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec)
            throw error("cannot create output directory " + dir_.string() + ": " + ec.message());
        json outputs = json::array();
        std::vector<std::string> names;
        for (const auto& [name, contents] : files_) {
            write_file(dir_ / name, contents);
            outputs.push_back({{"file", name}, {"bytes", contents.size()}, {"fnv1a64", hex64(fnv1a64(contents))}});
            names.push_back(name);
        }
        json manifest = {{"tool", "frespond"},
                         {"version", tool_version},
                         {"command", command_},
                         {"config_hash", config_hash},
                         {"seed", seed},
                         {"started_utc", started_},
                         {"finished_utc", utc_timestamp()},
                         {"outputs", std::move(outputs)}};
        for (auto& [k, v] : extra.items())
            manifest[k] = v;
        write_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
        names.push_back("manifest.json");
        return names;
    }

    static void write_file(const std::filesystem::path& path, const std::string& contents)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw error("cannot write " + path.string());
        out << contents;
        if (!out)
            throw error("failed writing " + path.string());
    }

private:
    std::filesystem::path dir_;
    std::string command_;
    std::string started_;
    std::vector<std::pair<std::string, std::string>> files_;
};

} // namespace frespond
