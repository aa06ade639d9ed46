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

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include <unistd.h>

namespace testing_support {

namespace fs = std::filesystem;

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t")
    {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("frespond-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// A spec small enough to run in well under a second: 3 x 3 grid, 5 frequencies, 3 jitter draws.
inline nlohmann::json small_spec()
{
    return nlohmann::json::parse(R"({
      "schema": 1,
      "link": {"d_m": 4.0, "h_m": 0.99},
      "body": {"height_m": 2.0, "width_m": 0.55},
      "grid": {"n_along": 3, "n_across": 3, "spacing_along_m": 1.0, "spacing_across_m": 0.6, "origin_x_m": 1.0},
      "antennas": {
        "tx": {"kind": "gaussian_beam", "hpbw_az_deg": 60, "hpbw_el_deg": 76, "gain_dbi": 9},
        "rx": {"kind": "gaussian_beam", "hpbw_az_deg": 60, "hpbw_el_deg": 76, "gain_dbi": 9},
        "omni": {"kind": "isotropic", "gain_dbi": 2}
      },
      "frequencies": {"start_hz": 2.4e9, "stop_hz": 2.5e9, "count": 5},
      "jitter": {"delta_m": 0.06, "n_p": 3, "seed": 1},
      "membership": {"rule": "fresnel_band", "inside_scale": 0.9, "outside_scale": 1.2}
    })");
}

inline fs::path write_spec(const TempDir& dir, const nlohmann::json& spec, const std::string& name = "spec.json")
{
    const fs::path p = dir / name;
    write_text(p, spec.dump(2));
    return p;
}

} // namespace testing_support
