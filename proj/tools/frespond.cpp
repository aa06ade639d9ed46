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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "frespond/cli.hpp"

namespace {

void add_common(CLI::App* cmd, frespond::cli::CommonOptions& o, std::string& model, bool with_out = true)
{
    cmd->add_option("spec", o.spec_path, "Experiment spec (JSON)")->required();
    if (with_out)
        cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--model", model, "Antenna pair: omni, dir or mixed (default: as in the spec)")
        ->check(CLI::IsMember({"omni", "dir", "mixed"}));
    cmd->add_option("--threads", o.threads, "Worker threads (fallback: FRESPOND_THREADS)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Override the jitter seed");
}

} // namespace

int main(int argc, char** argv)
{
    using namespace frespond::cli;

    CLI::App app{"frespond: body-induced attenuation and passive detection on radio links"};
    app.set_version_flag("--version", std::string(frespond::tool_version));
    app.require_subcommand(1);

    CommonOptions map_opt;
    CutsOptions cuts_opt;
    DetectOptions detect_opt;
    CommonOptions validate_opt;
    std::string map_model;
    std::string cuts_model;
    std::string detect_model;
    std::string validate_model;

    auto* map = app.add_subcommand("map", "Predicted attenuation map over the measurement grid");
    add_common(map, map_opt, map_model);

    auto* cuts = app.add_subcommand("cuts", "Cuts across the LOS at selected grid columns");
    add_common(cuts, cuts_opt.common, cuts_model);
    cuts->add_option("--columns", cuts_opt.columns, "1-based grid columns")->delimiter(',')->capture_default_str();

    auto* detect = app.add_subcommand("detect", "Hypothesis fit, KL divergence and ROC");
    add_common(detect, detect_opt.common, detect_model);
    detect->add_option("--measurements", detect_opt.measurements, "Power CSV [free-space CSV]")
        ->expected(1, 2);
    detect->add_flag("--per-frequency", detect_opt.per_frequency,
                     "Use per-frequency attenuations instead of per-position means");

    auto* validate = app.add_subcommand("validate", "Check a spec and estimate its cost");
    add_common(validate, validate_opt, validate_model, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_validation;
    }

    auto model_of = [](const std::string& m) { return frespond::parse_antenna_model(m); };
    if (*map) {
        map_opt.model = model_of(map_model);
        return cmd_map(map_opt, std::cout, std::cerr);
    }
    if (*cuts) {
        cuts_opt.common.model = model_of(cuts_model);
        return cmd_cuts(cuts_opt, std::cout, std::cerr);
    }
    if (*detect) {
        detect_opt.common.model = model_of(detect_model);
        return cmd_detect(detect_opt, std::cout, std::cerr);
    }
    validate_opt.model = model_of(validate_model);
    return cmd_validate(validate_opt, std::cout, std::cerr);
}
