// SPDX-License-Identifier: Apache-2.0
//
// beamlearn: decentralized interference-aware beam codebook learning
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


// beamlearn command-line front end.
//
//   beamlearn synth        --config run.cfg --out runs/a
//   beamlearn train        --config run.cfg --seed 7 --out runs/a
//   beamlearn eval-sir     --config run.cfg --codebook runs/a/codebook_bs0.csv --codebook runs/a/codebook_bs1.csv --out runs/a/sir
//   beamlearn roc | pattern | cluster | theory-audit ...

#include <beamlearn/app.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv)
{
    using namespace beamlearn;

    CLI::App cli{"Decentralized interference-aware beam codebook learning"};
    cli.require_subcommand(1);

    std::string config_path, out_dir = "out", policy;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers, p_meas, q_meas;
    app::Inputs inputs;
    std::string scenario_path;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"synth", "generate the synthetic scenario (channel dataset JSON)"},
        {"cluster", "cluster each BS's users and write the assignment"},
        {"train", "learn one codebook per BS without information exchange"},
        {"eval-sir", "per-user average / minimum SIR map and achievable rate"},
        {"roc", "ROC curves of the interference decision rule"},
        {"pattern", "beam patterns and null depths toward the interferer"},
        {"theory-audit", "numerical checks of the expected-interference analysis"},
    };
    for (const auto &[name, help] : commands)
    {
        CLI::App *sub = cli.add_subcommand(name, help);
        sub->add_option("--config", config_path, "run configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override the configured seed");
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--workers", workers, "worker threads (0 = available cores)");
        sub->add_option("--policy", policy, "interferer policy")->check(CLI::IsMember({"random", "dft", "colearn"}));
        sub->add_option("--p-measurements", p_meas, "P, interference-only samples per beam");
        sub->add_option("--q-measurements", q_meas, "Q, signal-plus-interference samples per user");
        if (name != "synth" && name != "theory-audit")
            sub->add_option("--scenario", scenario_path, "scenario JSON (default: synthesize from the config)")->check(CLI::ExistingFile);
        if (name == "eval-sir" || name == "pattern")
            sub->add_option("--codebook", inputs.codebooks, "codebook CSV, once per BS in BS order (default: beamsteering baseline)")->check(CLI::ExistingFile);
        if (name == "train")
            sub->add_flag("--log-measurements", inputs.log_measurements, "also write every raw power sample");
    }

    try
    {
        cli.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : app::ConfigFailure;
    }

    const std::string command = cli.get_subcommands().front()->get_name();
    RunConfig cfg;
    try
    {
        if (!config_path.empty())
            cfg = parse_config(config_path);
        if (seed)
            cfg.set("seed", std::to_string(*seed));
        if (workers)
            cfg.set("workers", std::to_string(*workers));
        if (!policy.empty())
            cfg.set("policy", policy);
        if (p_meas)
            cfg.set("measure.p", std::to_string(*p_meas));
        if (q_meas)
            cfg.set("measure.q", std::to_string(*q_meas));
    }
    catch (const ConfigError &e)
    {
        std::cerr << "beamlearn " << command << ": configuration error: " << e.what() << '\n';
        return app::ConfigFailure;
    }
    if (!scenario_path.empty())
        inputs.scenario = scenario_path;

    return app::run(command, cfg, inputs, out_dir, std::cout, std::cerr);
}
