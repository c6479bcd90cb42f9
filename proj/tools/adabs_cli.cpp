// Copyright 2026 The adabs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "adabs_commands.hpp"

namespace {

using adabs::cli::ExitCode;

int run(const std::function<void(const nlohmann::json &, const adabs::cli::RunOptions &)> &cmd,
        const adabs::cli::RunOptions &opt) {
    try {
        cmd(adabs::cli::load_config(opt.config_path), opt);
        return ExitCode::kOk;
    } catch (const adabs::cli::ConfigError &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return ExitCode::kConfigError;
    } catch (const adabs::DomainError &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return ExitCode::kConfigError;
    } catch (const adabs::TruncationError &e) {
        std::fprintf(stderr, "numerical failure: %s (tail mass %g)\n", e.what(), e.tail_mass);
        return ExitCode::kNumericalError;
    } catch (const adabs::QuadratureError &e) {
        std::fprintf(stderr, "numerical failure: %s (achieved error %g)\n", e.what(), e.achieved);
        return ExitCode::kNumericalError;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Adaptive absorption of single photons: evolution, trajectories, P-function, posteriors, cascades"};
    app.require_subcommand(1);

    const std::map<std::string, std::pair<std::string, void (*)(const nlohmann::json &, const adabs::cli::RunOptions &)>>
        commands = {
            {"evolve", {"Photon-number distribution over a time grid", adabs::cli::cmd_evolve}},
            {"trajectories", {"Monte Carlo first-detection trajectories", adabs::cli::cmd_trajectories}},
            {"pfunction", {"Radial P-function of an absorbed coherent state", adabs::cli::cmd_pfunction}},
            {"posterior", {"Photon-number posterior given a detection time", adabs::cli::cmd_posterior}},
            {"cascade", {"Beam-splitter cascade with click feedback", adabs::cli::cmd_cascade}},
        };

    adabs::cli::RunOptions opt;
    std::uint64_t seed = 0;
    std::map<std::string, CLI::App *> subs;
    std::map<std::string, CLI::Option *> seed_opts;
    for (const auto &[name, entry] : commands) {
        CLI::App *sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", opt.config_path, "JSON config file")->required();
        seed_opts[name] = sub->add_option("--seed", seed, "RNG seed (overrides the config)");
        sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? ExitCode::kOk : ExitCode::kConfigError;
    }

    for (const auto &[name, sub] : subs) {
        if (!sub->parsed()) continue;
        if (seed_opts[name]->count() > 0) opt.seed = seed;
        return run(commands.at(name).second, opt);
    }
    return ExitCode::kConfigError;
}
