// Copyright 2026 The pqrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pqrc: sweeps, reservoir tasks and reference ensembles for doped Clifford
// brickwork reservoirs.
//
//   pqrc diagnose   --config cfg.json --out runs/diag
//   pqrc task       --config cfg.json --jobs 4 --out runs/task
//   pqrc scaling    --smoke --out runs/scaling
//   pqrc haar-ref   --seed 7 --out runs/haar
//   pqrc crossovers --from-summary runs/diag/summary.csv --out runs/cross

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pqrc/expcli.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    std::string out;
    bool smoke = false;
    std::string from_summary;
};

void add_common(CLI::App *sub, Flags &f) {
    sub->add_option("--config", f.config, "JSON sweep config (defaults used when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Master seed, overrides the config");
    sub->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", f.out, "Output directory")->required();
    sub->add_flag("--smoke", f.smoke, "Reduced workload for quick checks");
}

pqrc::expcli::SweepSpec load_spec(const Flags &f, pqrc::expcli::Command cmd) {
    nlohmann::json j = nlohmann::json::object();
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error &e) {
            throw std::invalid_argument("config: " + std::string(e.what()));
        }
    }
    auto spec = pqrc::expcli::spec_from_json(j, cmd);
    if (f.seed) {
        spec.seed = *f.seed;
    }
    if (f.smoke) {
        spec.apply_smoke();
    }
    spec.validate();
    return spec;
}

void print_crossovers(const pqrc::expcli::RunOutput &run) {
    if (!run.meta.contains("crossovers")) {
        return;
    }
    for (const auto &c : run.meta["crossovers"]) {
        std::cout << "N=" << c["n_qubits"] << " d/N=" << c["d_over_n"] << " [HEURISTIC] p*=" << c["p_star"]
                  << (c["p_star_reliable"].get<bool>() ? "" : " (unreliable)") << " p#=" << c["p_sharp"]
                  << (c["p_sharp_reliable"].get<bool>() ? "" : " (unreliable)") << '\n';
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Probabilistic quantum reservoir experiments"};
    app.set_version_flag("--version", PQRC_VERSION_STRING);
    app.require_subcommand(1);

    Flags flags;
    std::vector<std::pair<CLI::App *, pqrc::expcli::Command>> subs;
    using pqrc::expcli::Command;
    for (const auto &[name, cmd, help] :
         {std::tuple{"diagnose", Command::Diagnose, "Entropy, spectral statistics, magic and anti-flatness"},
          std::tuple{"task", Command::Task, "Delay memory, NARMA and convergence rate"},
          std::tuple{"scaling", Command::Scaling, "Anti-flatness size scaling and exponents"},
          std::tuple{"haar-ref", Command::HaarRef, "Haar reference ensemble"},
          std::tuple{"crossovers", Command::Crossovers, "Heuristic crossover locators over a diagnose sweep"}}) {
        auto *sub = app.add_subcommand(name, help);
        add_common(sub, flags);
        if (cmd == Command::Crossovers) {
            sub->add_option("--from-summary", flags.from_summary, "Reuse a diagnose summary.csv")
                ->check(CLI::ExistingFile);
        }
        subs.emplace_back(sub, cmd);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        Command cmd = Command::Diagnose;
        for (const auto &[sub, c] : subs) {
            if (sub->parsed()) {
                cmd = c;
            }
        }
        const auto spec = load_spec(flags, cmd);
        std::optional<std::filesystem::path> from;
        if (!flags.from_summary.empty()) {
            from = flags.from_summary;
        }
        const auto run = pqrc::expcli::run_command(spec, flags.jobs, from);
        const std::vector<std::string> args(argv, argv + argc);
        pqrc::expcli::write_run(flags.out, spec, run, flags.jobs, flags.smoke, args);
        for (const auto &f : run.files) {
            std::cout << flags.out << '/' << f.name << "  (" << f.table.size() << " rows)\n";
        }
        print_crossovers(run);
        std::cout << "done in " << run.compute_seconds << " s\n";
    } catch (const std::exception &e) {
        std::cerr << "pqrc: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
