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

#pragma once

#include <boost/version.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "pqrc/expcli/diagnose.hpp"
#include "pqrc/expcli/scaling.hpp"
#include "pqrc/expcli/spec.hpp"
#include "pqrc/expcli/task.hpp"
#include "pqrc/version.hpp"

namespace pqrc::expcli {

struct OutputFile {
    std::string name;
    Table table;
};

/// Everything a command produces. `results.csv` and `summary.csv` are
/// always present; the rest are plot-ready companions.
struct RunOutput {
    std::vector<OutputFile> files;
    nlohmann::json meta = nlohmann::json::object(); ///< command-specific extras
    double compute_seconds = 0.0;
};

[[nodiscard]] inline nlohmann::json library_versions() {
    return {
        {"pqrc", PQRC_VERSION_STRING},
        {"compiler", __VERSION__},
        {"cplusplus", __cplusplus},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
    };
}

/// Crossover inputs recovered from a diagnose summary.csv.
[[nodiscard]] inline std::vector<CrossoverRow> crossovers_from_summary_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("crossovers: empty summary file");
    }
    const auto header = split_csv_line(line);
    auto col = [&](std::string_view name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        throw std::runtime_error("crossovers: summary lacks column '" + std::string(name) + "'");
    };
    const auto cn = col("n_qubits");
    const auto cd = col("d_over_n");
    const auto cp = col("p");
    const auto cr = col("mean_r");
    const auto cu = col("r_usable");
    const auto cg = col("relative_gap");
    std::map<std::pair<std::size_t, std::size_t>, std::vector<CrossoverInput>> groups;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) {
            throw std::runtime_error("crossovers: ragged summary row");
        }
        CrossoverInput x;
        x.p = std::stod(f[cp]);
        if (!f[cr].empty() && f[cu] == "1") {
            x.mean_r = std::stod(f[cr]);
        }
        if (!f[cg].empty()) {
            x.relative_gap = std::stod(f[cg]);
        }
        groups[{std::stoul(f[cn]), std::stoul(f[cd])}].push_back(x);
    }
    std::vector<CrossoverRow> out;
    for (auto &[key, pts] : groups) {
        out.push_back({key.first, key.second, locate_crossovers(std::move(pts))});
    }
    return out;
}

namespace detail {

[[nodiscard]] inline nlohmann::json crossover_json(std::span<const CrossoverRow> rows) {
    auto j = nlohmann::json::array();
    for (const auto &r : rows) {
        auto opt = [](const std::optional<double> &v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
        j.push_back({{"n_qubits", r.n_qubits},
                     {"d_over_n", r.d_over_n},
                     {"label", "HEURISTIC"},
                     {"p_star", opt(r.estimate.p_star)},
                     {"p_star_reliable", r.estimate.p_star_reliable},
                     {"p_sharp", opt(r.estimate.p_sharp)},
                     {"p_sharp_reliable", r.estimate.p_sharp_reliable},
                     {"notes", r.estimate.notes}});
    }
    return j;
}

[[nodiscard]] inline std::vector<OutputFile> diagnose_files(const SweepSpec &spec, const DiagnoseResult &res) {
    std::vector<OutputFile> files{{"results.csv", diagnose_results_table(spec, res)},
                                  {"summary.csv", diagnose_summary_table(res)},
                                  {"r_histogram.csv", r_histogram_table(spec, res)}};
    if (spec.record_curves) {
        files.push_back({"entropy_curves.csv", entropy_curves_table(res)});
    }
    if (!res.haar.empty()) {
        files.push_back({"haar_reference.csv", haar_reference_table(res.haar, true)});
    }
    return files;
}

} // namespace detail

/// Runs one command. For crossovers, `from_summary` reuses an existing
/// diagnose summary.csv instead of sweeping.
[[nodiscard]] inline RunOutput run_command(const SweepSpec &spec, std::size_t jobs,
                                           const std::optional<std::filesystem::path> &from_summary = {}) {
    RunOutput out;
    const auto t0 = std::chrono::steady_clock::now();
    switch (spec.command) {
    case Command::Diagnose: {
        out.files = detail::diagnose_files(spec, run_diagnose(spec, jobs));
        break;
    }
    case Command::Crossovers: {
        std::vector<CrossoverRow> rows;
        if (from_summary) {
            std::ifstream in(*from_summary);
            if (!in) {
                throw std::runtime_error("crossovers: cannot open " + from_summary->string());
            }
            rows = crossovers_from_summary_csv(in);
            out.meta["from_summary"] = from_summary->string();
        } else {
            const auto res = run_diagnose(spec, jobs);
            out.files = detail::diagnose_files(spec, res);
            rows = crossovers_by_group(res.summary);
        }
        out.files.push_back({"crossovers.csv", crossovers_table(rows)});
        out.meta["crossovers"] = detail::crossover_json(rows);
        break;
    }
    case Command::Task: {
        const auto res = run_task(spec, jobs);
        out.files = {{"results.csv", task_results_table(spec, res)}, {"summary.csv", task_summary_table(res)}};
        if (spec.task.memory) {
            out.files.push_back({"memory_curves.csv", memory_curves_table(res)});
        }
        if (spec.task.convergence) {
            out.files.push_back({"convergence_curves.csv", convergence_curves_table(res)});
        }
        break;
    }
    case Command::Scaling: {
        const auto res = run_scaling(spec, jobs);
        out.files = {{"results.csv", scaling_results_table(spec, res)},
                     {"summary.csv", scaling_summary_table(res)},
                     {"anti_flatness.csv", anti_flatness_table(res)}};
        break;
    }
    case Command::HaarRef: {
        const auto res = run_haar_ref(spec, jobs);
        out.files = {{"results.csv", haar_results_table(spec, res)},
                     {"summary.csv", haar_reference_table(res.draws.references, spec.magic)}};
        break;
    }
    }
    out.compute_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// Writes every table plus meta.json into `dir`. Wall-clock figures live
/// only in meta.json so the CSV bytes depend on seed and config alone.
inline void write_run(const std::filesystem::path &dir, const SweepSpec &spec, const RunOutput &run,
                      std::size_t jobs, bool smoke, const std::vector<std::string> &argv) {
    std::filesystem::create_directories(dir);
    nlohmann::json files = nlohmann::json::array();
    for (const auto &f : run.files) {
        std::ofstream os(dir / f.name, std::ios::binary);
        if (!os) {
            throw std::runtime_error("cannot write " + (dir / f.name).string());
        }
        os << f.table.to_csv();
        files.push_back({{"name", f.name}, {"rows", f.table.size()}, {"columns", f.table.columns()}});
    }
    nlohmann::json meta = {
        {"command", command_name(spec.command)},
        {"config", spec_to_json(spec)},
        {"versions", library_versions()},
        {"jobs", jobs},
        {"smoke", smoke},
        {"argv", argv},
        {"timings", {{"compute_seconds", run.compute_seconds}}},
        {"files", files},
    };
    for (const auto &[k, v] : run.meta.items()) {
        meta[k] = v;
    }
    std::ofstream os(dir / "meta.json", std::ios::binary);
    os << meta.dump(2) << '\n';
}

} // namespace pqrc::expcli
