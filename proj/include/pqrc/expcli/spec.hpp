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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pqrc/qcore.hpp"
#include "pqrc/reservoir.hpp"
#include "pqrc/rng.hpp"

namespace pqrc::expcli {

enum class Command { Diagnose, Task, Scaling, HaarRef, Crossovers };

[[nodiscard]] inline std::string_view command_name(Command c) noexcept {
    switch (c) {
    case Command::Diagnose:
        return "diagnose";
    case Command::Task:
        return "task";
    case Command::Scaling:
        return "scaling";
    case Command::HaarRef:
        return "haar-ref";
    case Command::Crossovers:
        return "crossovers";
    }
    return "unknown";
}

[[nodiscard]] inline Command parse_command(std::string_view s) {
    for (const auto c : {Command::Diagnose, Command::Task, Command::Scaling, Command::HaarRef,
                         Command::Crossovers}) {
        if (command_name(c) == s) {
            return c;
        }
    }
    throw std::invalid_argument("unknown command '" + std::string(s) + "'");
}

enum class InitialState { Zero, RandomProduct };

/// Independent random streams of one realization.
enum class Stream : std::uint64_t {
    Template = 1,
    InitialState = 2,
    Inputs = 3,
    Haar = 4,
    Convergence = 5,
};

struct TaskOptions {
    bool memory = true;
    bool narma = true;
    bool convergence = true;
    std::size_t max_tau = 12;
    std::size_t narma_order = 10;
    std::size_t convergence_steps = 80;
};

struct ReservoirOptions {
    double input_scale = 1e-3;
    std::size_t washout = 500;
    std::size_t steps = 2000;
    double ridge_lambda = 1e-8;
    double train_fraction = 0.7;
    bool all_qubit_observables = false;
};

/// One sweep over the grid p x (d / N) x N with a fixed number of
/// realizations per point. Depth is d = d_over_n * N brick periods.
struct SweepSpec {
    Command command = Command::Diagnose;
    std::vector<double> p_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<std::size_t> d_over_n{2};
    std::vector<std::size_t> n_qubits{10};
    std::size_t realizations = 20;
    std::uint64_t seed = 20260101;
    InitialState initial_state = InitialState::Zero;
    std::optional<std::size_t> memory_size;
    bool record_curves = true;
    bool magic = true;
    bool haar_baseline = true;
    std::size_t haar_samples = 100;
    std::size_t histogram_bins = 50;
    /// A point's mean r is used only when at least this fraction of its
    /// realizations have a usable spectrum.
    double r_min_available_fraction = 0.1;
    TaskOptions task;
    ReservoirOptions reservoir;

    [[nodiscard]] std::size_t point_count() const noexcept {
        return p_grid.size() * d_over_n.size() * n_qubits.size();
    }

    void validate() const {
        if (p_grid.empty() || d_over_n.empty() || n_qubits.empty()) {
            throw std::invalid_argument("config: p, d_over_n and n_qubits must be nonempty");
        }
        for (const double p : p_grid) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument("config: every p must lie in [0, 1]");
            }
        }
        for (const auto r : d_over_n) {
            if (r == 0) {
                throw std::invalid_argument("config: d_over_n must be positive");
            }
        }
        for (const auto n : n_qubits) {
            if (n < 2 || n > kMaxStateQubits) {
                throw std::invalid_argument("config: n_qubits outside [2, " +
                                            std::to_string(kMaxStateQubits) + "]");
            }
            if (!memory_size && n % 2 != 0) {
                throw std::invalid_argument("config: odd n_qubits needs an explicit memory_size");
            }
            if (memory_size && (*memory_size == 0 || *memory_size >= n)) {
                throw std::invalid_argument("config: memory_size must lie in [1, N)");
            }
        }
        if (realizations == 0) {
            throw std::invalid_argument("config: realizations must be at least 1");
        }
        if (command == Command::Scaling && n_qubits.size() < 3) {
            throw std::invalid_argument("config: scaling needs at least 3 values of n_qubits");
        }
        if ((command == Command::HaarRef || haar_baseline) && haar_samples < 50) {
            throw std::invalid_argument("config: haar_samples must be at least 50");
        }
        if (histogram_bins == 0) {
            throw std::invalid_argument("config: histogram_bins must be positive");
        }
        if (!(r_min_available_fraction >= 0.0 && r_min_available_fraction <= 1.0)) {
            throw std::invalid_argument("config: r_min_available_fraction outside [0, 1]");
        }
        if (command == Command::Task) {
            (void)reservoir_config(n_qubits.front(), d_over_n.front(), 0.0, 0);
            if (task.max_tau >= reservoir.washout) {
                throw std::invalid_argument("config: task.max_tau must be below reservoir.washout");
            }
            if (task.convergence_steps < 4) {
                throw std::invalid_argument("config: task.convergence_steps must be at least 4");
            }
        }
    }

    [[nodiscard]] ReservoirConfig reservoir_config(std::size_t n, std::size_t ratio, double p,
                                                   std::uint64_t template_seed) const {
        auto cfg = ReservoirConfig::standard(n, ratio * n, p, template_seed, memory_size);
        cfg.input_scale = reservoir.input_scale;
        cfg.washout = reservoir.washout;
        cfg.steps = reservoir.steps;
        cfg.ridge_lambda = reservoir.ridge_lambda;
        cfg.train_fraction = reservoir.train_fraction;
        cfg.all_qubit_observables = reservoir.all_qubit_observables;
        cfg.validate();
        return cfg;
    }

    /// Seed of stream `s` for realization k at grid point (n, ratio, p).
    /// Keyed on parameter values, so the same point draws the same circuits
    /// in every command and under any grid.
    [[nodiscard]] std::uint64_t realization_seed(Stream s, std::size_t n, std::size_t ratio, double p,
                                                 std::size_t k) const noexcept {
        return child_seed(seed, {static_cast<std::uint64_t>(s), n, ratio, std::bit_cast<std::uint64_t>(p), k});
    }

    [[nodiscard]] std::uint64_t haar_seed(std::size_t n) const noexcept {
        return child_seed(seed, {static_cast<std::uint64_t>(Stream::Haar), n});
    }

    /// Reduced workload for quick checks.
    void apply_smoke() {
        realizations = std::min<std::size_t>(realizations, 10);
        haar_samples = 50;
        if (command == Command::Scaling) {
            n_qubits = {4, 6, 8};
        } else {
            n_qubits = {6};
        }
    }
};

namespace detail {

inline void reject_unknown(const nlohmann::json &j, std::initializer_list<std::string_view> allowed,
                           std::string_view where) {
    if (!j.is_object()) {
        throw std::invalid_argument("config: " + std::string(where) + " must be an object");
    }
    for (const auto &[key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw std::invalid_argument("config: unknown key '" + key + "' in " + std::string(where));
        }
    }
}

template <class T>
void read(const nlohmann::json &j, const char *key, T &out) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw std::invalid_argument(std::string("config: bad type for '") + key + "'");
    }
}

/// Grid values are rounded to 12 decimals so ranges give stable seeds.
[[nodiscard]] inline double round_grid(double x) { return std::round(x * 1e12) / 1e12; }

[[nodiscard]] inline std::vector<double> read_p_grid(const nlohmann::json &j) {
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto &v : j) {
            if (!v.is_number()) {
                throw std::invalid_argument("config: p entries must be numbers");
            }
            out.push_back(round_grid(v.get<double>()));
        }
        return out;
    }
    reject_unknown(j, {"start", "stop", "step"}, "p");
    double start = 0.0;
    double stop = 1.0;
    double step = 0.1;
    read(j, "start", start);
    read(j, "stop", stop);
    read(j, "step", step);
    if (!(step > 0.0) || stop < start) {
        throw std::invalid_argument("config: p range needs step > 0 and stop >= start");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(round_grid(start + static_cast<double>(i) * step));
    }
    return out;
}

} // namespace detail

/// Parses a JSON sweep config. Unknown keys are errors; absent keys keep
/// their defaults.
[[nodiscard]] inline SweepSpec spec_from_json(const nlohmann::json &j, Command command) {
    using detail::read;
    detail::reject_unknown(j,
                           {"command", "p", "d_over_n", "n_qubits", "realizations", "seed", "initial_state",
                            "memory_size", "record_curves", "magic", "haar_baseline", "haar_samples",
                            "histogram_bins", "r_min_available_fraction", "task", "reservoir"},
                           "config");
    SweepSpec s;
    s.command = command;
    if (j.contains("command") && parse_command(j.at("command").get<std::string>()) != command) {
        throw std::invalid_argument("config: 'command' does not match the subcommand");
    }
    if (j.contains("p")) {
        s.p_grid = detail::read_p_grid(j.at("p"));
    }
    read(j, "d_over_n", s.d_over_n);
    read(j, "n_qubits", s.n_qubits);
    read(j, "realizations", s.realizations);
    read(j, "seed", s.seed);
    if (j.contains("initial_state")) {
        const auto v = j.at("initial_state").get<std::string>();
        if (v == "zero") {
            s.initial_state = InitialState::Zero;
        } else if (v == "random_product") {
            s.initial_state = InitialState::RandomProduct;
        } else {
            throw std::invalid_argument("config: initial_state must be 'zero' or 'random_product'");
        }
    }
    if (j.contains("memory_size") && !j.at("memory_size").is_null()) {
        s.memory_size = j.at("memory_size").get<std::size_t>();
    }
    read(j, "record_curves", s.record_curves);
    read(j, "magic", s.magic);
    read(j, "haar_baseline", s.haar_baseline);
    read(j, "haar_samples", s.haar_samples);
    read(j, "histogram_bins", s.histogram_bins);
    read(j, "r_min_available_fraction", s.r_min_available_fraction);
    if (j.contains("task")) {
        const auto &t = j.at("task");
        detail::reject_unknown(t, {"memory", "narma", "convergence", "max_tau", "narma_order", "convergence_steps"},
                               "task");
        read(t, "memory", s.task.memory);
        read(t, "narma", s.task.narma);
        read(t, "convergence", s.task.convergence);
        read(t, "max_tau", s.task.max_tau);
        read(t, "narma_order", s.task.narma_order);
        read(t, "convergence_steps", s.task.convergence_steps);
    }
    if (j.contains("reservoir")) {
        const auto &r = j.at("reservoir");
        detail::reject_unknown(
            r, {"input_scale", "washout", "steps", "ridge_lambda", "train_fraction", "all_qubit_observables"},
            "reservoir");
        read(r, "input_scale", s.reservoir.input_scale);
        read(r, "washout", s.reservoir.washout);
        read(r, "steps", s.reservoir.steps);
        read(r, "ridge_lambda", s.reservoir.ridge_lambda);
        read(r, "train_fraction", s.reservoir.train_fraction);
        read(r, "all_qubit_observables", s.reservoir.all_qubit_observables);
    }
    return s;
}

[[nodiscard]] inline nlohmann::json spec_to_json(const SweepSpec &s) {
    nlohmann::json j = {
        {"command", command_name(s.command)},
        {"p", s.p_grid},
        {"d_over_n", s.d_over_n},
        {"n_qubits", s.n_qubits},
        {"realizations", s.realizations},
        {"seed", s.seed},
        {"initial_state", s.initial_state == InitialState::Zero ? "zero" : "random_product"},
        {"memory_size", s.memory_size ? nlohmann::json(*s.memory_size) : nlohmann::json(nullptr)},
        {"record_curves", s.record_curves},
        {"magic", s.magic},
        {"haar_baseline", s.haar_baseline},
        {"haar_samples", s.haar_samples},
        {"histogram_bins", s.histogram_bins},
        {"r_min_available_fraction", s.r_min_available_fraction},
        {"task",
         {{"memory", s.task.memory},
          {"narma", s.task.narma},
          {"convergence", s.task.convergence},
          {"max_tau", s.task.max_tau},
          {"narma_order", s.task.narma_order},
          {"convergence_steps", s.task.convergence_steps}}},
        {"reservoir",
         {{"input_scale", s.reservoir.input_scale},
          {"washout", s.reservoir.washout},
          {"steps", s.reservoir.steps},
          {"ridge_lambda", s.reservoir.ridge_lambda},
          {"train_fraction", s.reservoir.train_fraction},
          {"all_qubit_observables", s.reservoir.all_qubit_observables}}},
    };
    return j;
}

} // namespace pqrc::expcli
