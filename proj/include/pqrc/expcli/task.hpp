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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pqrc/expcli/diagnose.hpp"
#include "pqrc/reservoir.hpp"

namespace pqrc::expcli {

struct TaskRealization {
    std::size_t point = 0;
    std::size_t realization = 0;
    std::uint64_t template_seed = 0;
    std::size_t ct_count = 0;
    std::optional<MemoryTaskResult> memory;
    std::optional<double> narma_capacity;
    std::optional<double> narma_nmse;
    std::optional<double> eta;
    std::optional<double> eta_r_squared;
    std::optional<bool> contractive;
    std::vector<double> distances;
    std::string warnings;
    std::string status = "ok";
};

namespace detail {
inline void append_warnings(std::string &into, const std::vector<std::string> &w, std::string_view tag) {
    for (const auto &s : w) {
        into += (into.empty() ? "" : "; ") + std::string(tag) + ": " + s;
    }
}
} // namespace detail

[[nodiscard]] inline TaskRealization task_realization(const SweepSpec &spec, const GridPoint &g, std::size_t k) {
    TaskRealization out;
    out.point = g.index;
    out.realization = k;
    try {
        const auto tpl = realization_template(spec, g, k);
        out.template_seed = tpl.seed;
        out.ct_count = tpl.ct_count();
        const auto cfg = spec.reservoir_config(g.n_qubits, g.d_over_n, g.p, tpl.seed);
        if (spec.task.memory) {
            out.memory = memory_task(cfg, tpl, spec.task.max_tau,
                                     spec.realization_seed(Stream::Inputs, g.n_qubits, g.d_over_n, g.p, k));
            detail::append_warnings(out.warnings, out.memory->warnings, "memory");
        }
        if (spec.task.narma) {
            const auto run = narma_task(cfg, tpl, spec.task.narma_order);
            out.narma_capacity = run.capacity;
            out.narma_nmse = run.nmse;
            detail::append_warnings(out.warnings, run.warnings, "narma");
        }
        if (spec.task.convergence) {
            auto inputs = memory_inputs(cfg, spec.realization_seed(Stream::Inputs, g.n_qubits, g.d_over_n, g.p, k));
            inputs.resize(spec.task.convergence_steps);
            Rng rng(spec.realization_seed(Stream::Convergence, g.n_qubits, g.d_over_n, g.p, k));
            const DensityMatrix a(g.n_qubits);
            const DensityMatrix b = DensityMatrix::from_pure(random_product_state(g.n_qubits, rng));
            const auto conv = convergence_rate(cfg, tpl, inputs, a, b);
            out.distances = conv.distances;
            out.contractive = conv.contractive;
            if (conv.fit) {
                out.eta = conv.fit->eta;
                out.eta_r_squared = conv.fit->r_squared;
            }
            detail::append_warnings(out.warnings, conv.warnings, "convergence");
        }
    } catch (const std::exception &e) {
        out.status = std::string("error: ") + e.what();
    }
    return out;
}

struct TaskPoint {
    GridPoint grid;
    std::size_t ok = 0;
    std::optional<MeanAndError> mean_capacity;
    std::optional<MeanAndError> c1;
    std::vector<MeanAndError> capacity_curve; ///< tau = 0..max_tau
    std::optional<MeanAndError> narma_capacity;
    std::optional<MeanAndError> eta;
    std::optional<double> contractive_fraction;
    std::vector<MeanAndError> distance_curve;
};

struct TaskResult {
    std::vector<GridPoint> points;
    std::vector<TaskRealization> realizations;
    std::vector<TaskPoint> summary;
};

namespace detail {

[[nodiscard]] inline TaskPoint summarize_task(const GridPoint &g, std::span<const TaskRealization> rows) {
    TaskPoint pt;
    pt.grid = g;
    std::vector<const TaskRealization *> ok;
    for (const auto &r : rows) {
        if (r.status == "ok") {
            ok.push_back(&r);
        }
    }
    pt.ok = ok.size();
    if (ok.empty()) {
        return pt;
    }
    auto collect = [&](auto get) {
        std::vector<double> v;
        for (const auto *r : ok) {
            if (const auto x = get(*r)) {
                v.push_back(*x);
            }
        }
        return v.empty() ? std::optional<MeanAndError>{} : std::optional<MeanAndError>{mean_and_error(v)};
    };
    using Opt = std::optional<double>;
    pt.mean_capacity = collect([](const TaskRealization &r) { return r.memory ? Opt(r.memory->mean_capacity) : Opt(); });
    pt.c1 = collect([](const TaskRealization &r) {
        return r.memory && r.memory->capacities.size() > 1 ? Opt(r.memory->capacities[1]) : Opt();
    });
    pt.narma_capacity = collect([](const TaskRealization &r) { return r.narma_capacity; });
    pt.eta = collect([](const TaskRealization &r) { return r.eta; });
    if (ok.front()->memory) {
        const std::size_t taus = ok.front()->memory->capacities.size();
        for (std::size_t tau = 0; tau < taus; ++tau) {
            std::vector<double> v;
            for (const auto *r : ok) {
                v.push_back(r->memory->capacities[tau]);
            }
            pt.capacity_curve.push_back(mean_and_error(v));
        }
    }
    if (ok.front()->contractive) {
        double c = 0.0;
        for (const auto *r : ok) {
            c += (r->contractive && *r->contractive) ? 1.0 : 0.0;
        }
        pt.contractive_fraction = c / static_cast<double>(ok.size());
        const std::size_t len = ok.front()->distances.size();
        for (std::size_t n = 0; n < len; ++n) {
            std::vector<double> v;
            for (const auto *r : ok) {
                v.push_back(r->distances[n]);
            }
            pt.distance_curve.push_back(mean_and_error(v));
        }
    }
    return pt;
}

} // namespace detail

[[nodiscard]] inline TaskResult run_task(const SweepSpec &spec, std::size_t jobs) {
    spec.validate();
    TaskResult out;
    out.points = grid_points(spec);
    const std::size_t reps = spec.realizations;
    out.realizations = parallel_map(out.points.size() * reps, jobs, [&](std::size_t i) {
        return task_realization(spec, out.points[i / reps], i % reps);
    });
    for (const auto &g : out.points) {
        out.summary.push_back(detail::summarize_task(
            g, std::span<const TaskRealization>(out.realizations.data() + g.index * reps, reps)));
    }
    return out;
}

[[nodiscard]] inline Table task_results_table(const SweepSpec &spec, const TaskResult &res) {
    Table t({"seed", "point", "realization", "n_qubits", "d_over_n", "depth", "p", "template_seed", "ct_count",
             "mean_capacity", "c1", "narma_capacity", "narma_nmse", "eta", "eta_r2", "contractive", "warnings",
             "status"});
    for (const auto &r : res.realizations) {
        const auto &g = res.points[r.point];
        const Cell mc = r.memory ? cell(r.memory->mean_capacity) : Cell{};
        const Cell c1 = r.memory && r.memory->capacities.size() > 1 ? cell(r.memory->capacities[1]) : Cell{};
        const Cell con = r.contractive ? cell(*r.contractive) : Cell{};
        t.add_row({cell(spec.seed), cell(r.point), cell(r.realization), cell(g.n_qubits), cell(g.d_over_n),
                   cell(g.depth()), cell(g.p), cell(r.template_seed), cell(r.ct_count), mc, c1,
                   cell(r.narma_capacity), cell(r.narma_nmse), cell(r.eta), cell(r.eta_r_squared), con,
                   cell(r.warnings), cell(r.status)});
    }
    return t;
}

[[nodiscard]] inline Table task_summary_table(const TaskResult &res) {
    Table t({"point", "n_qubits", "d_over_n", "depth", "p", "realizations_ok", "mean_capacity", "mean_capacity_se",
             "c1", "c1_se", "narma_capacity", "narma_capacity_se", "eta", "eta_se", "contractive_fraction"});
    auto m = [](const std::optional<MeanAndError> &x) { return x ? cell(x->mean) : Cell{}; };
    auto e = [](const std::optional<MeanAndError> &x) { return x ? cell(x->std_error) : Cell{}; };
    for (const auto &pt : res.summary) {
        const auto &g = pt.grid;
        t.add_row({cell(g.index), cell(g.n_qubits), cell(g.d_over_n), cell(g.depth()), cell(g.p), cell(pt.ok),
                   m(pt.mean_capacity), e(pt.mean_capacity), m(pt.c1), e(pt.c1), m(pt.narma_capacity),
                   e(pt.narma_capacity), m(pt.eta), e(pt.eta), cell(pt.contractive_fraction)});
    }
    return t;
}

[[nodiscard]] inline Table memory_curves_table(const TaskResult &res) {
    Table t({"n_qubits", "d_over_n", "p", "tau", "capacity_mean", "capacity_se"});
    for (const auto &pt : res.summary) {
        for (std::size_t tau = 0; tau < pt.capacity_curve.size(); ++tau) {
            t.add_row({cell(pt.grid.n_qubits), cell(pt.grid.d_over_n), cell(pt.grid.p), cell(tau),
                       cell(pt.capacity_curve[tau].mean), cell(pt.capacity_curve[tau].std_error)});
        }
    }
    return t;
}

[[nodiscard]] inline Table convergence_curves_table(const TaskResult &res) {
    Table t({"n_qubits", "d_over_n", "p", "step", "distance_mean", "distance_se"});
    for (const auto &pt : res.summary) {
        for (std::size_t n = 0; n < pt.distance_curve.size(); ++n) {
            t.add_row({cell(pt.grid.n_qubits), cell(pt.grid.d_over_n), cell(pt.grid.p), cell(n),
                       cell(pt.distance_curve[n].mean), cell(pt.distance_curve[n].std_error)});
        }
    }
    return t;
}

} // namespace pqrc::expcli
