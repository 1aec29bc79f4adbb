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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pqrc/expcli/diagnose.hpp"

namespace pqrc::expcli {

struct ScalingRealization {
    std::size_t point = 0;
    std::size_t realization = 0;
    std::uint64_t template_seed = 0;
    double anti_flatness = 0.0;
    std::string status = "ok";
};

struct ScalingSeries {
    std::size_t d_over_n = 0; ///< 0 for the Haar baseline
    std::optional<double> p;  ///< empty for the Haar baseline
    std::vector<std::size_t> sizes;
    std::vector<MeanAndError> f;
    std::optional<ScalingFit> fit;
};

struct ScalingResult {
    std::vector<GridPoint> points;
    std::vector<ScalingRealization> realizations;
    std::vector<ScalingSeries> series; ///< circuits by (d / N, p), then Haar
    std::map<std::size_t, HaarReference> haar;
};

namespace detail {
inline void fit_series(ScalingSeries &s) {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < s.sizes.size(); ++i) {
        x.push_back(static_cast<double>(s.sizes[i]));
        y.push_back(s.f[i].mean);
    }
    if (x.size() >= 3) {
        s.fit = scrambling_exponent(x, y);
    }
}
} // namespace detail

[[nodiscard]] inline ScalingResult run_scaling(const SweepSpec &spec, std::size_t jobs) {
    spec.validate();
    ScalingResult out;
    out.points = grid_points(spec);
    const std::size_t reps = spec.realizations;
    out.realizations = parallel_map(out.points.size() * reps, jobs, [&](std::size_t i) {
        const auto &g = out.points[i / reps];
        ScalingRealization r;
        r.point = g.index;
        r.realization = i % reps;
        try {
            const auto tpl = realization_template(spec, g, r.realization);
            r.template_seed = tpl.seed;
            StateVector psi = initial_state(spec, g, r.realization);
            apply_template(psi, tpl);
            r.anti_flatness = anti_flatness(psi, spec.memory_size);
        } catch (const std::exception &e) {
            r.status = std::string("error: ") + e.what();
        }
        return r;
    });

    std::map<std::pair<std::size_t, double>, ScalingSeries> by_key;
    for (const auto &g : out.points) {
        std::vector<double> f;
        for (std::size_t k = 0; k < reps; ++k) {
            const auto &r = out.realizations[g.index * reps + k];
            if (r.status == "ok") {
                f.push_back(r.anti_flatness);
            }
        }
        auto &s = by_key[{g.d_over_n, g.p}];
        s.d_over_n = g.d_over_n;
        s.p = g.p;
        s.sizes.push_back(g.n_qubits);
        s.f.push_back(mean_and_error(f));
    }
    for (auto &[key, s] : by_key) {
        detail::fit_series(s);
        out.series.push_back(std::move(s));
    }
    if (spec.haar_baseline) {
        out.haar = haar_draws(spec, jobs, false).references;
        ScalingSeries h;
        for (const auto &[n, ref] : out.haar) {
            h.sizes.push_back(n);
            h.f.push_back(ref.anti_flatness);
        }
        detail::fit_series(h);
        out.series.push_back(std::move(h));
    }
    return out;
}

[[nodiscard]] inline Table scaling_results_table(const SweepSpec &spec, const ScalingResult &res) {
    Table t({"seed", "point", "realization", "n_qubits", "d_over_n", "depth", "p", "template_seed", "anti_flatness",
             "status"});
    for (const auto &r : res.realizations) {
        const auto &g = res.points[r.point];
        t.add_row({cell(spec.seed), cell(r.point), cell(r.realization), cell(g.n_qubits), cell(g.d_over_n),
                   cell(g.depth()), cell(g.p), cell(r.template_seed), cell(r.anti_flatness), cell(r.status)});
    }
    return t;
}

/// Plot-ready F(N) per series with the Haar ratio F / F_H.
[[nodiscard]] inline Table anti_flatness_table(const ScalingResult &res) {
    Table t({"ensemble", "d_over_n", "p", "n_qubits", "f_mean", "f_se", "log2_f_mean", "f_over_haar"});
    for (const auto &s : res.series) {
        for (std::size_t i = 0; i < s.sizes.size(); ++i) {
            const double f = s.f[i].mean;
            std::optional<double> ratio;
            if (const auto it = res.haar.find(s.sizes[i]); it != res.haar.end() && it->second.anti_flatness.mean > 0) {
                ratio = f / it->second.anti_flatness.mean;
            }
            std::optional<double> lg;
            if (f > kFlatnessFloor) {
                lg = std::log2(f);
            }
            t.add_row({cell(s.p ? "circuit" : "haar"), s.p ? cell(s.d_over_n) : Cell{}, cell(s.p), cell(s.sizes[i]),
                       cell(f), cell(s.f[i].std_error), cell(lg), cell(ratio)});
        }
    }
    return t;
}

[[nodiscard]] inline Table scaling_summary_table(const ScalingResult &res) {
    Table t({"ensemble", "d_over_n", "p", "sizes", "alpha", "intercept", "r2", "defined"});
    for (const auto &s : res.series) {
        std::string sizes;
        for (const auto n : s.sizes) {
            sizes += (sizes.empty() ? "" : " ") + std::to_string(n);
        }
        const Cell a = s.fit ? cell(s.fit->alpha) : Cell{};
        const Cell c = s.fit ? cell(s.fit->intercept) : Cell{};
        const Cell r2 = s.fit ? cell(s.fit->r_squared) : Cell{};
        t.add_row({cell(s.p ? "circuit" : "haar"), s.p ? cell(s.d_over_n) : Cell{}, cell(s.p), cell(sizes), a, c, r2,
                   cell(s.fit.has_value())});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Haar reference command

struct HaarRefResult {
    HaarDraws draws;
};

[[nodiscard]] inline HaarRefResult run_haar_ref(const SweepSpec &spec, std::size_t jobs) {
    spec.validate();
    return {haar_draws(spec, jobs, spec.magic)};
}

[[nodiscard]] inline Table haar_results_table(const SweepSpec &spec, const HaarRefResult &res) {
    Table t({"seed", "n_qubits", "sample", "sample_seed", "total_magic", "mutual_magic", "anti_flatness", "purity"});
    for (std::size_t j = 0; j < res.draws.sizes.size(); ++j) {
        const std::size_t n = res.draws.sizes[j];
        const bool magic = spec.magic && n <= kMaxDensityQubits;
        for (std::size_t k = 0; k < res.draws.draws[j].size(); ++k) {
            const auto &d = res.draws.draws[j][k];
            t.add_row({cell(spec.seed), cell(n), cell(k), cell(child_seed(spec.haar_seed(n), {k})),
                       magic ? cell(d.total_magic) : Cell{}, magic ? cell(d.mutual_magic) : Cell{},
                       cell(d.anti_flatness), cell(d.purity)});
        }
    }
    return t;
}

} // namespace pqrc::expcli
