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
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pqrc/circuit.hpp"
#include "pqrc/expcli/parallel.hpp"
#include "pqrc/expcli/spec.hpp"
#include "pqrc/expcli/table.hpp"
#include "pqrc/magic.hpp"
#include "pqrc/spectra.hpp"

namespace pqrc::expcli {

struct GridPoint {
    std::size_t index = 0;
    std::size_t n_qubits = 0;
    std::size_t d_over_n = 0;
    double p = 0.0;

    [[nodiscard]] std::size_t depth() const noexcept { return d_over_n * n_qubits; }
};

/// Points in canonical order: N, then d / N, then p, all ascending with
/// duplicates dropped.
[[nodiscard]] inline std::vector<GridPoint> grid_points(const SweepSpec &spec) {
    auto sorted = [](auto v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    std::vector<GridPoint> out;
    for (const auto n : sorted(spec.n_qubits)) {
        for (const auto r : sorted(spec.d_over_n)) {
            for (const double p : sorted(spec.p_grid)) {
                out.push_back({out.size(), n, r, p});
            }
        }
    }
    return out;
}

[[nodiscard]] inline StateVector initial_state(const SweepSpec &spec, const GridPoint &g, std::size_t k) {
    if (spec.initial_state == InitialState::Zero) {
        return StateVector(g.n_qubits);
    }
    Rng rng(spec.realization_seed(Stream::InitialState, g.n_qubits, g.d_over_n, g.p, k));
    return random_product_state(g.n_qubits, rng);
}

[[nodiscard]] inline CircuitTemplate realization_template(const SweepSpec &spec, const GridPoint &g,
                                                          std::size_t k) {
    return sample_template(g.n_qubits, g.depth(), g.p,
                           spec.realization_seed(Stream::Template, g.n_qubits, g.d_over_n, g.p, k));
}

struct DiagnoseRealization {
    std::size_t point = 0;
    std::size_t realization = 0;
    std::uint64_t template_seed = 0;
    std::size_t ct_count = 0;
    std::size_t slot_count = 0;
    double entropy = 0.0;
    double degeneracy_fraction = 0.0;
    std::size_t levels = 0;
    std::optional<double> mean_r;
    std::vector<double> r_values;
    std::optional<MagicReport> magic;
    double anti_flatness = 0.0;
    std::vector<double> curve; ///< S after each sublayer, S(0) first
    std::string status = "ok";
};

[[nodiscard]] inline DiagnoseRealization diagnose_realization(const SweepSpec &spec, const GridPoint &g,
                                                              std::size_t k) {
    DiagnoseRealization out;
    out.point = g.index;
    out.realization = k;
    try {
        const auto tpl = realization_template(spec, g, k);
        out.template_seed = tpl.seed;
        out.ct_count = tpl.ct_count();
        out.slot_count = tpl.slot_count();
        const Cut cut = make_cut(g.n_qubits, spec.memory_size);
        StateVector psi = initial_state(spec, g, k);
        if (spec.record_curves) {
            out.curve.push_back(entanglement_entropy(partial_trace(psi, cut.memory)));
            apply_template(psi, tpl, [&](std::size_t, const StateVector &s) {
                out.curve.push_back(entanglement_entropy(partial_trace(s, cut.memory)));
            });
        } else {
            apply_template(psi, tpl);
        }
        const DensityMatrix rho_m = partial_trace(psi, cut.memory);
        out.entropy = entanglement_entropy(rho_m);
        const auto spectrum = entanglement_spectrum(rho_m);
        out.degeneracy_fraction = spectrum.degeneracy_fraction;
        out.levels = spectrum.levels.size();
        auto stats = spacing_ratios(spectrum);
        out.mean_r = stats.mean_r;
        out.r_values = std::move(stats.r_values);
        out.anti_flatness = anti_flatness(psi, cut.memory.size());
        if (spec.magic) {
            if (g.n_qubits <= kMaxDensityQubits) {
                out.magic = mutual_magic(psi, cut.memory.size());
            } else {
                out.status = "magic skipped: N above density cap";
            }
        }
    } catch (const std::exception &e) {
        out.status = std::string("error: ") + e.what();
    }
    return out;
}

struct DiagnosePoint {
    GridPoint grid;
    std::size_t ok = 0;
    double ct_fraction = 0.0;
    MeanAndError entropy;
    MeanAndError anti_flatness;
    std::size_t r_available = 0;
    bool r_usable = false;
    std::optional<MeanAndError> mean_r;
    std::optional<double> kl_to_gue;
    std::vector<double> pooled_r;
    std::optional<MeanAndError> total_magic;
    std::optional<MeanAndError> mutual_magic;
    std::optional<double> haar_mutual_magic;
    std::optional<double> relative_gap;
    bool gap_exceeds_one = false;
    std::vector<double> curve_mean;
    std::vector<double> curve_error;
    std::optional<double> s_inf;
    std::optional<double> velocity;
    std::optional<double> d_sat;
};

struct DiagnoseResult {
    std::vector<GridPoint> points;
    std::vector<DiagnoseRealization> realizations; ///< point-major
    std::vector<DiagnosePoint> summary;
    std::map<std::size_t, HaarReference> haar;
};

namespace detail {

/// Depth in brick periods of each recorded curve entry.
[[nodiscard]] inline std::vector<double> curve_depths(std::size_t entries) {
    std::vector<double> d(entries);
    for (std::size_t i = 0; i < entries; ++i) {
        d[i] = 0.5 * static_cast<double>(i);
    }
    return d;
}

[[nodiscard]] inline DiagnosePoint summarize_point(const SweepSpec &spec, const GridPoint &g,
                                                   std::span<const DiagnoseRealization> rows,
                                                   const std::map<std::size_t, HaarReference> &haar) {
    DiagnosePoint pt;
    pt.grid = g;
    std::vector<double> s;
    std::vector<double> f;
    std::vector<double> r;
    std::vector<double> tm;
    std::vector<double> mm;
    double ct = 0.0;
    double slots = 0.0;
    std::vector<const DiagnoseRealization *> ok;
    for (const auto &row : rows) {
        if (row.status.rfind("error", 0) == 0) {
            continue;
        }
        ok.push_back(&row);
        s.push_back(row.entropy);
        f.push_back(row.anti_flatness);
        ct += static_cast<double>(row.ct_count);
        slots += static_cast<double>(row.slot_count);
        if (row.mean_r) {
            r.push_back(*row.mean_r);
            pt.pooled_r.insert(pt.pooled_r.end(), row.r_values.begin(), row.r_values.end());
        }
        if (row.magic) {
            tm.push_back(row.magic->total_magic);
            mm.push_back(row.magic->mutual_magic);
        }
    }
    pt.ok = ok.size();
    pt.ct_fraction = slots > 0.0 ? ct / slots : 0.0;
    pt.entropy = mean_and_error(s);
    pt.anti_flatness = mean_and_error(f);
    pt.r_available = r.size();
    const double need = std::max(1.0, std::ceil(spec.r_min_available_fraction * static_cast<double>(rows.size())));
    pt.r_usable = static_cast<double>(r.size()) >= need;
    if (!r.empty()) {
        pt.mean_r = mean_and_error(r);
        pt.kl_to_gue = kl_to_gue(pt.pooled_r, spec.histogram_bins);
    }
    if (!tm.empty()) {
        pt.total_magic = mean_and_error(tm);
        pt.mutual_magic = mean_and_error(mm);
        if (const auto it = haar.find(g.n_qubits); it != haar.end() && it->second.mutual_magic.mean > 0.0) {
            pt.haar_mutual_magic = it->second.mutual_magic.mean;
            pt.relative_gap = relative_gap(pt.mutual_magic->mean, *pt.haar_mutual_magic);
            pt.gap_exceeds_one = *pt.relative_gap > 1.0;
        }
    }
    if (spec.record_curves && !ok.empty()) {
        const std::size_t len = ok.front()->curve.size();
        pt.curve_mean.assign(len, 0.0);
        pt.curve_error.assign(len, 0.0);
        std::vector<double> col(ok.size());
        for (std::size_t i = 0; i < len; ++i) {
            for (std::size_t k = 0; k < ok.size(); ++k) {
                col[k] = ok[k]->curve[i];
            }
            const auto me = mean_and_error(col);
            pt.curve_mean[i] = me.mean;
            pt.curve_error[i] = me.std_error;
        }
        const auto depths = curve_depths(len);
        pt.s_inf = saturation_value(pt.curve_mean);
        try {
            pt.velocity = entanglement_velocity(depths, pt.curve_mean).velocity;
        } catch (const std::exception &) {
        }
        const double ds = saturation_depth(depths, pt.curve_mean);
        if (*pt.s_inf > 1e-9 && std::isfinite(ds)) {
            pt.d_sat = ds;
        }
    }
    return pt;
}

} // namespace detail

struct HaarDraws {
    std::vector<std::size_t> sizes;
    std::vector<std::vector<HaarSample>> draws; ///< per size
    std::map<std::size_t, HaarReference> references;
};

/// Haar draws for every N of the sweep. Draw k of size N uses the stream
/// child_seed(haar_seed(N), {k}), matching haar_reference().
[[nodiscard]] inline HaarDraws haar_draws(const SweepSpec &spec, std::size_t jobs, bool with_magic) {
    HaarDraws out;
    out.sizes = spec.n_qubits;
    std::sort(out.sizes.begin(), out.sizes.end());
    out.sizes.erase(std::unique(out.sizes.begin(), out.sizes.end()), out.sizes.end());
    const std::size_t m = spec.haar_samples;
    auto magic_for = [&](std::size_t n) { return with_magic && n <= kMaxDensityQubits; };
    auto flat = parallel_map(out.sizes.size() * m, jobs, [&](std::size_t i) {
        const std::size_t n = out.sizes[i / m];
        return haar_sample(n, child_seed(spec.haar_seed(n), {i % m}), magic_for(n), spec.memory_size);
    });
    for (std::size_t j = 0; j < out.sizes.size(); ++j) {
        const std::size_t n = out.sizes[j];
        out.draws.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(j * m),
                               flat.begin() + static_cast<std::ptrdiff_t>((j + 1) * m));
        out.references.emplace(n, summarize_haar(n, spec.haar_seed(n), out.draws.back(), magic_for(n)));
    }
    return out;
}

[[nodiscard]] inline DiagnoseResult run_diagnose(const SweepSpec &spec, std::size_t jobs) {
    spec.validate();
    DiagnoseResult out;
    out.points = grid_points(spec);
    const std::size_t reps = spec.realizations;
    out.realizations = parallel_map(out.points.size() * reps, jobs, [&](std::size_t i) {
        return diagnose_realization(spec, out.points[i / reps], i % reps);
    });
    if (spec.magic && spec.haar_baseline) {
        out.haar = haar_draws(spec, jobs, true).references;
    }
    for (const auto &g : out.points) {
        const std::span<const DiagnoseRealization> rows(out.realizations.data() + g.index * reps, reps);
        out.summary.push_back(detail::summarize_point(spec, g, rows, out.haar));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Crossover locators (heuristic)

inline constexpr double kQuantumMeanRatio = 0.6;
inline constexpr double kClassicalMeanRatio = 0.39;
inline constexpr double kRatioMidpoint = 0.5 * (kQuantumMeanRatio + kClassicalMeanRatio);

struct CrossoverInput {
    double p = 0.0;
    std::optional<double> mean_r; ///< only when the point's spectra are usable
    std::optional<double> relative_gap;
};

struct CrossoverEstimate {
    std::optional<double> p_star;
    bool p_star_reliable = false;
    std::optional<double> p_sharp;
    bool p_sharp_reliable = false;
    std::optional<double> plateau_mean;
    std::vector<std::string> notes;
};

/**
 * p*: smallest p whose mean r is below the midpoint of the quantum and
 * classical limits; reliable when every later usable point stays below and
 * does not increase.
 *
 * p#: with the plateau mean m taken over the k = max(2, ceil(n / 4))
 * smallest gaps among 0 < p < 1, the smallest p beyond the gap minimum with
 * gap > 2 m; reliable when every later point also exceeds 2 m.
 */
[[nodiscard]] inline CrossoverEstimate locate_crossovers(std::vector<CrossoverInput> pts) {
    std::sort(pts.begin(), pts.end(), [](const auto &a, const auto &b) { return a.p < b.p; });
    CrossoverEstimate est;

    std::vector<std::pair<double, double>> r;
    for (const auto &x : pts) {
        if (x.mean_r) {
            r.emplace_back(x.p, *x.mean_r);
        }
    }
    std::size_t star = r.size();
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i].second < kRatioMidpoint) {
            star = i;
            break;
        }
    }
    if (star == r.size()) {
        est.notes.emplace_back("p*: no usable point below the midpoint");
    } else {
        est.p_star = r[star].first;
        est.p_star_reliable = r.size() >= 3;
        for (std::size_t i = star + 1; i < r.size(); ++i) {
            if (r[i].second >= kRatioMidpoint || r[i].second > r[i - 1].second) {
                est.p_star_reliable = false;
                est.notes.emplace_back("p*: mean r not monotone beyond the crossing");
                break;
            }
        }
        if (r.size() < 3) {
            est.notes.emplace_back("p*: fewer than 3 usable points");
        }
    }

    std::vector<std::pair<double, double>> gap;
    for (const auto &x : pts) {
        if (x.relative_gap && x.p > 0.0 && x.p < 1.0) {
            gap.emplace_back(x.p, *x.relative_gap);
        }
    }
    if (gap.size() < 3) {
        est.notes.emplace_back("p#: fewer than 3 interior points with a relative gap");
        return est;
    }
    std::vector<double> sorted;
    for (const auto &g : gap) {
        sorted.push_back(g.second);
    }
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = std::max<std::size_t>(2, (gap.size() + 3) / 4);
    double m = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        m += sorted[i];
    }
    m /= static_cast<double>(k);
    est.plateau_mean = m;
    const auto argmin = static_cast<std::size_t>(
        std::min_element(gap.begin(), gap.end(), [](const auto &a, const auto &b) { return a.second < b.second; }) -
        gap.begin());
    for (std::size_t i = argmin + 1; i < gap.size(); ++i) {
        if (gap[i].second > 2.0 * m) {
            est.p_sharp = gap[i].first;
            est.p_sharp_reliable = true;
            for (std::size_t j = i + 1; j < gap.size(); ++j) {
                if (!(gap[j].second > 2.0 * m)) {
                    est.p_sharp_reliable = false;
                    est.notes.emplace_back("p#: gap falls back below twice the plateau");
                    break;
                }
            }
            break;
        }
    }
    if (!est.p_sharp) {
        est.notes.emplace_back("p#: gap never exceeds twice the plateau");
    }
    return est;
}

[[nodiscard]] inline std::vector<CrossoverInput> crossover_inputs(std::span<const DiagnosePoint> pts) {
    std::vector<CrossoverInput> out;
    for (const auto &pt : pts) {
        CrossoverInput x;
        x.p = pt.grid.p;
        if (pt.r_usable && pt.mean_r) {
            x.mean_r = pt.mean_r->mean;
        }
        x.relative_gap = pt.relative_gap;
        out.push_back(x);
    }
    return out;
}

struct CrossoverRow {
    std::size_t n_qubits = 0;
    std::size_t d_over_n = 0;
    CrossoverEstimate estimate;
};

/// One estimate per (N, d / N) group of a diagnose summary.
[[nodiscard]] inline std::vector<CrossoverRow> crossovers_by_group(std::span<const DiagnosePoint> pts) {
    std::map<std::pair<std::size_t, std::size_t>, std::vector<DiagnosePoint>> groups;
    for (const auto &pt : pts) {
        groups[{pt.grid.n_qubits, pt.grid.d_over_n}].push_back(pt);
    }
    std::vector<CrossoverRow> out;
    for (const auto &[key, members] : groups) {
        out.push_back({key.first, key.second, locate_crossovers(crossover_inputs(members))});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tables

[[nodiscard]] inline Table diagnose_results_table(const SweepSpec &spec, const DiagnoseResult &res) {
    Table t({"seed", "point", "realization", "n_qubits", "d_over_n", "depth", "p", "template_seed", "ct_count",
             "slot_count", "entropy", "degeneracy_fraction", "levels", "mean_r", "r_count", "total_magic",
             "magic_m", "magic_r", "mutual_magic", "relative_gap", "anti_flatness", "status"});
    for (const auto &row : res.realizations) {
        const auto &g = res.points[row.point];
        std::optional<double> gap;
        if (row.magic) {
            if (const auto it = res.haar.find(g.n_qubits); it != res.haar.end() && it->second.mutual_magic.mean > 0) {
                gap = relative_gap(row.magic->mutual_magic, it->second.mutual_magic.mean);
            }
        }
        auto mg = [&](double MagicReport::*f) {
            return row.magic ? cell((*row.magic).*f) : Cell{};
        };
        t.add_row({cell(spec.seed), cell(row.point), cell(row.realization), cell(g.n_qubits), cell(g.d_over_n),
                   cell(g.depth()), cell(g.p), cell(row.template_seed), cell(row.ct_count), cell(row.slot_count),
                   cell(row.entropy), cell(row.degeneracy_fraction), cell(row.levels), cell(row.mean_r),
                   cell(row.r_values.size()), mg(&MagicReport::total_magic), mg(&MagicReport::magic_m),
                   mg(&MagicReport::magic_r), mg(&MagicReport::mutual_magic), cell(gap), cell(row.anti_flatness),
                   cell(row.status)});
    }
    return t;
}

[[nodiscard]] inline Table diagnose_summary_table(const DiagnoseResult &res) {
    Table t({"point", "n_qubits", "d_over_n", "depth", "p", "realizations_ok", "ct_fraction", "entropy_mean",
             "entropy_se", "mean_r", "mean_r_se", "r_available", "r_usable", "kl_gue", "total_magic_mean",
             "total_magic_se", "mutual_magic_mean", "mutual_magic_se", "haar_mutual_magic", "relative_gap",
             "gap_exceeds_one", "anti_flatness_mean", "anti_flatness_se", "s_inf", "velocity", "d_sat"});
    for (const auto &pt : res.summary) {
        const auto &g = pt.grid;
        auto me = [](const std::optional<MeanAndError> &x, bool err) -> Cell {
            if (!x) {
                return {};
            }
            return err ? cell(x->std_error) : cell(x->mean);
        };
        t.add_row({cell(g.index), cell(g.n_qubits), cell(g.d_over_n), cell(g.depth()), cell(g.p), cell(pt.ok),
                   cell(pt.ct_fraction), cell(pt.entropy.mean), cell(pt.entropy.std_error), me(pt.mean_r, false),
                   me(pt.mean_r, true), cell(pt.r_available), cell(pt.r_usable), cell(pt.kl_to_gue),
                   me(pt.total_magic, false), me(pt.total_magic, true), me(pt.mutual_magic, false),
                   me(pt.mutual_magic, true), cell(pt.haar_mutual_magic), cell(pt.relative_gap),
                   cell(pt.gap_exceeds_one), cell(pt.anti_flatness.mean), cell(pt.anti_flatness.std_error),
                   cell(pt.s_inf), cell(pt.velocity), cell(pt.d_sat)});
    }
    return t;
}

[[nodiscard]] inline Table entropy_curves_table(const DiagnoseResult &res) {
    Table t({"n_qubits", "d_over_n", "p", "sublayer", "depth", "rescaled_depth", "entropy_mean", "entropy_se"});
    for (const auto &pt : res.summary) {
        const auto &g = pt.grid;
        for (std::size_t i = 0; i < pt.curve_mean.size(); ++i) {
            const double d = 0.5 * static_cast<double>(i);
            t.add_row({cell(g.n_qubits), cell(g.d_over_n), cell(g.p), cell(i), cell(d),
                       cell((1.0 - g.p) * d / static_cast<double>(g.n_qubits)), cell(pt.curve_mean[i]),
                       cell(pt.curve_error[i])});
        }
    }
    return t;
}

[[nodiscard]] inline Table r_histogram_table(const SweepSpec &spec, const DiagnoseResult &res) {
    Table t({"n_qubits", "d_over_n", "p", "r_count", "r_bin_center", "empirical_density", "gue_density",
             "poisson_density"});
    for (const auto &pt : res.summary) {
        if (pt.pooled_r.empty()) {
            continue;
        }
        const auto &g = pt.grid;
        for (const auto &h : ratio_density_rows(pt.pooled_r, spec.histogram_bins)) {
            t.add_row({cell(g.n_qubits), cell(g.d_over_n), cell(g.p), cell(pt.pooled_r.size()),
                       cell(h.r_bin_center), cell(h.empirical_density), cell(h.surmise_density),
                       cell(poisson_surmise_pdf(h.r_bin_center))});
        }
    }
    return t;
}

[[nodiscard]] inline Table haar_reference_table(const std::map<std::size_t, HaarReference> &refs, bool with_magic) {
    Table t({"n_qubits", "samples", "seed", "total_magic_mean", "total_magic_se", "mutual_magic_mean",
             "mutual_magic_se", "anti_flatness_mean", "anti_flatness_se", "purity_mean", "purity_se"});
    for (const auto &[n, h] : refs) {
        const bool magic = with_magic && n <= kMaxDensityQubits;
        auto m = [&](double v) { return magic ? cell(v) : Cell{}; };
        t.add_row({cell(n), cell(h.samples), cell(h.seed), m(h.total_magic.mean), m(h.total_magic.std_error),
                   m(h.mutual_magic.mean), m(h.mutual_magic.std_error), cell(h.anti_flatness.mean),
                   cell(h.anti_flatness.std_error), cell(h.purity.mean), cell(h.purity.std_error)});
    }
    return t;
}

[[nodiscard]] inline Table crossovers_table(std::span<const CrossoverRow> rows) {
    Table t({"n_qubits", "d_over_n", "label", "p_star", "p_star_reliable", "p_sharp", "p_sharp_reliable",
             "plateau_mean", "r_midpoint", "notes"});
    for (const auto &row : rows) {
        std::string notes;
        for (const auto &n : row.estimate.notes) {
            notes += (notes.empty() ? "" : "; ") + n;
        }
        t.add_row({cell(row.n_qubits), cell(row.d_over_n), cell("HEURISTIC"), cell(row.estimate.p_star),
                   cell(row.estimate.p_star_reliable), cell(row.estimate.p_sharp), cell(row.estimate.p_sharp_reliable),
                   cell(row.estimate.plateau_mean), cell(kRatioMidpoint), cell(notes)});
    }
    return t;
}

} // namespace pqrc::expcli
