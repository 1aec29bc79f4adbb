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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pqrc/expcli.hpp"

namespace {

using namespace pqrc;
using namespace pqrc::expcli;

SweepSpec tiny_diagnose() {
    SweepSpec s;
    s.command = Command::Diagnose;
    s.p_grid = {0.0, 0.5, 1.0};
    s.n_qubits = {4};
    s.d_over_n = {1};
    s.realizations = 3;
    s.haar_samples = 50;
    return s;
}

TEST(Spec, DefaultsFromEmptyObject) {
    const auto s = spec_from_json(nlohmann::json::object(), Command::Diagnose);
    EXPECT_EQ(s.p_grid.size(), 11U);
    EXPECT_EQ(s.n_qubits, (std::vector<std::size_t>{10}));
    EXPECT_EQ(s.d_over_n, (std::vector<std::size_t>{2}));
    EXPECT_NO_THROW(s.validate());
}

TEST(Spec, RangeGridIsRoundedAndInclusive) {
    const auto j = nlohmann::json::parse(R"({"p": {"start": 0.0, "stop": 1.0, "step": 0.05}})");
    const auto s = spec_from_json(j, Command::Diagnose);
    ASSERT_EQ(s.p_grid.size(), 21U);
    EXPECT_EQ(s.p_grid[3], 0.15);
    EXPECT_EQ(s.p_grid.back(), 1.0);
}

TEST(Spec, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW((void)spec_from_json(nlohmann::json::parse(R"({"realisations": 3})"), Command::Task),
                 std::invalid_argument);
    EXPECT_THROW((void)spec_from_json(nlohmann::json::parse(R"({"task": {"tau": 3}})"), Command::Task),
                 std::invalid_argument);
    EXPECT_THROW((void)spec_from_json(nlohmann::json::parse(R"({"seed": "x"})"), Command::Task),
                 std::invalid_argument);
    EXPECT_THROW((void)spec_from_json(nlohmann::json::parse(R"({"command": "task"})"), Command::Scaling),
                 std::invalid_argument);
    auto s = spec_from_json(nlohmann::json::parse(R"({"p": [0.1, 1.2]})"), Command::Diagnose);
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = spec_from_json(nlohmann::json::parse(R"({"n_qubits": [5]})"), Command::Diagnose);
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.memory_size = 2;
    EXPECT_NO_THROW(s.validate());
    s = spec_from_json(nlohmann::json::parse(R"({"n_qubits": [4, 6]})"), Command::Scaling);
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Spec, JsonRoundTrip) {
    auto s = tiny_diagnose();
    s.initial_state = InitialState::RandomProduct;
    s.memory_size = 1;
    s.task.max_tau = 5;
    s.reservoir.washout = 50;
    const auto back = spec_from_json(spec_to_json(s), Command::Diagnose);
    EXPECT_EQ(spec_to_json(back), spec_to_json(s));
}

TEST(Spec, SmokeShrinksWorkload) {
    SweepSpec s;
    s.realizations = 50;
    s.apply_smoke();
    EXPECT_EQ(s.realizations, 10U);
    EXPECT_EQ(s.n_qubits, (std::vector<std::size_t>{6}));
    SweepSpec sc;
    sc.command = Command::Scaling;
    sc.apply_smoke();
    EXPECT_EQ(sc.n_qubits.size(), 3U);
    EXPECT_NO_THROW(sc.validate());
}

TEST(Spec, RealizationSeedsDependOnValuesNotPositions) {
    SweepSpec a;
    const auto s1 = a.realization_seed(Stream::Template, 10, 2, 0.3, 4);
    a.p_grid = {0.3};
    EXPECT_EQ(a.realization_seed(Stream::Template, 10, 2, 0.3, 4), s1);
    EXPECT_NE(a.realization_seed(Stream::Template, 10, 2, 0.3, 5), s1);
    EXPECT_NE(a.realization_seed(Stream::Inputs, 10, 2, 0.3, 4), s1);
    a.seed += 1;
    EXPECT_NE(a.realization_seed(Stream::Template, 10, 2, 0.3, 4), s1);
}

TEST(Grid, CanonicalOrderWithoutDuplicates) {
    SweepSpec s;
    s.p_grid = {0.5, 0.1, 0.5};
    s.n_qubits = {8, 6};
    s.d_over_n = {2, 1};
    const auto g = grid_points(s);
    ASSERT_EQ(g.size(), 8U);
    EXPECT_EQ(g[0].n_qubits, 6U);
    EXPECT_EQ(g[0].d_over_n, 1U);
    EXPECT_EQ(g[0].p, 0.1);
    EXPECT_EQ(g[7].depth(), 16U);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(g[i].index, i);
    }
}

TEST(Table, FormattingIsShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-0.0), "0");
    EXPECT_EQ(format_double(1e-300), "1e-300");
    EXPECT_EQ(format_double(std::nan("")), "nan");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Table, CsvQuotingRoundTrips) {
    Table t({"a", "b", "c"});
    t.add_row({cell(1), cell("x, \"y\""), Cell{}});
    t.add_row({cell(std::optional<double>{2.5}), cell(true), cell(std::size_t{7})});
    EXPECT_THROW(t.add_row({cell(1)}), std::logic_error);
    const std::string csv = t.to_csv();
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "a,b,c");
    std::getline(in, line);
    EXPECT_EQ(split_csv_line(line), (std::vector<std::string>{"1", "x, \"y\"", ""}));
    std::getline(in, line);
    EXPECT_EQ(line, "2.5,1,7");
    EXPECT_EQ(t.column("c"), 2U);
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
    auto f = [](std::size_t i) { return static_cast<double>(child_seed(1, {i}) % 1000); };
    const auto a = parallel_map(97, 1, f);
    const auto b = parallel_map(97, 4, f);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(parallel_map(0, 3, f).empty());
}

TEST(Parallel, LowestIndexExceptionWins) {
    auto f = [](std::size_t i) -> int {
        if (i == 5 || i == 9) {
            throw std::runtime_error("fail " + std::to_string(i));
        }
        return static_cast<int>(i);
    };
    try {
        (void)parallel_map(20, 3, f);
        FAIL() << "expected an exception";
    } catch (const std::runtime_error &e) {
        EXPECT_STREQ(e.what(), "fail 5");
    }
}

std::vector<CrossoverInput> step_profile(double at) {
    std::vector<CrossoverInput> pts;
    for (int i = 0; i <= 10; ++i) {
        const double p = i / 10.0;
        CrossoverInput x;
        x.p = p;
        x.mean_r = p < at - 1e-9 ? 0.6 : 0.39;
        x.relative_gap = p < 0.35 ? 0.02 : 0.02 + (p - 0.25);
        pts.push_back(x);
    }
    return pts;
}

TEST(Crossovers, SyntheticStepIsLocated) {
    const auto est = locate_crossovers(step_profile(0.6));
    ASSERT_TRUE(est.p_star.has_value());
    EXPECT_DOUBLE_EQ(*est.p_star, 0.6);
    EXPECT_TRUE(est.p_star_reliable);
    ASSERT_TRUE(est.p_sharp.has_value());
    EXPECT_TRUE(est.p_sharp_reliable);
    // Plateau over the k = 3 smallest of 9 interior gaps.
    ASSERT_TRUE(est.plateau_mean.has_value());
    EXPECT_NEAR(*est.plateau_mean, 0.02, 1e-12);
    EXPECT_DOUBLE_EQ(*est.p_sharp, 0.4);
}

TEST(Crossovers, UnsortedInputGivesSameAnswer) {
    auto pts = step_profile(0.6);
    std::reverse(pts.begin(), pts.end());
    EXPECT_DOUBLE_EQ(*locate_crossovers(pts).p_star, 0.6);
}

TEST(Crossovers, FlatProfilesAreUnreliableOrAbsent) {
    std::vector<CrossoverInput> pts;
    for (int i = 0; i <= 10; ++i) {
        pts.push_back({i / 10.0, 0.6, 0.1});
    }
    const auto est = locate_crossovers(pts);
    EXPECT_FALSE(est.p_star.has_value());
    EXPECT_FALSE(est.p_sharp.has_value());
    EXPECT_FALSE(est.notes.empty());

    auto bumpy = step_profile(0.5);
    bumpy[8].mean_r = 0.55; // climbs back above the midpoint
    const auto b = locate_crossovers(bumpy);
    ASSERT_TRUE(b.p_star.has_value());
    EXPECT_FALSE(b.p_star_reliable);
}

TEST(Crossovers, UnusablePointsAreSkipped) {
    auto pts = step_profile(0.6);
    pts[6].mean_r.reset();
    EXPECT_DOUBLE_EQ(*locate_crossovers(pts).p_star, 0.7);
}

TEST(Diagnose, StabilizerPointIsFlatAndMagicFree) {
    auto s = tiny_diagnose();
    s.p_grid = {0.0};
    const auto res = run_diagnose(s, 1);
    ASSERT_EQ(res.realizations.size(), 3U);
    for (const auto &r : res.realizations) {
        EXPECT_EQ(r.status, "ok");
        EXPECT_EQ(r.ct_count, 0U);
        EXPECT_NEAR(r.magic->total_magic, 0.0, 1e-10);
        EXPECT_FALSE(r.mean_r.has_value());
        EXPECT_EQ(r.curve.size(), 2 * 4 + 1U);
    }
    EXPECT_FALSE(res.summary[0].r_usable);
}

TEST(Diagnose, CsvBytesIndependentOfJobs) {
    const auto s = tiny_diagnose();
    const auto a = run_command(s, 1);
    const auto b = run_command(s, 3);
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        EXPECT_EQ(a.files[i].name, b.files[i].name);
        EXPECT_EQ(a.files[i].table.to_csv(), b.files[i].table.to_csv());
    }
}

TEST(Diagnose, SummaryCsvFeedsCrossovers) {
    const auto s = tiny_diagnose();
    const auto res = run_diagnose(s, 1);
    const auto direct = crossovers_by_group(res.summary);
    std::istringstream in(diagnose_summary_table(res).to_csv());
    const auto parsed = crossovers_from_summary_csv(in);
    ASSERT_EQ(parsed.size(), direct.size());
    EXPECT_EQ(parsed[0].estimate.p_star, direct[0].estimate.p_star);
    EXPECT_EQ(parsed[0].estimate.p_sharp, direct[0].estimate.p_sharp);
    std::istringstream bad("n_qubits,p\n4,0.1\n");
    EXPECT_THROW((void)crossovers_from_summary_csv(bad), std::runtime_error);
}

TEST(Task, SmallRunProducesAllMetrics) {
    SweepSpec s;
    s.command = Command::Task;
    s.p_grid = {0.3};
    s.n_qubits = {4};
    s.d_over_n = {1};
    s.realizations = 2;
    s.reservoir.steps = 300;
    s.reservoir.washout = 100;
    s.task.max_tau = 4;
    s.task.convergence_steps = 20;
    const auto res = run_task(s, 2);
    ASSERT_EQ(res.summary.size(), 1U);
    const auto &pt = res.summary[0];
    EXPECT_EQ(pt.ok, 2U);
    ASSERT_TRUE(pt.mean_capacity.has_value());
    EXPECT_EQ(pt.capacity_curve.size(), 5U);
    ASSERT_TRUE(pt.narma_capacity.has_value());
    EXPECT_EQ(pt.distance_curve.size(), 21U);
    EXPECT_EQ(task_results_table(s, res).size(), 2U);
}

TEST(Scaling, HaarSeriesIsAppendedLast) {
    SweepSpec s;
    s.command = Command::Scaling;
    s.p_grid = {0.5};
    s.n_qubits = {4, 6, 8};
    s.d_over_n = {1};
    s.realizations = 3;
    s.haar_samples = 50;
    const auto res = run_scaling(s, 1);
    ASSERT_EQ(res.series.size(), 2U);
    EXPECT_FALSE(res.series.back().p.has_value());
    ASSERT_TRUE(res.series.back().fit.has_value());
    EXPECT_GT(res.series.back().fit->alpha, 0.0);
    EXPECT_EQ(anti_flatness_table(res).size(), 6U);
}

} // namespace
