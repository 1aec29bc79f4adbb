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
#include <numbers>
#include <vector>

#include "pqrc/circuit.hpp"
#include "pqrc/magic.hpp"
#include "pqrc/spectra.hpp"

namespace {

using namespace pqrc;

// Composite Simpson rule, an oracle independent of the adaptive quadrature.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

TEST(Entropy, KnownDistributions) {
    const std::vector<double> flat(8, 0.125);
    EXPECT_NEAR(entropy_from_eigenvalues(flat, EntropyOrder::VonNeumann), 3.0, 1e-14);
    EXPECT_NEAR(entropy_from_eigenvalues(flat, EntropyOrder::Renyi2), 3.0, 1e-14);
    const std::vector<double> pure = {1.0, 0.0, 0.0};
    EXPECT_EQ(entropy_from_eigenvalues(pure, EntropyOrder::VonNeumann), 0.0);
    const std::vector<double> skew = {0.75, 0.25};
    EXPECT_NEAR(entropy_from_eigenvalues(skew, EntropyOrder::VonNeumann),
                -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25)), 1e-14);
    EXPECT_NEAR(entropy_from_eigenvalues(skew, EntropyOrder::Renyi2), -std::log2(0.625), 1e-14);
    const std::vector<double> bad = {1.1, -0.1};
    EXPECT_THROW((void)entropy_from_eigenvalues(bad, EntropyOrder::VonNeumann), std::domain_error);
}

TEST(Entropy, RenyiNeverExceedsVonNeumann) {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto rho = partial_trace(haar_state(6, rng), {0, 1, 2});
        EXPECT_LE(entanglement_entropy(rho, EntropyOrder::Renyi2), entanglement_entropy(rho) + 1e-12);
        EXPECT_LE(entanglement_entropy(rho), 3.0 + 1e-12);
    }
}

TEST(Spectrum, StabilizerStatesAreFlat) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        StateVector psi(8);
        apply_template(psi, sample_template(8, 16, 0.0, s));
        const auto spec = entanglement_spectrum(partial_trace(psi, {0, 1, 2, 3}));
        EXPECT_DOUBLE_EQ(spec.degeneracy_fraction, 1.0);
        EXPECT_FALSE(spacing_ratios(spec).available);
        // Flat spectrum: 2^k equal levels with S = k bits.
        const double k = std::log2(static_cast<double>(spec.levels.size()));
        EXPECT_NEAR(k, std::round(k), 1e-12);
        EXPECT_NEAR(entanglement_entropy(partial_trace(psi, {0, 1, 2, 3})), k, 1e-9);
    }
}

TEST(Spectrum, LevelsDescendAndDropBelowCutoff) {
    const std::vector<double> lambda = {0.5, 0.25, 0.25 - 1e-13, 1e-14};
    const auto spec = spectrum_from_eigenvalues(lambda);
    ASSERT_EQ(spec.levels.size(), 3U);
    EXPECT_GE(spec.levels[0], spec.levels[1]);
    EXPECT_NEAR(spec.levels.back(), 1.0, 1e-12);
    EXPECT_NEAR(spec.discarded_weight, 1e-14, 1e-20);
    EXPECT_DOUBLE_EQ(spec.degeneracy_fraction, 0.5);
}

TEST(SpacingRatios, HandComputedExample) {
    EntanglementSpectrum spec;
    spec.levels = {10.0, 7.0, 6.0, 4.0, 4.0};
    const auto stats = spacing_ratios(spec);
    ASSERT_TRUE(stats.available);
    // Distinct levels 10, 7, 6, 4: gaps 3, 1, 2.
    ASSERT_EQ(stats.r_values.size(), 2U);
    EXPECT_NEAR(stats.r_values[0], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(stats.r_values[1], 0.5, 1e-15);
    EXPECT_NEAR(*stats.mean_r, (1.0 / 3.0 + 0.5) / 2.0, 1e-15);
}

TEST(SpacingRatios, TooFewDistinctLevelsIsUnavailable) {
    EntanglementSpectrum spec;
    spec.levels = {3.0, 3.0, 1.0, 1.0};
    const auto stats = spacing_ratios(spec);
    EXPECT_FALSE(stats.available);
    EXPECT_FALSE(stats.mean_r.has_value());
}

TEST(Surmise, NormalizationAndMeanMatchIndependentQuadrature) {
    const auto &g = GueSurmise::instance();
    EXPECT_NEAR(g.normalization(), simpson(GueSurmise::unnormalized, 0.0, 1.0), 1e-12);
    EXPECT_NEAR(simpson([&](double r) { return g.pdf(r); }, 0.0, 1.0), 1.0, 1e-10);
    // Closed form of the folded surmise mean: 2 sqrt(3) / pi - 1/2.
    EXPECT_NEAR(g.mean(), 2.0 * std::sqrt(3.0) / std::numbers::pi - 0.5, 1e-10);
    EXPECT_NEAR(g.cdf(1.0), 1.0, 1e-12);
    EXPECT_NEAR(g.mass(0.2, 0.4) + g.mass(0.4, 0.9), g.mass(0.2, 0.9), 1e-12);
    EXPECT_NEAR(simpson(poisson_surmise_pdf, 0.0, 1.0), 1.0, 1e-10);
    EXPECT_NEAR(simpson([](double r) { return r * poisson_surmise_pdf(r); }, 0.0, 1.0), 2.0 * std::log(2.0) - 1.0,
                1e-10);
}

std::vector<double> sample_surmise(std::size_t count, std::uint64_t seed) {
    const auto &g = GueSurmise::instance();
    double peak = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        peak = std::max(peak, g.pdf(i / 1000.0));
    }
    peak *= 1.01;
    Rng rng(seed);
    std::vector<double> out;
    while (out.size() < count) {
        const double r = rng.uniform();
        if (rng.uniform() * peak < g.pdf(r)) {
            out.push_back(r);
        }
    }
    return out;
}

TEST(KlToGue, SmallForSurmiseSamplesLargeForPoisson) {
    const auto gue = sample_surmise(50000, 1);
    EXPECT_LT(kl_to_gue(gue), 0.01);
    Rng rng(2);
    std::vector<double> poisson;
    for (int i = 0; i < 50000; ++i) {
        // Ratio of two unit exponentials folded onto [0, 1].
        const double a = -std::log(1.0 - rng.uniform());
        const double b = -std::log(1.0 - rng.uniform());
        poisson.push_back(std::min(a, b) / std::max(a, b));
    }
    EXPECT_GT(kl_to_gue(poisson), 0.1);
    double m = 0.0;
    for (const double r : poisson) {
        m += r;
    }
    EXPECT_NEAR(m / poisson.size(), 2.0 * std::log(2.0) - 1.0, 0.005);
    EXPECT_THROW((void)kl_to_gue(std::vector<double>{}), std::invalid_argument);
}

TEST(Histogram, CountsAndDensities) {
    const std::vector<double> r = {0.0, 0.1, 0.5, 0.99, 1.0};
    const auto h = ratio_histogram(r, 10);
    EXPECT_EQ(h[0], 1U);
    EXPECT_EQ(h[1], 1U);
    EXPECT_EQ(h[5], 1U);
    EXPECT_EQ(h[9], 2U);
    const auto rows = ratio_density_rows(r, 10);
    double mass = 0.0;
    double surmise = 0.0;
    for (const auto &row : rows) {
        mass += row.empirical_density * 0.1;
        surmise += row.surmise_density * 0.1;
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
    EXPECT_NEAR(surmise, 1.0, 1e-10);
    EXPECT_THROW((void)ratio_histogram(std::vector<double>{1.5}, 4), std::domain_error);
}

TEST(Fits, LinearFitRecoversExactLine) {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y;
    for (const double v : x) {
        y.push_back(-0.7 * v + 2.0);
    }
    const auto f = fit_linear(x, y);
    EXPECT_NEAR(f.slope, -0.7, 1e-13);
    EXPECT_NEAR(f.intercept, 2.0, 1e-13);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-13);
    EXPECT_THROW((void)fit_linear(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                 std::invalid_argument);
}

TEST(Fits, ExponentialDecayRecoversRate) {
    std::vector<double> n;
    std::vector<double> d;
    for (int i = 0; i < 30; ++i) {
        n.push_back(i);
        d.push_back(0.8 * std::exp2(-0.35 * i));
    }
    const auto f = fit_exp_decay(n, d);
    EXPECT_NEAR(f.eta, 0.35, 1e-12);
    EXPECT_NEAR(f.d0, 0.8, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(Fits, VelocityAndSaturationOnSyntheticCurve) {
    // S = min(0.5 d, 4): linear growth, saturation at d = 8.
    std::vector<double> d;
    std::vector<double> s;
    for (int i = 0; i <= 60; ++i) {
        d.push_back(0.5 * i);
        s.push_back(std::min(0.5 * d.back(), 4.0));
    }
    const auto v = entanglement_velocity(d, s);
    EXPECT_NEAR(v.s_inf, 4.0, 1e-14);
    EXPECT_NEAR(v.velocity, 0.5, 1e-12);
    EXPECT_NEAR(saturation_depth(d, s), 7.2, 1e-12);
    const std::vector<double> zeros(10, 0.0);
    EXPECT_THROW((void)entanglement_velocity(std::vector<double>(10, 1.0), zeros), std::domain_error);
}

} // namespace
