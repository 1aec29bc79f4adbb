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

/**
 * @file
 * Entanglement entropy and spectrum statistics: spacing ratios, the GUE
 * ratio surmise and its relative entropy, and the least-squares fits used
 * for velocities, decay rates and size-scaling exponents.
 *
 * All logarithms are base 2.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pqrc/qcore.hpp"

namespace pqrc {

inline constexpr double kDegenerateGap = 1e-10;
inline constexpr double kNegativeEigenTolerance = 1e-8;

enum class EntropyOrder { VonNeumann, Renyi2 };

/// Entropy of a probability vector (eigenvalues of a density matrix).
[[nodiscard]] inline double entropy_from_eigenvalues(std::span<const double> lambda,
                                                     EntropyOrder order) {
    double s = 0.0;
    double sum_sq = 0.0;
    for (const double l : lambda) {
        if (l < -kNegativeEigenTolerance) {
            throw std::domain_error("entropy: negative eigenvalue");
        }
        if (l > 0.0) {
            s -= l * std::log2(l);
            sum_sq += l * l;
        }
    }
    if (order == EntropyOrder::Renyi2) {
        return std::max(0.0, -std::log2(sum_sq));
    }
    return std::max(0.0, s);
}

[[nodiscard]] inline std::vector<double> eigenvalues_of(const DensityMatrix &rho) {
    const RVector v = eigvalsh(rho.matrix());
    return {v.data(), v.data() + v.size()};
}

[[nodiscard]] inline double entanglement_entropy(const DensityMatrix &rho_m,
                                                 EntropyOrder order = EntropyOrder::VonNeumann) {
    const auto lambda = eigenvalues_of(rho_m);
    return entropy_from_eigenvalues(lambda, order);
}

/// Levels eps_i = -log2(lambda_i), descending, for lambda_i >= cutoff.
struct EntanglementSpectrum {
    std::vector<double> levels;
    double degeneracy_fraction = 0.0;
    double discarded_weight = 0.0;
};

[[nodiscard]] inline EntanglementSpectrum
spectrum_from_eigenvalues(std::span<const double> lambda, double cutoff = 1e-12) {
    if (!(cutoff > 0.0 && cutoff < 1.0)) {
        throw std::invalid_argument("entanglement_spectrum: cutoff outside (0, 1)");
    }
    EntanglementSpectrum out;
    for (const double l : lambda) {
        if (l >= cutoff) {
            out.levels.push_back(-std::log2(l));
        } else {
            out.discarded_weight += std::max(l, 0.0);
        }
    }
    if (out.levels.empty()) {
        throw std::domain_error("entanglement_spectrum: all eigenvalues below cutoff");
    }
    std::sort(out.levels.begin(), out.levels.end(), std::greater<>());
    out.degeneracy_fraction = 1.0; // a single level is trivially flat
    if (out.levels.size() > 1) {
        std::size_t degenerate = 0;
        for (std::size_t i = 1; i < out.levels.size(); ++i) {
            if (out.levels[i - 1] - out.levels[i] < kDegenerateGap) {
                ++degenerate;
            }
        }
        out.degeneracy_fraction =
            static_cast<double>(degenerate) / static_cast<double>(out.levels.size() - 1);
    }
    return out;
}

[[nodiscard]] inline EntanglementSpectrum entanglement_spectrum(const DensityMatrix &rho_m,
                                                                double cutoff = 1e-12) {
    const auto lambda = eigenvalues_of(rho_m);
    return spectrum_from_eigenvalues(lambda, cutoff);
}

/// Ratio statistics of one spectrum. When fewer than three distinct levels
/// survive (the Clifford regime), `available` is false and no mean is given.
struct SpectrumStats {
    std::vector<double> r_values;
    std::optional<double> mean_r;
    std::optional<double> kl_to_gue;
    bool available = false;
};

[[nodiscard]] inline SpectrumStats spacing_ratios(const EntanglementSpectrum &spectrum) {
    // Merge degenerate levels, keep descending order.
    std::vector<double> distinct;
    for (const double e : spectrum.levels) {
        if (distinct.empty() || distinct.back() - e >= kDegenerateGap) {
            distinct.push_back(e);
        }
    }
    SpectrumStats stats;
    if (distinct.size() < 3) {
        return stats;
    }
    std::vector<double> gaps(distinct.size() - 1);
    for (std::size_t i = 1; i < distinct.size(); ++i) {
        gaps[i - 1] = distinct[i - 1] - distinct[i];
    }
    stats.r_values.reserve(gaps.size() - 1);
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        const double lo = std::min(gaps[i - 1], gaps[i]);
        const double hi = std::max(gaps[i - 1], gaps[i]);
        stats.r_values.push_back(lo / hi);
    }
    double total = 0.0;
    for (const double r : stats.r_values) {
        total += r;
    }
    stats.mean_r = total / static_cast<double>(stats.r_values.size());
    stats.available = true;
    return stats;
}

/// Ratio surmise (r + r^2)^2 / (1 + r + r^2)^4 folded onto [0, 1] and
/// normalized there by adaptive Gauss-Kronrod quadrature.
class GueSurmise {
  public:
    [[nodiscard]] static const GueSurmise &instance() {
        static const GueSurmise s;
        return s;
    }

    [[nodiscard]] static double unnormalized(double r) {
        const double a = r + r * r;
        const double b = 1.0 + r + r * r;
        return a * a / (b * b * b * b);
    }

    [[nodiscard]] double normalization() const noexcept { return z_; }

    [[nodiscard]] double pdf(double r) const {
        if (r < 0.0 || r > 1.0) {
            return 0.0;
        }
        return unnormalized(r) / z_;
    }

    /// Probability mass on [a, b].
    [[nodiscard]] double mass(double a, double b) const {
        a = std::clamp(a, 0.0, 1.0);
        b = std::clamp(b, 0.0, 1.0);
        if (b <= a) {
            return 0.0;
        }
        return integrate([](double r) { return unnormalized(r); }, a, b) / z_;
    }

    [[nodiscard]] double cdf(double r) const { return mass(0.0, r); }

    [[nodiscard]] double mean() const {
        return integrate([](double r) { return r * unnormalized(r); }, 0.0, 1.0) / z_;
    }

  private:
    GueSurmise() : z_(integrate([](double r) { return unnormalized(r); }, 0.0, 1.0)) {}

    template <class F>
    static double integrate(F f, double a, double b) {
        using boost::math::quadrature::gauss_kronrod;
        double error = 0.0;
        return gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-12, &error);
    }

    double z_;
};

/// Poisson-limit ratio density 2 / (1 + r)^2 on [0, 1]; mean 2 ln 2 - 1.
/// Reference only; relative entropies are always taken against the GUE.
[[nodiscard]] inline double poisson_surmise_pdf(double r) {
    if (r < 0.0 || r > 1.0) {
        return 0.0;
    }
    return 2.0 / ((1.0 + r) * (1.0 + r));
}

[[nodiscard]] inline double gue_surmise_pdf(double r) {
    return GueSurmise::instance().pdf(r);
}

/// Histogram of r over uniform bins on [0, 1]; r = 1 lands in the last bin.
[[nodiscard]] inline std::vector<std::size_t> ratio_histogram(std::span<const double> r_values,
                                                              std::size_t bins) {
    std::vector<std::size_t> counts(bins, 0);
    for (const double r : r_values) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw std::domain_error("ratio_histogram: r outside [0, 1]");
        }
        const auto b = std::min(bins - 1, static_cast<std::size_t>(r * static_cast<double>(bins)));
        ++counts[b];
    }
    return counts;
}

/// R(Q || Q_GUE) in bits between the histogram (pseudocount 1 per bin) and
/// the bin-integrated surmise.
[[nodiscard]] inline double kl_to_gue(std::span<const double> r_values, std::size_t bins = 50) {
    if (r_values.empty()) {
        throw std::invalid_argument("kl_to_gue: no r values");
    }
    if (bins == 0) {
        throw std::invalid_argument("kl_to_gue: zero bins");
    }
    const auto counts = ratio_histogram(r_values, bins);
    const auto &gue = GueSurmise::instance();
    const double total = static_cast<double>(r_values.size() + bins);
    const double width = 1.0 / static_cast<double>(bins);
    double kl = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double q = static_cast<double>(counts[b] + 1) / total;
        const double g = gue.mass(static_cast<double>(b) * width,
                                  static_cast<double>(b + 1) * width);
        kl += q * std::log2(q / g);
    }
    return std::max(kl, 0.0);
}

struct HistogramRow {
    double r_bin_center;
    double empirical_density;
    double surmise_density;
};

/// Plot-ready density histogram (no pseudocount) beside the bin-averaged surmise.
[[nodiscard]] inline std::vector<HistogramRow> ratio_density_rows(std::span<const double> r_values,
                                                                  std::size_t bins = 50) {
    const auto counts = ratio_histogram(r_values, bins);
    const auto &gue = GueSurmise::instance();
    const double width = 1.0 / static_cast<double>(bins);
    const double n = std::max<double>(1.0, static_cast<double>(r_values.size()));
    std::vector<HistogramRow> rows;
    for (std::size_t b = 0; b < bins; ++b) {
        const double lo = static_cast<double>(b) * width;
        rows.push_back({lo + 0.5 * width, static_cast<double>(counts[b]) / (n * width),
                        gue.mass(lo, lo + width) / width});
    }
    return rows;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

[[nodiscard]] inline LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("fit_linear: x and y differ in length");
    }
    if (x.size() < 3) {
        throw std::invalid_argument("fit_linear: need at least 3 points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit_linear: x has zero variance");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

/// D(n) = D0 * 2^{-eta n}, fitted on (n, log2 D).
struct ExpDecayFit {
    double d0 = 0.0;
    double eta = 0.0;
    double r_squared = 0.0;
};

[[nodiscard]] inline ExpDecayFit fit_exp_decay(std::span<const double> n, std::span<const double> d) {
    std::vector<double> logd(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0)) {
            throw std::invalid_argument("fit_exp_decay: values must be positive");
        }
        logd[i] = std::log2(d[i]);
    }
    const auto lin = fit_linear(n, logd);
    return {std::exp2(lin.intercept), -lin.slope, lin.r_squared};
}

/// Linear growth of S(d) below 0.8 of its saturation value.
struct VelocityFit {
    double velocity = 0.0;
    double s_inf = 0.0;
    LinearFit fit;
};

/// Saturation value estimated as the mean over the last quarter of the curve.
[[nodiscard]] inline double saturation_value(std::span<const double> s) {
    if (s.empty()) {
        throw std::invalid_argument("saturation_value: empty curve");
    }
    const std::size_t tail = std::max<std::size_t>(1, s.size() / 4);
    double total = 0.0;
    for (std::size_t i = s.size() - tail; i < s.size(); ++i) {
        total += s[i];
    }
    return total / static_cast<double>(tail);
}

[[nodiscard]] inline VelocityFit entanglement_velocity(std::span<const double> depths,
                                                       std::span<const double> s,
                                                       double window_fraction = 0.8) {
    if (depths.size() != s.size()) {
        throw std::invalid_argument("entanglement_velocity: curve length mismatch");
    }
    VelocityFit out;
    out.s_inf = saturation_value(s);
    if (!(out.s_inf > 1e-9)) {
        throw std::domain_error("entanglement_velocity: no entanglement growth");
    }
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < window_fraction * out.s_inf) {
            x.push_back(depths[i]);
            y.push_back(s[i]);
        } else if (!x.empty()) {
            break;
        }
    }
    if (x.size() < 3) {
        throw std::domain_error("entanglement_velocity: growth window has fewer than 3 points");
    }
    out.fit = fit_linear(x, y);
    out.velocity = out.fit.slope;
    return out;
}

/// First depth (linearly interpolated) at which S reaches fraction * S_inf.
[[nodiscard]] inline double saturation_depth(std::span<const double> depths,
                                             std::span<const double> s,
                                             double fraction = 0.9) {
    if (depths.size() != s.size() || s.empty()) {
        throw std::invalid_argument("saturation_depth: bad curve");
    }
    const double target = fraction * saturation_value(s);
    if (s[0] >= target) {
        return depths[0];
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] >= target) {
            const double t = (target - s[i - 1]) / (s[i] - s[i - 1]);
            return depths[i - 1] + t * (depths[i] - depths[i - 1]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace pqrc
