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
 * Nonstabilizerness diagnostics built on the Pauli-basis transform:
 * second stabilizer Renyi entropy, mutual magic, relative gap to Haar,
 * anti-flatness, Haar reference ensembles and size-scaling exponents.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pqrc/qcore.hpp"
#include "pqrc/rng.hpp"
#include "pqrc/spectra.hpp"

namespace pqrc {

/// Pauli codes per qubit; string index is sum_q code_q * 4^q.
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// c_P = Tr(rho P) for every Pauli string P.
struct PauliSpectrum {
    std::size_t n_qubits = 0;
    std::vector<double> coefficients;

    [[nodiscard]] double operator[](std::size_t index) const { return coefficients[index]; }

    /// Tr rho^2 = 2^{-n} sum_P c_P^2.
    [[nodiscard]] double purity() const {
        double s = 0.0;
        for (const double c : coefficients) {
            s += c * c;
        }
        return std::ldexp(s, -static_cast<int>(n_qubits));
    }

    /// 2^{-n} sum_P c_P^4.
    [[nodiscard]] double fourth_moment() const {
        double s = 0.0;
        for (const double c : coefficients) {
            const double c2 = c * c;
            s += c2 * c2;
        }
        return std::ldexp(s, -static_cast<int>(n_qubits));
    }
};

[[nodiscard]] inline std::size_t pauli_index(std::span<const Pauli> string) {
    std::size_t index = 0;
    for (std::size_t q = string.size(); q-- > 0;) {
        index = 4 * index + static_cast<std::size_t>(string[q]);
    }
    return index;
}

/**
 * Factorized transform over the (row bit, column bit) pair of each qubit,
 * one in-place butterfly pass per qubit, O(n 4^n) total. For a qubit's
 * 2x2 block the pass writes I = r00 + r11, X = r01 + r10,
 * Y = i (r01 - r10), Z = r00 - r11.
 */
[[nodiscard]] inline PauliSpectrum pauli_transform(const DensityMatrix &rho,
                                                   std::size_t max_qubits = kMaxDensityQubits) {
    const std::size_t n = rho.n_qubits();
    if (n > max_qubits) {
        throw std::invalid_argument("pauli_transform: qubit count exceeds configured cap");
    }
    const std::size_t dim = rho.dim();
    std::vector<cplx> work(rho.matrix().data(), rho.matrix().data() + dim * dim);
    const std::size_t quarter = dim * dim / 4;
    const cplx i_unit{0.0, 1.0};
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t row_bit = q;
        const std::size_t col_bit = q + n;
        const std::size_t rs = std::size_t{1} << row_bit;
        const std::size_t cs = std::size_t{1} << col_bit;
        for (std::size_t k = 0; k < quarter; ++k) {
            const std::size_t i00 = detail::insert_zero_bit(detail::insert_zero_bit(k, row_bit), col_bit);
            const cplx r00 = work[i00];
            const cplx r10 = work[i00 | rs];  // row 1, column 0
            const cplx r01 = work[i00 | cs];  // row 0, column 1
            const cplx r11 = work[i00 | rs | cs];
            // Slot (row, col) holds code row + 2 col.
            work[i00] = r00 + r11;
            work[i00 | rs] = r01 + r10;
            work[i00 | cs] = i_unit * (r01 - r10);
            work[i00 | rs | cs] = r00 - r11;
        }
    }
    // Interleave row bits (even) and column bits (odd) into base-4 digits.
    std::vector<std::size_t> spread(dim, 0);
    for (std::size_t v = 0; v < dim; ++v) {
        std::size_t s = 0;
        for (std::size_t b = 0; b < n; ++b) {
            s |= ((v >> b) & 1U) << (2 * b);
        }
        spread[v] = s;
    }
    PauliSpectrum out;
    out.n_qubits = n;
    out.coefficients.resize(dim * dim);
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t r = 0; r < dim; ++r) {
            out.coefficients[spread[r] | (spread[c] << 1)] = work[r + c * dim].real();
        }
    }
    return out;
}

/// M(rho) = -log2(2^{-N} sum_P c_P^4) - S_2, valid for mixed states.
[[nodiscard]] inline double sre2(const PauliSpectrum &spec) {
    const double purity = spec.purity();
    if (!(purity > 1e-14)) {
        throw std::domain_error("sre2: purity numerically zero");
    }
    const double s2 = -std::log2(purity);
    return -std::log2(spec.fourth_moment()) - s2;
}

[[nodiscard]] inline double sre2(const DensityMatrix &rho) {
    return sre2(pauli_transform(rho));
}

[[nodiscard]] inline double sre2(const StateVector &psi) {
    return sre2(DensityMatrix::from_pure(psi));
}

/// Tr rho^3 - (Tr rho^2)^2 from reduced-state eigenvalues.
[[nodiscard]] inline double anti_flatness_from_eigenvalues(std::span<const double> lambda) {
    double p2 = 0.0;
    double p3 = 0.0;
    for (const double l : lambda) {
        p2 += l * l;
        p3 += l * l * l;
    }
    return p3 - p2 * p2;
}

/// Qubits [0, memory_size) form M, the rest form R.
struct Cut {
    std::vector<Qubit> memory;
    std::vector<Qubit> readout;
};

[[nodiscard]] inline Cut make_cut(std::size_t n_qubits, std::optional<std::size_t> memory_size = {}) {
    if (!memory_size) {
        if (n_qubits % 2 != 0) {
            throw std::invalid_argument("equal bipartition requires even N; pass an explicit cut");
        }
        memory_size = n_qubits / 2;
    }
    if (*memory_size == 0 || *memory_size >= n_qubits) {
        throw std::invalid_argument("cut must leave both sides nonempty");
    }
    Cut cut;
    for (Qubit q = 0; q < n_qubits; ++q) {
        (q < *memory_size ? cut.memory : cut.readout).push_back(q);
    }
    return cut;
}

[[nodiscard]] inline double anti_flatness(const StateVector &psi,
                                          std::optional<std::size_t> memory_size = {}) {
    const Cut cut = make_cut(psi.n_qubits(), memory_size);
    const auto lambda = eigenvalues_of(partial_trace(psi, cut.readout));
    return anti_flatness_from_eigenvalues(lambda);
}

struct MagicReport {
    double total_magic = 0.0;
    double magic_m = 0.0;
    double magic_r = 0.0;
    double mutual_magic = 0.0;
    std::optional<double> relative_gap;
    bool gap_exceeds_one = false;
    double anti_flatness = 0.0;
};

/// Total, subsystem and mutual magic of a pure state plus anti-flatness at
/// the same cut. Subsystem terms include their -S_2 corrections.
[[nodiscard]] inline MagicReport mutual_magic(const StateVector &psi,
                                              std::optional<std::size_t> memory_size = {},
                                              std::size_t max_qubits = kMaxDensityQubits) {
    const Cut cut = make_cut(psi.n_qubits(), memory_size);
    MagicReport report;
    report.total_magic = sre2(pauli_transform(DensityMatrix::from_pure(psi), max_qubits));
    const DensityMatrix rho_m = partial_trace(psi, cut.memory);
    const DensityMatrix rho_r = partial_trace(psi, cut.readout);
    report.magic_m = sre2(rho_m);
    report.magic_r = sre2(rho_r);
    report.mutual_magic = report.total_magic - report.magic_m - report.magic_r;
    report.anti_flatness = anti_flatness_from_eigenvalues(eigenvalues_of(rho_r));
    return report;
}

/// |I - I_H| / I_H.
[[nodiscard]] inline double relative_gap(double mutual, double haar_reference) {
    if (!(haar_reference > 0.0)) {
        throw std::invalid_argument("relative_gap: Haar reference must be positive");
    }
    return std::abs(mutual - haar_reference) / haar_reference;
}

/// Records the gap on the report; values above 1 are kept and flagged.
inline void attach_relative_gap(MagicReport &report, double haar_reference) {
    report.relative_gap = relative_gap(report.mutual_magic, haar_reference);
    report.gap_exceeds_one = *report.relative_gap > 1.0;
}

/// Haar pure state from normalized complex Gaussian amplitudes.
[[nodiscard]] inline StateVector haar_state(std::size_t n_qubits, Rng &rng) {
    std::vector<cplx> amps(std::size_t{1} << n_qubits);
    for (auto &a : amps) {
        const double re = rng.normal();
        const double im = rng.normal();
        a = {re, im};
    }
    return StateVector::normalized(n_qubits, std::move(amps));
}

/// Tensor product of independent Haar single-qubit states.
[[nodiscard]] inline StateVector random_product_state(std::size_t n_qubits, Rng &rng) {
    StateVector out = haar_state(1, rng);
    for (std::size_t q = 1; q < n_qubits; ++q) {
        out = out.tensor(haar_state(1, rng));
    }
    return out;
}

struct MeanAndError {
    double mean = 0.0;
    double std_error = 0.0;
};

[[nodiscard]] inline MeanAndError mean_and_error(std::span<const double> x) {
    if (x.empty()) {
        return {std::nan(""), std::nan("")};
    }
    const double n = static_cast<double>(x.size());
    double m = 0.0;
    for (const double v : x) {
        m += v;
    }
    m /= n;
    if (x.size() < 2) {
        return {m, 0.0};
    }
    double ss = 0.0;
    for (const double v : x) {
        ss += (v - m) * (v - m);
    }
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

struct HaarReference {
    std::size_t n_qubits = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    MeanAndError mutual_magic;
    MeanAndError total_magic;
    MeanAndError anti_flatness;
    MeanAndError purity; ///< Tr rho_R^2 at the cut
};

/// One Haar draw. Magic fields are NaN when `with_magic` is false.
struct HaarSample {
    double total_magic = std::numeric_limits<double>::quiet_NaN();
    double mutual_magic = std::numeric_limits<double>::quiet_NaN();
    double anti_flatness = 0.0;
    double purity = 0.0;
};

[[nodiscard]] inline HaarSample haar_sample(std::size_t n_qubits, std::uint64_t seed, bool with_magic,
                                            std::optional<std::size_t> memory_size = {}) {
    const Cut cut = make_cut(n_qubits, memory_size);
    Rng rng(seed);
    const StateVector psi = haar_state(n_qubits, rng);
    const auto lambda = eigenvalues_of(partial_trace(psi, cut.readout));
    HaarSample out;
    for (const double l : lambda) {
        out.purity += l * l;
    }
    out.anti_flatness = anti_flatness_from_eigenvalues(lambda);
    if (with_magic) {
        const auto report = mutual_magic(psi, cut.memory.size());
        out.total_magic = report.total_magic;
        out.mutual_magic = report.mutual_magic;
    }
    return out;
}

[[nodiscard]] inline HaarReference summarize_haar(std::size_t n_qubits, std::uint64_t seed,
                                                  std::span<const HaarSample> draws, bool with_magic) {
    std::vector<double> mm;
    std::vector<double> tm;
    std::vector<double> af;
    std::vector<double> pur;
    for (const auto &d : draws) {
        af.push_back(d.anti_flatness);
        pur.push_back(d.purity);
        if (with_magic) {
            mm.push_back(d.mutual_magic);
            tm.push_back(d.total_magic);
        }
    }
    HaarReference ref;
    ref.n_qubits = n_qubits;
    ref.samples = draws.size();
    ref.seed = seed;
    ref.anti_flatness = mean_and_error(af);
    ref.purity = mean_and_error(pur);
    if (with_magic) {
        ref.mutual_magic = mean_and_error(mm);
        ref.total_magic = mean_and_error(tm);
    }
    return ref;
}

/// Sample k uses the stream child_seed(seed, {k}). Set `with_magic` false
/// to skip the 4^N Pauli transform when only F and purity are needed.
[[nodiscard]] inline HaarReference haar_reference(std::size_t n_qubits, std::size_t samples,
                                                  std::uint64_t seed, bool with_magic = true,
                                                  std::optional<std::size_t> memory_size = {}) {
    if (samples < 50) {
        throw std::invalid_argument("haar_reference: need at least 50 samples");
    }
    std::vector<HaarSample> draws;
    draws.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        draws.push_back(haar_sample(n_qubits, child_seed(seed, {k}), with_magic, memory_size));
    }
    return summarize_haar(n_qubits, seed, draws, with_magic);
}

/// Anti-flatness at or below this is treated as exactly flat.
inline constexpr double kFlatnessFloor = 1e-12;

struct ScalingFit {
    double alpha = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// log2 F = -alpha N + c. Undefined (nullopt) when any mean F is at or
/// below kFlatnessFloor (the stabilizer limit).
[[nodiscard]] inline std::optional<ScalingFit> scrambling_exponent(std::span<const double> sizes,
                                                                   std::span<const double> f_means) {
    if (sizes.size() != f_means.size() || sizes.size() < 3) {
        throw std::invalid_argument("scrambling_exponent: need at least 3 sizes");
    }
    std::vector<double> logf;
    for (const double f : f_means) {
        if (!(f > kFlatnessFloor)) {
            return std::nullopt;
        }
        logf.push_back(std::log2(f));
    }
    const auto lin = fit_linear(sizes, logf);
    return ScalingFit{-lin.slope, lin.intercept, lin.r_squared};
}

} // namespace pqrc
