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
 * Dense exact state engine: statevectors, density matrices, strided gate
 * kernels, partial traces and Hermitian eigendecomposition.
 *
 * Qubit q corresponds to bit q of a computational-basis index (little
 * endian). Density matrices are stored column-major, so element (r, c)
 * lives at r + c * 2^n; row bits occupy positions [0, n) and column bits
 * positions [n, 2n) of the flat index.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pqrc {

using cplx = std::complex<double>;
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Qubit = std::size_t;

inline constexpr std::size_t kMaxStateQubits = 20;
inline constexpr std::size_t kMaxDensityQubits = 12;
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-8;

namespace detail {

[[nodiscard]] inline std::size_t insert_zero_bit(std::size_t x,
                                                 std::size_t bit) noexcept {
    const std::size_t low = x & ((std::size_t{1} << bit) - 1);
    return ((x >> bit) << (bit + 1)) | low;
}

/// Scatter the low bits of `value` onto the given bit positions.
[[nodiscard]] inline std::size_t
scatter_bits(std::size_t value, std::span<const Qubit> positions) noexcept {
    std::size_t out = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        if ((value >> k) & 1U) {
            out |= std::size_t{1} << positions[k];
        }
    }
    return out;
}

/// Full-register offsets for every configuration of a qubit subset.
[[nodiscard]] inline std::vector<std::size_t>
subset_offsets(std::span<const Qubit> qubits) {
    std::vector<std::size_t> out(std::size_t{1} << qubits.size());
    for (std::size_t v = 0; v < out.size(); ++v) {
        out[v] = scatter_bits(v, qubits);
    }
    return out;
}

inline void apply_1q_kernel(cplx *data, std::size_t n_bits, std::size_t bit,
                            const cplx (&m)[4]) {
    const std::size_t half = std::size_t{1} << (n_bits - 1);
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t i = 0; i < half; ++i) {
        const std::size_t i0 = insert_zero_bit(i, bit);
        const std::size_t i1 = i0 | stride;
        const cplx v0 = data[i0];
        const cplx v1 = data[i1];
        data[i0] = m[0] * v0 + m[1] * v1;
        data[i1] = m[2] * v0 + m[3] * v1;
    }
}

// Matrix row/column index is 2 * bit(first) + bit(second).
inline void apply_2q_kernel(cplx *data, std::size_t n_bits,
                            std::size_t first, std::size_t second,
                            const cplx (&m)[16]) {
    const std::size_t lo = std::min(first, second);
    const std::size_t hi = std::max(first, second);
    const std::size_t quarter = std::size_t{1} << (n_bits - 2);
    const std::size_t s_first = std::size_t{1} << first;
    const std::size_t s_second = std::size_t{1} << second;
    for (std::size_t i = 0; i < quarter; ++i) {
        const std::size_t i00 = insert_zero_bit(insert_zero_bit(i, lo), hi);
        const std::size_t idx[4] = {i00, i00 | s_second, i00 | s_first,
                                    i00 | s_first | s_second};
        const cplx v[4] = {data[idx[0]], data[idx[1]], data[idx[2]],
                           data[idx[3]]};
        for (int r = 0; r < 4; ++r) {
            data[idx[r]] = m[4 * r] * v[0] + m[4 * r + 1] * v[1] +
                           m[4 * r + 2] * v[2] + m[4 * r + 3] * v[3];
        }
    }
}

inline void apply_1q_diagonal(cplx *data, std::size_t n_bits, std::size_t bit,
                              cplx d0, cplx d1) {
    const std::size_t dim = std::size_t{1} << n_bits;
    for (std::size_t i = 0; i < dim; ++i) {
        data[i] *= ((i >> bit) & 1U) ? d1 : d0;
    }
}

inline void apply_2q_diagonal(cplx *data, std::size_t n_bits,
                              std::size_t first, std::size_t second,
                              const cplx (&d)[4]) {
    const std::size_t dim = std::size_t{1} << n_bits;
    for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t k = 2 * ((i >> first) & 1U) + ((i >> second) & 1U);
        data[i] *= d[k];
    }
}

} // namespace detail

/// A one- or two-qubit gate. The unitary flag records whether U^dagger U = I
/// held to 1e-10 at construction.
class GateMatrix {
  public:
    GateMatrix() = default;

    explicit GateMatrix(CMatrix matrix) : matrix_(std::move(matrix)) {
        if (matrix_.rows() != matrix_.cols() ||
            (matrix_.rows() != 2 && matrix_.rows() != 4)) {
            throw std::invalid_argument(
                "GateMatrix: expected a 2x2 or 4x4 matrix");
        }
        arity_ = matrix_.rows() == 2 ? 1 : 2;
        const auto dim = matrix_.rows();
        unitary_ = (matrix_.adjoint() * matrix_ - CMatrix::Identity(dim, dim))
                       .cwiseAbs()
                       .maxCoeff() < kNormTolerance;
        diagonal_ = true;
        for (Eigen::Index r = 0; r < dim; ++r) {
            for (Eigen::Index c = 0; c < dim; ++c) {
                if (r != c && matrix_(r, c) != cplx{0.0, 0.0}) {
                    diagonal_ = false;
                }
            }
        }
    }

    [[nodiscard]] std::size_t arity() const noexcept { return arity_; }
    [[nodiscard]] bool unitary() const noexcept { return unitary_; }
    [[nodiscard]] bool diagonal() const noexcept { return diagonal_; }
    [[nodiscard]] const CMatrix &matrix() const noexcept { return matrix_; }

    [[nodiscard]] GateMatrix conjugate() const {
        return GateMatrix(matrix_.conjugate());
    }
    [[nodiscard]] GateMatrix adjoint() const {
        return GateMatrix(matrix_.adjoint());
    }

  private:
    CMatrix matrix_;
    std::size_t arity_ = 0;
    bool unitary_ = false;
    bool diagonal_ = false;
};

enum class UnitaryCheck { Require, Skip };

class StateVector {
  public:
    /// |0...0> on n qubits.
    explicit StateVector(std::size_t n_qubits)
        : n_qubits_(n_qubits), amps_(checked_dim(n_qubits), cplx{0.0, 0.0}) {
        amps_[0] = 1.0;
    }

    StateVector(std::size_t n_qubits, std::vector<cplx> amplitudes)
        : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
        if (amps_.size() != checked_dim(n_qubits)) {
            throw std::invalid_argument(
                "StateVector: amplitude count must equal 2^n_qubits");
        }
        if (std::abs(norm_squared() - 1.0) > kNormTolerance) {
            throw std::invalid_argument("StateVector: amplitudes not normalized");
        }
    }

    /// Normalizes arbitrary nonzero amplitudes.
    [[nodiscard]] static StateVector normalized(std::size_t n_qubits,
                                                std::vector<cplx> amplitudes) {
        double total = 0.0;
        for (const auto &a : amplitudes) {
            total += std::norm(a);
        }
        if (!(total > 0.0)) {
            throw std::invalid_argument("StateVector: zero vector");
        }
        const double scale = 1.0 / std::sqrt(total);
        for (auto &a : amplitudes) {
            a *= scale;
        }
        return StateVector(n_qubits, std::move(amplitudes));
    }

    [[nodiscard]] static StateVector basis(std::size_t n_qubits,
                                           std::size_t index) {
        StateVector s(n_qubits);
        if (index >= s.dim()) {
            throw std::out_of_range("StateVector::basis: index out of range");
        }
        s.amps_[0] = 0.0;
        s.amps_[index] = 1.0;
        return s;
    }

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const cplx> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] std::span<cplx> amplitudes() noexcept { return amps_; }
    [[nodiscard]] cplx operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] double norm_squared() const noexcept {
        double total = 0.0;
        for (const auto &a : amps_) {
            total += std::norm(a);
        }
        return total;
    }

    [[nodiscard]] StateVector tensor(const StateVector &high) const {
        // `this` occupies the low qubits.
        std::vector<cplx> out(dim() * high.dim());
        for (std::size_t h = 0; h < high.dim(); ++h) {
            for (std::size_t l = 0; l < dim(); ++l) {
                out[l + h * dim()] = amps_[l] * high.amps_[h];
            }
        }
        return StateVector(n_qubits_ + high.n_qubits_, std::move(out));
    }

    [[nodiscard]] static std::size_t checked_dim(std::size_t n_qubits) {
        if (n_qubits == 0 || n_qubits > kMaxStateQubits) {
            throw std::invalid_argument(
                "StateVector: qubit count outside [1, " +
                std::to_string(kMaxStateQubits) + "]");
        }
        return std::size_t{1} << n_qubits;
    }

  private:
    std::size_t n_qubits_;
    std::vector<cplx> amps_;
};

class DensityMatrix {
  public:
    /// |0...0><0...0| on n qubits.
    explicit DensityMatrix(std::size_t n_qubits)
        : n_qubits_(n_qubits),
          matrix_(CMatrix::Zero(checked_dim(n_qubits), checked_dim(n_qubits))) {
        matrix_(0, 0) = 1.0;
    }

    /// Checks Hermiticity and unit trace; positivity is left to validate().
    DensityMatrix(std::size_t n_qubits, CMatrix matrix)
        : n_qubits_(n_qubits), matrix_(std::move(matrix)) {
        const auto dim = static_cast<Eigen::Index>(checked_dim(n_qubits));
        if (matrix_.rows() != dim || matrix_.cols() != dim) {
            throw std::invalid_argument(
                "DensityMatrix: matrix must be 2^n x 2^n");
        }
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() >
            kNormTolerance) {
            throw std::invalid_argument("DensityMatrix: matrix not Hermitian");
        }
        if (std::abs(trace() - 1.0) > kNormTolerance) {
            throw std::invalid_argument("DensityMatrix: trace differs from 1");
        }
    }

    [[nodiscard]] static DensityMatrix from_pure(const StateVector &psi) {
        const Eigen::Map<const CVector> v(psi.amplitudes().data(),
                                          static_cast<Eigen::Index>(psi.dim()));
        return DensityMatrix(psi.n_qubits(), v * v.adjoint());
    }

    [[nodiscard]] static DensityMatrix maximally_mixed(std::size_t n_qubits) {
        const auto dim = static_cast<Eigen::Index>(checked_dim(n_qubits));
        return DensityMatrix(n_qubits, CMatrix::Identity(dim, dim) /
                                           static_cast<double>(dim));
    }

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept {
        return static_cast<std::size_t>(matrix_.rows());
    }
    [[nodiscard]] const CMatrix &matrix() const noexcept { return matrix_; }
    /// Raw access for in-place kernels; callers keep the invariants.
    [[nodiscard]] CMatrix &mutable_matrix() noexcept { return matrix_; }

    [[nodiscard]] double trace() const { return matrix_.trace().real(); }
    [[nodiscard]] double purity() const {
        // Tr rho^2 = sum |rho_ij|^2 for Hermitian rho.
        return matrix_.squaredNorm();
    }

    /// Tensor product with `this` on the low qubits.
    [[nodiscard]] DensityMatrix tensor(const DensityMatrix &high) const {
        const auto dl = matrix_.rows();
        const auto dh = high.matrix_.rows();
        CMatrix out(dl * dh, dl * dh);
        for (Eigen::Index hc = 0; hc < dh; ++hc) {
            for (Eigen::Index hr = 0; hr < dh; ++hr) {
                out.block(hr * dl, hc * dl, dl, dl) =
                    high.matrix_(hr, hc) * matrix_;
            }
        }
        return DensityMatrix(n_qubits_ + high.n_qubits_, std::move(out));
    }

    /// Throws if Hermiticity, trace or positivity fail their tolerances.
    void validate(double tol = kNormTolerance) const;

    [[nodiscard]] static std::size_t checked_dim(std::size_t n_qubits) {
        if (n_qubits == 0 || n_qubits > kMaxDensityQubits) {
            throw std::invalid_argument(
                "DensityMatrix: qubit count outside [1, " +
                std::to_string(kMaxDensityQubits) + "]");
        }
        return std::size_t{1} << n_qubits;
    }

  private:
    std::size_t n_qubits_;
    CMatrix matrix_;
};

namespace detail {

inline void check_targets(std::size_t n_qubits, const GateMatrix &gate,
                          std::span<const Qubit> targets, UnitaryCheck check) {
    if (gate.arity() == 0) {
        throw std::invalid_argument("apply_gate: empty gate");
    }
    if (targets.size() != gate.arity()) {
        throw std::invalid_argument(
            "apply_gate: gate arity does not match target count");
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] >= n_qubits) {
            throw std::out_of_range("apply_gate: target qubit out of range");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (targets[i] == targets[j]) {
                throw std::invalid_argument("apply_gate: repeated target");
            }
        }
    }
    if (check == UnitaryCheck::Require && !gate.unitary()) {
        throw std::invalid_argument("apply_gate: gate is not unitary");
    }
}

// Applies `m` (or its conjugate) to the qubits at the given flat-index bits.
inline void apply_on_bits(cplx *data, std::size_t n_bits, const CMatrix &m,
                          bool diagonal, std::span<const std::size_t> bits,
                          bool conjugate) {
    auto at = [&](Eigen::Index r, Eigen::Index c) {
        return conjugate ? std::conj(m(r, c)) : m(r, c);
    };
    if (bits.size() == 1) {
        if (diagonal) {
            apply_1q_diagonal(data, n_bits, bits[0], at(0, 0), at(1, 1));
            return;
        }
        const cplx k[4] = {at(0, 0), at(0, 1), at(1, 0), at(1, 1)};
        apply_1q_kernel(data, n_bits, bits[0], k);
        return;
    }
    if (diagonal) {
        const cplx d[4] = {at(0, 0), at(1, 1), at(2, 2), at(3, 3)};
        apply_2q_diagonal(data, n_bits, bits[0], bits[1], d);
        return;
    }
    cplx k[16];
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            k[4 * r + c] = at(r, c);
        }
    }
    apply_2q_kernel(data, n_bits, bits[0], bits[1], k);
}

} // namespace detail

/// |psi> -> U|psi> on `targets`; targets[0] is the most significant gate index.
inline void apply_gate(StateVector &state, const GateMatrix &gate,
                       std::span<const Qubit> targets,
                       UnitaryCheck check = UnitaryCheck::Require) {
    detail::check_targets(state.n_qubits(), gate, targets, check);
    detail::apply_on_bits(state.amplitudes().data(), state.n_qubits(),
                          gate.matrix(), gate.diagonal(), targets, false);
}

/// rho -> U rho U^dagger on `targets`.
inline void apply_gate(DensityMatrix &rho, const GateMatrix &gate,
                       std::span<const Qubit> targets,
                       UnitaryCheck check = UnitaryCheck::Require) {
    const std::size_t n = rho.n_qubits();
    detail::check_targets(n, gate, targets, check);
    std::vector<std::size_t> col_bits(targets.begin(), targets.end());
    for (auto &b : col_bits) {
        b += n;
    }
    cplx *data = rho.mutable_matrix().data();
    detail::apply_on_bits(data, 2 * n, gate.matrix(), gate.diagonal(), targets,
                          false);
    detail::apply_on_bits(data, 2 * n, gate.matrix(), gate.diagonal(),
                          col_bits, true);
}

inline void apply_gate(StateVector &state, const GateMatrix &gate,
                       std::initializer_list<Qubit> targets,
                       UnitaryCheck check = UnitaryCheck::Require) {
    apply_gate(state, gate, std::span<const Qubit>(targets.begin(), targets.size()),
               check);
}

inline void apply_gate(DensityMatrix &rho, const GateMatrix &gate,
                       std::initializer_list<Qubit> targets,
                       UnitaryCheck check = UnitaryCheck::Require) {
    apply_gate(rho, gate, std::span<const Qubit>(targets.begin(), targets.size()),
               check);
}

namespace detail {

struct Bipartition {
    std::vector<Qubit> keep;
    std::vector<Qubit> traced;
};

inline Bipartition split_qubits(std::size_t n_qubits,
                                std::span<const Qubit> keep) {
    Bipartition out;
    out.keep.assign(keep.begin(), keep.end());
    std::sort(out.keep.begin(), out.keep.end());
    if (out.keep.empty()) {
        throw std::invalid_argument("partial_trace: keep set is empty");
    }
    if (std::adjacent_find(out.keep.begin(), out.keep.end()) !=
        out.keep.end()) {
        throw std::invalid_argument("partial_trace: repeated qubit in keep set");
    }
    if (out.keep.back() >= n_qubits) {
        throw std::out_of_range("partial_trace: qubit out of range");
    }
    if (out.keep.size() == n_qubits) {
        throw std::invalid_argument(
            "partial_trace: keep set must be a proper subset");
    }
    for (Qubit q = 0; q < n_qubits; ++q) {
        if (!std::binary_search(out.keep.begin(), out.keep.end(), q)) {
            out.traced.push_back(q);
        }
    }
    return out;
}

} // namespace detail

/// Reduced state on `keep`; kept qubits are renumbered in ascending order.
[[nodiscard]] inline DensityMatrix partial_trace(const StateVector &psi,
                                                 std::span<const Qubit> keep) {
    const auto part = detail::split_qubits(psi.n_qubits(), keep);
    const auto keep_off = detail::subset_offsets(part.keep);
    const auto trace_off = detail::subset_offsets(part.traced);
    const auto dk = static_cast<Eigen::Index>(keep_off.size());
    const auto dt = static_cast<Eigen::Index>(trace_off.size());
    CMatrix a(dk, dt);
    const auto amps = psi.amplitudes();
    for (Eigen::Index t = 0; t < dt; ++t) {
        for (Eigen::Index k = 0; k < dk; ++k) {
            a(k, t) = amps[keep_off[k] | trace_off[t]];
        }
    }
    CMatrix reduced = a * a.adjoint();
    // Exact Hermitian symmetry for downstream checks.
    reduced = 0.5 * (reduced + reduced.adjoint()).eval();
    return DensityMatrix(part.keep.size(), std::move(reduced));
}

[[nodiscard]] inline DensityMatrix partial_trace(const DensityMatrix &rho,
                                                 std::span<const Qubit> keep) {
    const auto part = detail::split_qubits(rho.n_qubits(), keep);
    const auto keep_off = detail::subset_offsets(part.keep);
    const auto trace_off = detail::subset_offsets(part.traced);
    const auto dk = static_cast<Eigen::Index>(keep_off.size());
    CMatrix reduced = CMatrix::Zero(dk, dk);
    const CMatrix &m = rho.matrix();
    for (Eigen::Index c = 0; c < dk; ++c) {
        for (Eigen::Index r = 0; r < dk; ++r) {
            cplx acc{0.0, 0.0};
            for (const auto t : trace_off) {
                acc += m(static_cast<Eigen::Index>(keep_off[r] | t),
                         static_cast<Eigen::Index>(keep_off[c] | t));
            }
            reduced(r, c) = acc;
        }
    }
    reduced = 0.5 * (reduced + reduced.adjoint()).eval();
    return DensityMatrix(part.keep.size(), std::move(reduced));
}

inline DensityMatrix partial_trace(const StateVector &psi,
                                   std::initializer_list<Qubit> keep) {
    return partial_trace(psi, std::span<const Qubit>(keep.begin(), keep.size()));
}
inline DensityMatrix partial_trace(const DensityMatrix &rho,
                                   std::initializer_list<Qubit> keep) {
    return partial_trace(rho, std::span<const Qubit>(keep.begin(), keep.size()));
}

struct EigenSystem {
    RVector values; ///< ascending
    CMatrix vectors;
};

namespace detail {
inline void check_hermitian(const CMatrix &a, double tol) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("eigh: matrix must be square and nonempty");
    }
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument("eigh: matrix is not Hermitian");
    }
}
/// Eigenpairs of A from a solve on A + c I with c = |A|_F, which is positive
/// semidefinite. Returns nothing when the tridiagonal QR iteration stalls.
inline std::optional<EigenSystem> solve_shifted(const CMatrix &a, bool vectors) {
    const double c = a.norm();
    const CMatrix b = a + c * CMatrix::Identity(a.rows(), a.cols());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(b, vectors ? Eigen::ComputeEigenvectors
                                                             : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        return std::nullopt;
    }
    return EigenSystem{solver.eigenvalues().array() - c,
                       vectors ? CMatrix(solver.eigenvectors()) : CMatrix()};
}

/// Two-sided Jacobi SVD of A + c I. For a positive semidefinite Hermitian
/// matrix the left singular vectors are eigenvectors. Always converges.
inline EigenSystem solve_jacobi(const CMatrix &a, bool vectors) {
    const double c = a.norm();
    const CMatrix b = a + c * CMatrix::Identity(a.rows(), a.cols());
    Eigen::JacobiSVD<CMatrix> svd(b, vectors ? Eigen::ComputeFullU : 0);
    const Eigen::Index n = a.rows();
    EigenSystem out;
    out.values.resize(n);
    if (vectors) {
        out.vectors.resize(n, n);
    }
    // Singular values come sorted descending.
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = svd.singularValues()(n - 1 - i) - c;
        if (vectors) {
            out.vectors.col(i) = svd.matrixU().col(n - 1 - i);
        }
    }
    return out;
}

/// Direct solve, then the shifted solve, then Jacobi. The QR iteration can
/// stall on stabilizer reductions whose null space carries rounding noise.
inline EigenSystem solve_hermitian(const CMatrix &a, bool vectors) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a, vectors ? Eigen::ComputeEigenvectors
                                                             : Eigen::EigenvaluesOnly);
    if (solver.info() == Eigen::Success) {
        return {solver.eigenvalues(), vectors ? CMatrix(solver.eigenvectors()) : CMatrix()};
    }
    if (auto shifted = solve_shifted(a, vectors)) {
        return *std::move(shifted);
    }
    return solve_jacobi(a, vectors);
}
} // namespace detail

/// Hermitian eigendecomposition A = V diag(values) V^dagger, values ascending.
[[nodiscard]] inline EigenSystem eigh(const CMatrix &a,
                                      double tol = kHermitianTolerance) {
    detail::check_hermitian(a, tol);
    return detail::solve_hermitian(a, true);
}

[[nodiscard]] inline RVector eigvalsh(const CMatrix &a,
                                      double tol = kHermitianTolerance) {
    detail::check_hermitian(a, tol);
    return detail::solve_hermitian(a, false).values;
}

inline void DensityMatrix::validate(double tol) const {
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > tol) {
        throw std::runtime_error("DensityMatrix: Hermiticity violated");
    }
    if (std::abs(trace() - 1.0) > tol) {
        throw std::runtime_error("DensityMatrix: trace drifted from 1");
    }
    if (eigvalsh(matrix_).minCoeff() < -tol) {
        throw std::runtime_error("DensityMatrix: negative eigenvalue");
    }
}

/// Half the trace norm of a - b.
[[nodiscard]] inline double trace_distance(const DensityMatrix &a,
                                           const DensityMatrix &b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    const CMatrix diff = a.matrix() - b.matrix();
    return 0.5 * eigvalsh(diff).cwiseAbs().sum();
}

} // namespace pqrc
