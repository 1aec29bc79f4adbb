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

#include <unsupported/Eigen/KroneckerProduct>

#include "pqrc/circuit.hpp"
#include "pqrc/magic.hpp"
#include "pqrc/qcore.hpp"
#include "pqrc/rng.hpp"

namespace {

using namespace pqrc;

CMatrix identity(std::size_t qubits) {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << qubits);
    return CMatrix::Identity(d, d);
}

// Full-register operator for a gate on adjacent qubits (q + 1, q) built by
// Kronecker products, independent of the strided kernels.
CMatrix embed_adjacent(const GateMatrix &g, std::size_t n, std::size_t q) {
    const CMatrix low = Eigen::kroneckerProduct(g.matrix(), identity(q)).eval();
    return Eigen::kroneckerProduct(identity(n - q - g.arity()), low).eval();
}

CVector as_vector(const StateVector &s) {
    return Eigen::Map<const CVector>(s.amplitudes().data(), static_cast<Eigen::Index>(s.dim()));
}

StateVector random_state(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return haar_state(n, rng);
}

GateMatrix random_unitary_2q(std::uint64_t seed) {
    Rng rng(seed);
    CMatrix a(4, 4);
    for (Eigen::Index i = 0; i < 16; ++i) {
        a(i / 4, i % 4) = {rng.normal(), rng.normal()};
    }
    Eigen::HouseholderQR<CMatrix> qr(a);
    return GateMatrix(CMatrix(qr.householderQ()));
}

TEST(StateVector, StartsInZeroState) {
    const StateVector s(3);
    EXPECT_EQ(s.dim(), 8U);
    EXPECT_EQ(s[0], cplx(1.0, 0.0));
    EXPECT_DOUBLE_EQ(s.norm_squared(), 1.0);
}

TEST(StateVector, RejectsUnnormalizedAmplitudes) {
    EXPECT_THROW(StateVector(1, {1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(StateVector(2, {1.0, 0.0}), std::invalid_argument);
    EXPECT_NO_THROW((void)StateVector::normalized(1, {1.0, 1.0}));
    EXPECT_THROW((void)StateVector(0), std::invalid_argument);
}

TEST(Gates, PauliXFlipsZero) {
    StateVector s(2);
    apply_gate(s, gates::X(), {1});
    EXPECT_NEAR(std::abs(s[2] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s[0]), 0.0, 1e-15);
}

TEST(Gates, ControlledTPhasesOnlyOneOne) {
    const double phase = std::numbers::pi / 4.0;
    for (std::size_t x = 0; x < 4; ++x) {
        StateVector s = StateVector::basis(2, x);
        apply_gate(s, gates::CT(), {1, 0});
        const cplx expected = x == 3 ? std::polar(1.0, phase) : cplx{1.0, 0.0};
        EXPECT_NEAR(std::abs(s[x] - expected), 0.0, 1e-15) << "x=" << x;
    }
}

TEST(Gates, ControlledXFlipsFirstTargetWhenSecondSet) {
    // targets {0, 1}: qubit 1 controls qubit 0.
    StateVector s = StateVector::basis(2, 0b10);
    apply_gate(s, gates::CX(), {0, 1});
    EXPECT_NEAR(std::abs(s[0b11] - 1.0), 0.0, 1e-15);
    StateVector t = StateVector::basis(2, 0b01);
    apply_gate(t, gates::CX(), {0, 1});
    EXPECT_NEAR(std::abs(t[0b01] - 1.0), 0.0, 1e-15);
}

TEST(Gates, NonUnitaryRejectedUnlessSkipped) {
    CMatrix m = CMatrix::Identity(2, 2);
    m(0, 0) = 2.0;
    const GateMatrix g(m);
    EXPECT_FALSE(g.unitary());
    StateVector s(1);
    EXPECT_THROW(apply_gate(s, g, {0}), std::invalid_argument);
}

TEST(Gates, KernelMatchesKroneckerOracle) {
    const std::size_t n = 5;
    for (std::size_t q = 0; q + 1 < n; ++q) {
        const GateMatrix u = random_unitary_2q(100 + q);
        StateVector s = random_state(n, 7 + q);
        const CVector expected = embed_adjacent(u, n, q) * as_vector(s);
        apply_gate(s, u, {q + 1, q});
        EXPECT_LT((as_vector(s) - expected).norm(), 1e-12) << "q=" << q;
    }
    const GateMatrix ry = gates::RY(0.37);
    StateVector s = random_state(n, 3);
    const CVector expected = embed_adjacent(ry, n, 2) * as_vector(s);
    apply_gate(s, ry, {2});
    EXPECT_LT((as_vector(s) - expected).norm(), 1e-12);
}

TEST(Gates, DiagonalKernelMatchesDenseKernel) {
    CMatrix d = gates::CT().matrix();
    d(3, 2) = 1e-300; // forces the dense path on a numerically identical gate
    const GateMatrix dense(d);
    ASSERT_FALSE(dense.diagonal());
    StateVector a = random_state(4, 11);
    StateVector b = a;
    apply_gate(a, gates::CT(), {3, 1});
    apply_gate(b, dense, {3, 1}, UnitaryCheck::Skip);
    EXPECT_LT((as_vector(a) - as_vector(b)).norm(), 1e-14);
}

TEST(Gates, UnitariesPreserveNorm) {
    StateVector s(6);
    const auto tpl = sample_template(6, 6, 0.4, 5);
    apply_template(s, tpl);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
}

TEST(DensityMatrix, GateRouteMatchesStateVectorRoute) {
    const std::size_t n = 5;
    const auto tpl = sample_template(n, 4, 0.5, 21);
    StateVector psi = random_state(n, 4);
    DensityMatrix rho = DensityMatrix::from_pure(psi);
    apply_template(psi, tpl);
    apply_template(rho, tpl);
    const CMatrix expected = DensityMatrix::from_pure(psi).matrix();
    EXPECT_LT((rho.matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
    EXPECT_NEAR(rho.purity(), 1.0, 1e-12);
    EXPECT_NO_THROW(rho.validate());
}

TEST(DensityMatrix, MaximallyMixedPurity) {
    const auto rho = DensityMatrix::maximally_mixed(3);
    EXPECT_NEAR(rho.purity(), 1.0 / 8.0, 1e-15);
}

TEST(PartialTrace, BellStateHalfIsMaximallyMixed) {
    StateVector s(2);
    apply_gate(s, gates::H(), {1});
    apply_gate(s, gates::CX(), {0, 1});
    const auto rho = partial_trace(s, {0});
    EXPECT_LT((rho.matrix() - CMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-15);
    const auto rho1 = partial_trace(DensityMatrix::from_pure(s), {1});
    EXPECT_LT((rho1.matrix() - CMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PartialTrace, ProductStateFactorizes) {
    const StateVector a = random_state(2, 1);
    const StateVector b = random_state(3, 2);
    const StateVector ab = a.tensor(b); // a on qubits 0-1, b on 2-4
    const auto ra = partial_trace(ab, {0, 1});
    const auto rb = partial_trace(ab, {2, 3, 4});
    EXPECT_LT((ra.matrix() - DensityMatrix::from_pure(a).matrix()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((rb.matrix() - DensityMatrix::from_pure(b).matrix()).cwiseAbs().maxCoeff(), 1e-13);

    const auto mixed = DensityMatrix::from_pure(a).tensor(DensityMatrix::maximally_mixed(2));
    const auto back = partial_trace(mixed, {0, 1});
    EXPECT_LT((back.matrix() - DensityMatrix::from_pure(a).matrix()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(PartialTrace, StateVectorAndDensityRoutesAgree) {
    const StateVector s = random_state(6, 9);
    const auto a = partial_trace(s, {1, 3, 4});
    const auto b = partial_trace(DensityMatrix::from_pure(s), {1, 3, 4});
    EXPECT_LT((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(PartialTrace, RejectsBadKeepSets) {
    const StateVector s(3);
    EXPECT_THROW((void)partial_trace(s, {0, 0}), std::invalid_argument);
    EXPECT_THROW((void)partial_trace(s, {5}), std::out_of_range);
    EXPECT_THROW((void)partial_trace(s, {0, 1, 2}), std::invalid_argument);
}

TEST(PartialTrace, SchmidtDualityOfPureStates) {
    const StateVector s = random_state(7, 12);
    const RVector la = eigvalsh(partial_trace(s, {0, 1, 2}).matrix());
    const RVector lb = eigvalsh(partial_trace(s, {3, 4, 5, 6}).matrix());
    // Nonzero spectra coincide; the larger side carries extra zeros.
    for (Eigen::Index i = 0; i < la.size(); ++i) {
        EXPECT_NEAR(la(la.size() - 1 - i), lb(lb.size() - 1 - i), 1e-12);
    }
    for (Eigen::Index i = 0; i < lb.size() - la.size(); ++i) {
        EXPECT_NEAR(lb(i), 0.0, 1e-12);
    }
}

TEST(Eigh, ReconstructsHermitianMatrix) {
    Rng rng(5);
    CMatrix a(12, 12);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a(i) = {rng.normal(), rng.normal()};
    }
    const CMatrix h = a + a.adjoint();
    const auto es = eigh(h);
    const CMatrix back = es.vectors * es.values.cast<cplx>().asDiagonal() * es.vectors.adjoint();
    EXPECT_LT((back - h).cwiseAbs().maxCoeff(), 1e-11);
    for (Eigen::Index i = 1; i < es.values.size(); ++i) {
        EXPECT_LE(es.values(i - 1), es.values(i));
    }
    EXPECT_THROW((void)eigh(a), std::invalid_argument);
}

// A stabilizer reduced state on which the plain tridiagonal QR iteration
// stalls; the reflector retry must still produce an exact decomposition.
TEST(Eigh, FallbackRoutesMatchDirect) {
    Rng rng(91);
    CMatrix a(32, 32);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a.data()[i] = cplx{rng.normal(), rng.normal()};
    }
    a = (a + a.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> direct(a);
    ASSERT_EQ(direct.info(), Eigen::Success);
    const auto shifted = detail::solve_shifted(a, true);
    ASSERT_TRUE(shifted.has_value());
    const auto jacobi = detail::solve_jacobi(a, true);
    for (const auto *es : {&*shifted, &jacobi}) {
        EXPECT_LT((direct.eigenvalues() - es->values).cwiseAbs().maxCoeff(), 1e-10);
        const CMatrix back = es->vectors * es->values.cast<cplx>().asDiagonal() * es->vectors.adjoint();
        EXPECT_LT((back - a).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_LT((detail::solve_jacobi(a, false).values - jacobi.values).cwiseAbs().maxCoeff(), 1e-12);
}

// Stabilizer reductions with many exact zeros. The direct and shifted
// solvers can stall on some of them, depending on the floating-point code
// generation; eigh and the Jacobi route must return the flat spectrum.
TEST(Eigh, StabilizerReductionsAlwaysSolve) {
    const std::size_t n = 12;
    const Cut cut = make_cut(n);
    std::size_t stalls = 0;
    for (std::uint64_t k = 0; k < 30; ++k) {
        const auto tpl = sample_template(n, 6, 0.0, child_seed(3, {k}));
        StateVector psi(n);
        apply_template(psi, tpl, [&](std::size_t, const StateVector &s) {
            const CMatrix m = partial_trace(s, cut.memory).matrix();
            Eigen::SelfAdjointEigenSolver<CMatrix> direct(m);
            stalls += direct.info() != Eigen::Success;
            for (const auto &es : {eigh(m), detail::solve_jacobi(m, true)}) {
                const CMatrix back = es.vectors * es.values.cast<cplx>().asDiagonal() * es.vectors.adjoint();
                ASSERT_LT((back - m).cwiseAbs().maxCoeff(), 1e-10);
                ASSERT_TRUE(std::is_sorted(es.values.begin(), es.values.end()));
                const double top = es.values.maxCoeff();
                for (Eigen::Index i = 0; i < es.values.size(); ++i) {
                    const double l = es.values(i);
                    ASSERT_TRUE(std::abs(l) < 1e-10 || std::abs(l - top) < 1e-10) << l;
                }
            }
        });
    }
    RecordProperty("direct_solver_stalls", static_cast<int>(stalls));
}

TEST(TraceDistance, KnownValues) {
    const DensityMatrix zero(1);
    const DensityMatrix one = DensityMatrix::from_pure(StateVector::basis(1, 1));
    EXPECT_NEAR(trace_distance(zero, one), 1.0, 1e-15);
    EXPECT_NEAR(trace_distance(zero, zero), 0.0, 1e-15);
    EXPECT_NEAR(trace_distance(zero, DensityMatrix::maximally_mixed(1)), 0.5, 1e-15);
    // Pure states: sqrt(1 - |<a|b>|^2).
    const StateVector a = random_state(3, 1);
    const StateVector b = random_state(3, 2);
    cplx overlap = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        overlap += std::conj(a[i]) * b[i];
    }
    EXPECT_NEAR(trace_distance(DensityMatrix::from_pure(a), DensityMatrix::from_pure(b)),
                std::sqrt(1.0 - std::norm(overlap)), 1e-12);
}

TEST(TraceDistance, InvariantUnderUnitaries) {
    const std::size_t n = 4;
    auto a = DensityMatrix::from_pure(random_state(n, 3));
    auto b = DensityMatrix::from_pure(random_state(n, 4));
    const double before = trace_distance(a, b);
    const auto tpl = sample_template(n, 3, 0.5, 8);
    apply_template(a, tpl);
    apply_template(b, tpl);
    EXPECT_NEAR(trace_distance(a, b), before, 1e-12);
}

} // namespace
