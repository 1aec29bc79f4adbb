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
 * Brickwork circuit realizations: the two-qubit Clifford table, per-slot
 * CT/Clifford sampling, input-encoding rotations and template application.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <utility>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "pqrc/qcore.hpp"
#include "pqrc/rng.hpp"

namespace pqrc {

namespace gates {

inline GateMatrix I() { return GateMatrix(CMatrix::Identity(2, 2)); }

inline GateMatrix X() {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return GateMatrix(m);
}

inline GateMatrix Y() {
    CMatrix m(2, 2);
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return GateMatrix(m);
}

inline GateMatrix Z() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return GateMatrix(m);
}

inline GateMatrix H() {
    const double s = std::numbers::sqrt2 / 2.0;
    CMatrix m(2, 2);
    m << s, s, s, -s;
    return GateMatrix(m);
}

inline GateMatrix S() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, cplx(0.0, 1.0);
    return GateMatrix(m);
}

inline GateMatrix T() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4.0);
    return GateMatrix(m);
}

/// exp(-i Y theta / 2).
inline GateMatrix RY(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    CMatrix m(2, 2);
    m << c, -s, s, c;
    return GateMatrix(m);
}

/// I (x) |0><0| + X (x) |1><1|: flips the first target when the second is 1.
inline GateMatrix CX() {
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = 1.0;
    m(2, 2) = 1.0;
    m(1, 3) = 1.0;
    m(3, 1) = 1.0;
    return GateMatrix(m);
}

/// I (x) |0><0| + T (x) |1><1| = diag(1, 1, 1, e^{i pi/4}).
inline GateMatrix CT() {
    CMatrix m = CMatrix::Identity(4, 4);
    m(3, 3) = std::polar(1.0, std::numbers::pi / 4.0);
    return GateMatrix(m);
}

inline GateMatrix SWAP() {
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = 1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 3) = 1.0;
    return GateMatrix(m);
}

/// a (x) b with a acting on the first (most significant) target.
inline GateMatrix kron(const GateMatrix &a, const GateMatrix &b) {
    return GateMatrix(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

} // namespace gates

inline constexpr std::size_t kTwoQubitCliffordCount = 11520;

/// The two-qubit Clifford group modulo global phase, in breadth-first order
/// from the identity (index 0).
class CliffordTable {
  public:
    explicit CliffordTable(std::vector<GateMatrix> elements)
        : elements_(std::move(elements)) {}

    [[nodiscard]] std::size_t size() const noexcept { return elements_.size(); }
    [[nodiscard]] const GateMatrix &operator[](std::size_t i) const {
        return elements_.at(i);
    }
    [[nodiscard]] const std::vector<GateMatrix> &elements() const noexcept {
        return elements_;
    }

    /// Index of `u` up to global phase, or size() if absent.
    [[nodiscard]] std::size_t find(const CMatrix &u) const;

    /// Built on first use and shared read-only afterwards.
    [[nodiscard]] static const CliffordTable &instance();

    using Key = std::array<std::int64_t, 32>;

    /// Rotates the first nonzero entry (row-major) onto the positive real
    /// axis, then rounds to a 1e-6 grid.
    [[nodiscard]] static Key canonical_key(const CMatrix &u) {
        cplx phase{1.0, 0.0};
        for (Eigen::Index k = 0; k < 16; ++k) {
            const cplx z = u(k / 4, k % 4);
            if (std::abs(z) > 1e-9) {
                phase = std::conj(z) / std::abs(z);
                break;
            }
        }
        Key key{};
        std::size_t k = 0;
        for (Eigen::Index r = 0; r < 4; ++r) {
            for (Eigen::Index c = 0; c < 4; ++c) {
                const cplx z = u(r, c) * phase;
                key[k++] = std::llround(z.real() * 1e6);
                key[k++] = std::llround(z.imag() * 1e6);
            }
        }
        return key;
    }

  private:
    std::vector<GateMatrix> elements_;
    std::map<Key, std::size_t> index_;
    friend CliffordTable build_clifford_table();
};

/// Breadth-first closure of {H(x)I, I(x)H, S(x)I, I(x)S, CX(0->1), CX(1->0)}.
[[nodiscard]] inline CliffordTable build_clifford_table() {
    using gates::kron;
    const GateMatrix id = gates::I();
    const std::array<CMatrix, 6> generators = {
        kron(gates::H(), id).matrix(),
        kron(id, gates::H()).matrix(),
        kron(gates::S(), id).matrix(),
        kron(id, gates::S()).matrix(),
        gates::CX().matrix(),
        (gates::SWAP().matrix() * gates::CX().matrix() *
         gates::SWAP().matrix())
            .eval(),
    };

    std::vector<CMatrix> found;
    std::map<CliffordTable::Key, std::size_t> index;
    std::queue<std::size_t> frontier;

    const CMatrix identity = CMatrix::Identity(4, 4);
    index.emplace(CliffordTable::canonical_key(identity), 0);
    found.push_back(identity);
    frontier.push(0);

    while (!frontier.empty()) {
        const std::size_t i = frontier.front();
        frontier.pop();
        for (const auto &g : generators) {
            CMatrix next = g * found[i];
            auto [it, inserted] = index.emplace(
                CliffordTable::canonical_key(next), found.size());
            if (inserted) {
                found.push_back(std::move(next));
                frontier.push(found.size() - 1);
                if (found.size() > kTwoQubitCliffordCount) {
                    throw std::logic_error(
                        "build_clifford_table: closure exceeded 11520 elements; "
                        "phase canonicalization is broken");
                }
            }
        }
    }
    if (found.size() != kTwoQubitCliffordCount) {
        throw std::logic_error(
            "build_clifford_table: closure has wrong size");
    }

    std::vector<GateMatrix> elements;
    elements.reserve(found.size());
    for (auto &m : found) {
        elements.emplace_back(std::move(m));
    }
    CliffordTable table(std::move(elements));
    table.index_ = std::move(index);
    return table;
}

inline std::size_t CliffordTable::find(const CMatrix &u) const {
    if (u.rows() != 4 || u.cols() != 4) {
        return size();
    }
    const auto it = index_.find(canonical_key(u));
    return it == index_.end() ? size() : it->second;
}

inline const CliffordTable &CliffordTable::instance() {
    static const CliffordTable table = build_clifford_table();
    return table;
}

struct GateChoice {
    enum class Kind : std::uint8_t { ControlledT, Clifford };

    Kind kind = Kind::Clifford;
    std::uint16_t clifford_index = 0;

    [[nodiscard]] static GateChoice controlled_t() {
        return {Kind::ControlledT, 0};
    }
    [[nodiscard]] static GateChoice clifford(std::size_t index) {
        if (index >= kTwoQubitCliffordCount) {
            throw std::out_of_range("GateChoice: Clifford index >= 11520");
        }
        return {Kind::Clifford, static_cast<std::uint16_t>(index)};
    }
    [[nodiscard]] bool is_ct() const noexcept {
        return kind == Kind::ControlledT;
    }

    friend bool operator==(const GateChoice &, const GateChoice &) = default;
};

struct Slot {
    std::size_t layer = 0;
    Qubit first = 0;
    Qubit second = 0;
    GateChoice choice;

    friend bool operator==(const Slot &, const Slot &) = default;
};

/// Nearest-neighbour pairs of brickwork sublayer `layer` with open
/// boundaries: (2i, 2i+1) on even layers, (2i+1, 2i+2) on odd layers.
[[nodiscard]] inline std::vector<std::pair<Qubit, Qubit>>
brickwork_pairs(std::size_t n_qubits, std::size_t layer) {
    std::vector<std::pair<Qubit, Qubit>> pairs;
    for (Qubit a = layer % 2; a + 1 < n_qubits; a += 2) {
        pairs.emplace_back(a, a + 1);
    }
    return pairs;
}

/// One realized brickwork circuit. `depth` counts brick periods, each an
/// even sublayer followed by an odd one, so a period holds N - 1 gates and
/// the slot count is V = (N - 1) d. Slot::layer indexes sublayers.
struct CircuitTemplate {
    std::size_t n_qubits = 0;
    std::size_t depth = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::vector<Slot> slots; ///< ordered by sublayer

    [[nodiscard]] std::size_t sublayer_count() const noexcept { return 2 * depth; }
    [[nodiscard]] std::size_t slot_count() const noexcept { return slots.size(); }
    [[nodiscard]] std::size_t ct_count() const noexcept {
        std::size_t n = 0;
        for (const auto &s : slots) {
            n += s.choice.is_ct() ? 1 : 0;
        }
        return n;
    }
};

/// Each slot is independently CT with probability p, else a uniform
/// element of the Clifford table.
[[nodiscard]] inline CircuitTemplate sample_template(std::size_t n_qubits,
                                                     std::size_t depth,
                                                     double p,
                                                     std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("sample_template: p outside [0, 1]");
    }
    if (n_qubits < 2) {
        throw std::invalid_argument("sample_template: need at least 2 qubits");
    }
    CircuitTemplate tpl;
    tpl.n_qubits = n_qubits;
    tpl.depth = depth;
    tpl.p = p;
    tpl.seed = seed;
    Rng rng(seed);
    for (std::size_t layer = 0; layer < 2 * depth; ++layer) {
        for (const auto &[a, b] : brickwork_pairs(n_qubits, layer)) {
            const bool ct = rng.bernoulli(p);
            const GateChoice choice =
                ct ? GateChoice::controlled_t()
                   : GateChoice::clifford(rng.index(kTwoQubitCliffordCount));
            tpl.slots.push_back({layer, a, b, choice});
        }
    }
    return tpl;
}

[[nodiscard]] inline const GateMatrix &gate_for(const GateChoice &choice) {
    static const GateMatrix ct = gates::CT();
    return choice.is_ct() ? ct : CliffordTable::instance()[choice.clifford_index];
}

struct PlacedGate {
    GateMatrix gate;
    std::vector<Qubit> targets;
};

/// R^Y(theta) on every memory qubit.
[[nodiscard]] inline std::vector<PlacedGate>
encoding_layer(double theta, std::span<const Qubit> memory_qubits) {
    std::vector<PlacedGate> out;
    out.reserve(memory_qubits.size());
    const GateMatrix ry = gates::RY(theta);
    for (const auto q : memory_qubits) {
        out.push_back({ry, {q}});
    }
    return out;
}

template <class State>
void apply_placed(State &state, std::span<const PlacedGate> placed) {
    for (const auto &g : placed) {
        apply_gate(state, g.gate, g.targets);
    }
}

/// Called after each completed sublayer with (sublayers_done, state).
template <class State>
using LayerCallback = std::function<void(std::size_t, const State &)>;

/// Applies all layers in order. Works for StateVector and DensityMatrix.
template <class State>
void apply_template(State &state, const CircuitTemplate &tpl,
                    const std::type_identity_t<LayerCallback<State>> &on_layer = {}) {
    if (state.n_qubits() != tpl.n_qubits) {
        throw std::invalid_argument(
            "apply_template: state and template qubit counts differ");
    }
    std::size_t next = 0;
    for (std::size_t layer = 0; layer < tpl.sublayer_count(); ++layer) {
        for (; next < tpl.slots.size() && tpl.slots[next].layer == layer;
             ++next) {
            const auto &s = tpl.slots[next];
            const Qubit targets[2] = {s.first, s.second};
            apply_gate(state, gate_for(s.choice), targets, UnitaryCheck::Skip);
        }
        if (on_layer) {
            on_layer(layer + 1, state);
        }
    }
}

/// Structured-text record. Seed and parameters regenerate the template;
/// the slot list is included for audit when requested.
[[nodiscard]] inline nlohmann::json template_to_json(const CircuitTemplate &tpl,
                                                     bool include_slots = false) {
    nlohmann::json j = {{"n_qubits", tpl.n_qubits},
                        {"depth", tpl.depth},
                        {"p", tpl.p},
                        {"seed", tpl.seed},
                        {"slot_count", tpl.slot_count()},
                        {"ct_count", tpl.ct_count()}};
    if (include_slots) {
        nlohmann::json slots = nlohmann::json::array();
        for (const auto &s : tpl.slots) {
            const int code =
                s.choice.is_ct() ? -1 : static_cast<int>(s.choice.clifford_index);
            slots.push_back({s.layer, s.first, s.second, code});
        }
        j["slots"] = std::move(slots);
    }
    return j;
}

[[nodiscard]] inline CircuitTemplate template_from_json(const nlohmann::json &j) {
    CircuitTemplate tpl = sample_template(
        j.at("n_qubits").get<std::size_t>(), j.at("depth").get<std::size_t>(),
        j.at("p").get<double>(), j.at("seed").get<std::uint64_t>());
    if (j.contains("slots")) {
        const auto &slots = j.at("slots");
        bool same = slots.size() == tpl.slots.size();
        for (std::size_t i = 0; same && i < tpl.slots.size(); ++i) {
            const auto &s = tpl.slots[i];
            const int code = s.choice.is_ct()
                                 ? -1
                                 : static_cast<int>(s.choice.clifford_index);
            same = slots[i].at(0).get<std::size_t>() == s.layer &&
                   slots[i].at(1).get<std::size_t>() == s.first &&
                   slots[i].at(2).get<std::size_t>() == s.second &&
                   slots[i].at(3).get<int>() == code;
        }
        if (!same) {
            throw std::runtime_error(
                "template_from_json: recorded slots do not match the seed");
        }
    }
    return tpl;
}

} // namespace pqrc
