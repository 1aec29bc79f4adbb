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
 * Temporal-learning pipeline: the encode / evolve / measure / reset channel,
 * diagonal-observable features, ridge readout, delay-memory and NARMA tasks
 * and trace-distance contractivity.
 *
 * The channel is
 *   rho_{n+1} = Tr_R(U_n rho_n U_n^dagger) (x) |0><0|_R,
 *   U_n = U_res (x)_{j in M} R^Y_j(theta_n).
 * Because the readout register is reset every step, the state always has
 * the form sigma (x) |0><0|_R. ReservoirChannel exploits this: it compiles
 * the fixed template into the isometry W = U_res restricted to
 * |.>_M |0>_R, so one step costs two GEMMs on a 2^N x 2^|M| matrix instead
 * of O(4^N) gate updates on the full density matrix. step() keeps the
 * full-density-matrix route for reference.
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqrc/circuit.hpp"
#include "pqrc/magic.hpp"
#include "pqrc/qcore.hpp"
#include "pqrc/rng.hpp"
#include "pqrc/spectra.hpp"

namespace pqrc {

struct ReservoirConfig {
    std::size_t n_qubits = 0;
    std::size_t depth = 0;
    double p = 0.0;
    std::vector<Qubit> memory;
    std::vector<Qubit> readout;
    std::uint64_t template_seed = 0;
    double input_scale = 1e-3;
    std::size_t washout = 500;
    std::size_t steps = 2000;
    double ridge_lambda = 1e-8;
    double train_fraction = 0.7;
    /// Measure Z and ZZ on every qubit instead of the readout register only.
    bool all_qubit_observables = false;

    /// Memory = first `memory_size` qubits (default N/2), readout = the rest.
    [[nodiscard]] static ReservoirConfig standard(std::size_t n_qubits, std::size_t depth,
                                                  double p, std::uint64_t template_seed,
                                                  std::optional<std::size_t> memory_size = {}) {
        ReservoirConfig cfg;
        cfg.n_qubits = n_qubits;
        cfg.depth = depth;
        cfg.p = p;
        cfg.template_seed = template_seed;
        const Cut cut = make_cut(n_qubits, memory_size.value_or(n_qubits / 2));
        cfg.memory = cut.memory;
        cfg.readout = cut.readout;
        return cfg;
    }

    void validate() const {
        if (n_qubits < 2) {
            throw std::invalid_argument("ReservoirConfig: need at least 2 qubits");
        }
        if (memory.empty() || readout.empty() || memory.size() + readout.size() != n_qubits) {
            throw std::invalid_argument("ReservoirConfig: memory and readout must partition the qubits");
        }
        std::vector<bool> seen(n_qubits, false);
        for (const auto q : memory) {
            if (q >= n_qubits || seen[q]) {
                throw std::invalid_argument("ReservoirConfig: bad memory qubit");
            }
            seen[q] = true;
        }
        for (const auto q : readout) {
            if (q >= n_qubits || seen[q]) {
                throw std::invalid_argument("ReservoirConfig: memory and readout overlap");
            }
            seen[q] = true;
        }
        if (washout >= steps) {
            throw std::invalid_argument("ReservoirConfig: washout must be smaller than steps");
        }
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
            throw std::invalid_argument("ReservoirConfig: train_fraction outside (0, 1)");
        }
        if (ridge_lambda < 0.0) {
            throw std::invalid_argument("ReservoirConfig: negative ridge_lambda");
        }
    }
};

/// Z-string observable on the full register.
struct ZObservable {
    std::size_t mask = 0;
    std::string name;
};

[[nodiscard]] inline std::vector<ZObservable> feature_observables(const ReservoirConfig &cfg) {
    std::vector<Qubit> qubits = cfg.readout;
    if (cfg.all_qubit_observables) {
        qubits.resize(cfg.n_qubits);
        for (Qubit q = 0; q < cfg.n_qubits; ++q) {
            qubits[q] = q;
        }
    }
    std::sort(qubits.begin(), qubits.end());
    std::vector<ZObservable> out;
    for (const auto q : qubits) {
        out.push_back({std::size_t{1} << q, "Z" + std::to_string(q)});
    }
    for (std::size_t a = 0; a < qubits.size(); ++a) {
        for (std::size_t b = a + 1; b < qubits.size(); ++b) {
            out.push_back({(std::size_t{1} << qubits[a]) | (std::size_t{1} << qubits[b]),
                           "Z" + std::to_string(qubits[a]) + "Z" + std::to_string(qubits[b])});
        }
    }
    return out;
}

/// <Z_mask> from computational-basis probabilities indexed by full-register index.
[[nodiscard]] inline double z_expectation(std::span<const double> probs, std::size_t mask) {
    double acc = 0.0;
    for (std::size_t x = 0; x < probs.size(); ++x) {
        acc += (std::popcount(x & mask) % 2 == 0) ? probs[x] : -probs[x];
    }
    return acc;
}

inline constexpr double kTraceDriftTolerance = 1e-8;

struct StepResult {
    DensityMatrix next;
    std::vector<double> features;
};

/// One channel step on the full density matrix. Features are read from
/// U rho U^dagger before the reset.
[[nodiscard]] inline StepResult step(const DensityMatrix &rho, double theta,
                                     const ReservoirConfig &cfg, const CircuitTemplate &tpl) {
    cfg.validate();
    if (rho.n_qubits() != cfg.n_qubits) {
        throw std::invalid_argument("step: state and config qubit counts differ");
    }
    DensityMatrix evolved = rho;
    const auto enc = encoding_layer(theta, cfg.memory);
    apply_placed(evolved, std::span<const PlacedGate>(enc));
    apply_template(evolved, tpl);

    std::vector<double> probs(evolved.dim());
    for (std::size_t x = 0; x < probs.size(); ++x) {
        const auto i = static_cast<Eigen::Index>(x);
        probs[x] = evolved.matrix()(i, i).real();
    }
    std::vector<double> features;
    for (const auto &obs : feature_observables(cfg)) {
        features.push_back(z_expectation(probs, obs.mask));
    }

    const DensityMatrix sigma = partial_trace(evolved, cfg.memory);
    if (std::abs(sigma.trace() - 1.0) > kTraceDriftTolerance) {
        throw std::runtime_error("step: trace drift");
    }
    std::vector<Qubit> mem_sorted = cfg.memory;
    std::sort(mem_sorted.begin(), mem_sorted.end());
    const auto mem_off = detail::subset_offsets(mem_sorted);
    CMatrix next = CMatrix::Zero(evolved.matrix().rows(), evolved.matrix().cols());
    for (std::size_t c = 0; c < mem_off.size(); ++c) {
        for (std::size_t r = 0; r < mem_off.size(); ++r) {
            next(static_cast<Eigen::Index>(mem_off[r]), static_cast<Eigen::Index>(mem_off[c])) =
                sigma.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return {DensityMatrix(cfg.n_qubits, std::move(next)), std::move(features)};
}

/// The reservoir channel compiled for one template, acting on the memory
/// register state sigma (2^|M| x 2^|M|, memory qubits in ascending order).
class ReservoirChannel {
  public:
    ReservoirChannel(const ReservoirConfig &cfg, const CircuitTemplate &tpl)
        : cfg_(cfg), observables_(feature_observables(cfg)) {
        cfg_.validate();
        if (tpl.n_qubits != cfg_.n_qubits) {
            throw std::invalid_argument("ReservoirChannel: template qubit count differs");
        }
        std::sort(cfg_.memory.begin(), cfg_.memory.end());
        std::sort(cfg_.readout.begin(), cfg_.readout.end());
        const auto mem_off = detail::subset_offsets(cfg_.memory);
        const auto rd_off = detail::subset_offsets(cfg_.readout);
        dm_ = static_cast<Eigen::Index>(mem_off.size());
        dr_ = static_cast<Eigen::Index>(rd_off.size());

        // Row m + dm * r of W <-> full index mem_off[m] | rd_off[r].
        std::vector<std::size_t> full_index(static_cast<std::size_t>(dm_ * dr_));
        for (Eigen::Index r = 0; r < dr_; ++r) {
            for (Eigen::Index m = 0; m < dm_; ++m) {
                full_index[static_cast<std::size_t>(m + dm_ * r)] =
                    mem_off[static_cast<std::size_t>(m)] | rd_off[static_cast<std::size_t>(r)];
            }
        }
        isometry_.resize(dm_ * dr_, dm_);
        for (Eigen::Index a = 0; a < dm_; ++a) {
            StateVector psi = StateVector::basis(cfg_.n_qubits, mem_off[static_cast<std::size_t>(a)]);
            apply_template(psi, tpl);
            for (Eigen::Index row = 0; row < dm_ * dr_; ++row) {
                isometry_(row, a) = psi[full_index[static_cast<std::size_t>(row)]];
            }
        }
        signs_.resize(dm_ * dr_, static_cast<Eigen::Index>(observables_.size()));
        for (Eigen::Index row = 0; row < dm_ * dr_; ++row) {
            for (std::size_t k = 0; k < observables_.size(); ++k) {
                const auto x = full_index[static_cast<std::size_t>(row)];
                signs_(row, static_cast<Eigen::Index>(k)) =
                    std::popcount(x & observables_[k].mask) % 2 == 0 ? 1.0 : -1.0;
            }
        }
    }

    [[nodiscard]] const ReservoirConfig &config() const noexcept { return cfg_; }
    [[nodiscard]] std::size_t feature_count() const noexcept { return observables_.size(); }
    [[nodiscard]] const std::vector<ZObservable> &observables() const noexcept { return observables_; }
    [[nodiscard]] const CMatrix &isometry() const noexcept { return isometry_; }

    /// |0...0><0...0| on the memory register.
    [[nodiscard]] CMatrix initial_memory_state() const {
        CMatrix sigma = CMatrix::Zero(dm_, dm_);
        sigma(0, 0) = 1.0;
        return sigma;
    }

    /// (x)_{j in M} R^Y(theta) in the memory basis.
    [[nodiscard]] RMatrix encoding_matrix(double theta) const {
        const double c = std::cos(theta / 2.0);
        const double s = std::sin(theta / 2.0);
        const double ry[2][2] = {{c, -s}, {s, c}};
        RMatrix e(dm_, dm_);
        for (Eigen::Index out = 0; out < dm_; ++out) {
            for (Eigen::Index in = 0; in < dm_; ++in) {
                double v = 1.0;
                for (std::size_t k = 0; k < cfg_.memory.size(); ++k) {
                    v *= ry[(out >> k) & 1][(in >> k) & 1];
                }
                e(out, in) = v;
            }
        }
        return e;
    }

    /// Advances sigma in place and writes the pre-reset features.
    void step(CMatrix &sigma, double theta, std::span<double> features) {
        if (features.size() != observables_.size()) {
            throw std::invalid_argument("ReservoirChannel::step: feature buffer size");
        }
        const CMatrix enc = encoding_matrix(theta).cast<cplx>();
        rotated_.noalias() = enc * sigma;
        encoded_.noalias() = rotated_ * enc.transpose();
        applied_.noalias() = isometry_ * encoded_;

        probs_ = (applied_.cwiseProduct(isometry_.conjugate())).rowwise().sum().real();
        Eigen::Map<RVector> out(features.data(), static_cast<Eigen::Index>(features.size()));
        out.noalias() = signs_.transpose() * probs_;

        // sigma' = sum_r B_r W_r^dagger, one GEMM over the (r, b) columns.
        const Eigen::Map<const CMatrix> b_flat(applied_.data(), dm_, dr_ * dm_);
        const Eigen::Map<const CMatrix> w_flat(isometry_.data(), dm_, dr_ * dm_);
        sigma.noalias() = b_flat * w_flat.adjoint();
        sigma = (0.5 * (sigma + sigma.adjoint())).eval();
        if (std::abs(sigma.trace().real() - 1.0) > kTraceDriftTolerance) {
            throw std::runtime_error("ReservoirChannel::step: trace drift");
        }
    }

    /// sigma (x) |0><0|_R on the full register.
    [[nodiscard]] DensityMatrix full_state(const CMatrix &sigma) const {
        const auto mem_off = detail::subset_offsets(cfg_.memory);
        const auto dim = static_cast<Eigen::Index>(std::size_t{1} << cfg_.n_qubits);
        CMatrix full = CMatrix::Zero(dim, dim);
        for (Eigen::Index c = 0; c < dm_; ++c) {
            for (Eigen::Index r = 0; r < dm_; ++r) {
                full(static_cast<Eigen::Index>(mem_off[static_cast<std::size_t>(r)]),
                     static_cast<Eigen::Index>(mem_off[static_cast<std::size_t>(c)])) = sigma(r, c);
            }
        }
        return DensityMatrix(cfg_.n_qubits, std::move(full));
    }

  private:
    ReservoirConfig cfg_;
    std::vector<ZObservable> observables_;
    Eigen::Index dm_ = 0;
    Eigen::Index dr_ = 0;
    CMatrix isometry_;
    RMatrix signs_;
    CMatrix rotated_;
    CMatrix encoded_;
    CMatrix applied_;
    RVector probs_;
};

/// Post-washout feature rows; the last column is the constant bias.
struct FeatureMatrix {
    RMatrix values;
    std::vector<std::string> names;
    std::size_t first_step = 0;

    [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
    [[nodiscard]] std::size_t observable_count() const noexcept {
        return static_cast<std::size_t>(values.cols()) - 1;
    }
};

/// Runs the channel from |0...0> over `inputs` (already-scaled angles).
[[nodiscard]] inline FeatureMatrix run_sequence(const ReservoirConfig &cfg, const CircuitTemplate &tpl,
                                                std::span<const double> inputs) {
    cfg.validate();
    if (inputs.size() != cfg.steps) {
        throw std::invalid_argument("run_sequence: input length must equal steps");
    }
    ReservoirChannel channel(cfg, tpl);
    const auto k = channel.feature_count();
    FeatureMatrix fm;
    fm.first_step = cfg.washout;
    fm.values.resize(static_cast<Eigen::Index>(cfg.steps - cfg.washout), static_cast<Eigen::Index>(k + 1));
    for (const auto &obs : channel.observables()) {
        fm.names.push_back(obs.name);
    }
    fm.names.emplace_back("bias");

    CMatrix sigma = channel.initial_memory_state();
    std::vector<double> features(k);
    for (std::size_t n = 0; n < cfg.steps; ++n) {
        channel.step(sigma, inputs[n], features);
        if (n >= cfg.washout) {
            const auto row = static_cast<Eigen::Index>(n - cfg.washout);
            for (std::size_t j = 0; j < k; ++j) {
                fm.values(row, static_cast<Eigen::Index>(j)) = features[j];
            }
            fm.values(row, static_cast<Eigen::Index>(k)) = 1.0;
        }
    }
    return fm;
}

/// cov(y, yhat)^2 / (var(y) var(yhat)); zero when either side is constant.
[[nodiscard]] inline double capacity(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size() || y.size() < 2) {
        throw std::invalid_argument("capacity: need two equal-length series of size >= 2");
    }
    const double n = static_cast<double>(y.size());
    double my = 0.0;
    double mh = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        my += y[i];
        mh += yhat[i];
    }
    my /= n;
    mh /= n;
    double cov = 0.0;
    double vy = 0.0;
    double vh = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        cov += (y[i] - my) * (yhat[i] - mh);
        vy += (y[i] - my) * (y[i] - my);
        vh += (yhat[i] - mh) * (yhat[i] - mh);
    }
    if (!(vy > 0.0) || !(vh > 0.0)) {
        return 0.0;
    }
    return std::clamp(cov * cov / (vy * vh), 0.0, 1.0);
}

/// Mean squared error normalized by the target variance.
[[nodiscard]] inline double nmse(std::span<const double> y, std::span<const double> yhat) {
    const double n = static_cast<double>(y.size());
    double my = 0.0;
    for (const double v : y) {
        my += v;
    }
    my /= n;
    double err = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        err += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        var += (y[i] - my) * (y[i] - my);
    }
    return var > 0.0 ? err / var : std::nan("");
}

/// Training-set column statistics; constant columns keep scale 1.
struct Standardization {
    RVector mean;
    RVector scale;
};

struct Readout {
    RVector weights; ///< standardized observables, then bias
    Standardization standardization;
    double ridge_lambda = 0.0;
};

struct TaskRun {
    std::vector<double> inputs;
    std::vector<double> targets;     ///< test segment
    std::vector<double> predictions; ///< test segment
    double capacity = 0.0;
    double nmse = 0.0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<std::string> warnings;
};

struct ReadoutFit {
    Readout readout;
    TaskRun run;
};

inline constexpr double kConstantFeatureStd = 1e-12;

/// Ridge regression on standardized features over a contiguous training
/// prefix; the metric is evaluated on the remaining rows.
[[nodiscard]] inline ReadoutFit fit_readout(const FeatureMatrix &features, std::span<const double> targets,
                                            double ridge_lambda, double train_fraction) {
    const auto rows = static_cast<Eigen::Index>(features.rows());
    if (targets.size() != features.rows()) {
        throw std::invalid_argument("fit_readout: target count differs from feature rows");
    }
    if (rows == 0) {
        throw std::invalid_argument("fit_readout: no feature rows");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0) || ridge_lambda < 0.0) {
        throw std::invalid_argument("fit_readout: bad train_fraction or ridge_lambda");
    }
    const auto n_train = static_cast<Eigen::Index>(std::floor(train_fraction * static_cast<double>(rows)));
    const Eigen::Index n_test = rows - n_train;
    if (n_train < 2 || n_test < 2) {
        throw std::invalid_argument("fit_readout: too few rows for a train/test split");
    }
    const Eigen::Index k = features.values.cols() - 1;

    ReadoutFit out;
    out.readout.ridge_lambda = ridge_lambda;
    out.run.train_rows = static_cast<std::size_t>(n_train);
    out.run.test_rows = static_cast<std::size_t>(n_test);
    if (n_train < 2 * (k + 1)) {
        out.run.warnings.emplace_back("fewer than 2x feature-count training rows");
    }

    auto &st = out.readout.standardization;
    st.mean.resize(k);
    st.scale.resize(k);
    const auto train = features.values.topRows(n_train);
    for (Eigen::Index j = 0; j < k; ++j) {
        const double m = train.col(j).mean();
        const double var = (train.col(j).array() - m).square().mean();
        const double sd = std::sqrt(var);
        st.mean(j) = m;
        st.scale(j) = sd > kConstantFeatureStd ? sd : 1.0;
    }
    auto standardize = [&](Eigen::Index first, Eigen::Index count) {
        RMatrix x(count, k + 1);
        for (Eigen::Index j = 0; j < k; ++j) {
            x.col(j) = (features.values.col(j).segment(first, count).array() - st.mean(j)) / st.scale(j);
        }
        x.col(k).setOnes();
        return x;
    };
    const RMatrix x_train = standardize(0, n_train);
    const RMatrix x_test = standardize(n_train, n_test);
    const Eigen::Map<const RVector> y_all(targets.data(), rows);

    // Augmented least squares [X; sqrt(lambda) I_k 0] w = [y; 0]; the bias is unpenalized.
    RMatrix a = RMatrix::Zero(n_train + k, k + 1);
    a.topRows(n_train) = x_train;
    RVector rhs = RVector::Zero(n_train + k);
    rhs.head(n_train) = y_all.head(n_train);
    const double root = std::sqrt(ridge_lambda);
    for (Eigen::Index j = 0; j < k; ++j) {
        a(n_train + j, j) = root;
    }
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(a);
    if (cod.rank() < k + 1) {
        out.run.warnings.emplace_back("singular design; minimum-norm pseudoinverse solution");
    }
    out.readout.weights = cod.solve(rhs);

    const RVector pred = x_test * out.readout.weights;
    out.run.targets.assign(y_all.data() + n_train, y_all.data() + rows);
    out.run.predictions.assign(pred.data(), pred.data() + pred.size());
    out.run.capacity = capacity(out.run.targets, out.run.predictions);
    out.run.nmse = nmse(out.run.targets, out.run.predictions);
    return out;
}

struct MemoryTaskResult {
    std::vector<double> capacities; ///< index tau = 0..max_tau
    std::vector<double> nmse;
    double mean_capacity = 0.0;     ///< over 1 <= tau <= min(12, max_tau)
    std::vector<std::string> warnings;
};

/// Uniform [0, 1) inputs times cfg.input_scale; targets y_n = theta_{n - tau}.
[[nodiscard]] inline std::vector<double> memory_inputs(const ReservoirConfig &cfg, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> inputs(cfg.steps);
    for (auto &x : inputs) {
        x = cfg.input_scale * rng.uniform();
    }
    return inputs;
}

[[nodiscard]] inline MemoryTaskResult memory_task(const ReservoirConfig &cfg, const CircuitTemplate &tpl,
                                                  std::size_t max_tau, std::uint64_t input_seed) {
    cfg.validate();
    if (max_tau >= cfg.washout) {
        throw std::invalid_argument("memory_task: max_tau must be below the washout");
    }
    const auto inputs = memory_inputs(cfg, input_seed);
    const FeatureMatrix fm = run_sequence(cfg, tpl, inputs);
    MemoryTaskResult out;
    std::vector<double> targets(fm.rows());
    for (std::size_t tau = 0; tau <= max_tau; ++tau) {
        for (std::size_t i = 0; i < fm.rows(); ++i) {
            targets[i] = inputs[fm.first_step + i - tau];
        }
        auto fit = fit_readout(fm, targets, cfg.ridge_lambda, cfg.train_fraction);
        out.capacities.push_back(fit.run.capacity);
        out.nmse.push_back(fit.run.nmse);
        if (tau == 0) {
            out.warnings = fit.run.warnings;
        }
    }
    const std::size_t hi = std::min<std::size_t>(12, max_tau);
    if (hi >= 1) {
        double total = 0.0;
        for (std::size_t tau = 1; tau <= hi; ++tau) {
            total += out.capacities[tau];
        }
        out.mean_capacity = total / static_cast<double>(hi);
    }
    return out;
}

struct NarmaConstants {
    double alpha = 0.3;
    double beta = 0.05;
    double gamma = 1.5;
    double delta = 0.1;
    double a_bar = 2.11;
    double b_bar = 3.73;
    double c_bar = 4.11;
    double period = 100.0;
};

/// theta_n = 0.1 (1 + prod_x sin(omega x n)), omega = 2 pi / T.
[[nodiscard]] inline std::vector<double> narma_inputs(std::size_t steps, const NarmaConstants &k = {}) {
    const double omega = 2.0 * std::numbers::pi / k.period;
    std::vector<double> out(steps);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n);
        out[n] = 0.1 * (1.0 + std::sin(omega * k.a_bar * t) * std::sin(omega * k.b_bar * t) *
                                  std::sin(omega * k.c_bar * t));
    }
    return out;
}

/// Element n is y(n+1), the target for features recorded at step n. History
/// before n = 0 is zero.
[[nodiscard]] inline std::vector<double> narma_targets(std::span<const double> inputs, std::size_t order,
                                                       const NarmaConstants &k = {}) {
    if (order == 0) {
        throw std::invalid_argument("narma_targets: order must be positive");
    }
    const std::size_t steps = inputs.size();
    std::vector<double> y(steps + 1, 0.0); // y[n] = y_n
    for (std::size_t n = 0; n < steps; ++n) {
        double window = 0.0;
        for (std::size_t j = 0; j < order && j <= n; ++j) {
            window += y[n - j];
        }
        const double lagged = (n + 1 >= order) ? inputs[n + 1 - order] : 0.0;
        y[n + 1] = k.alpha * y[n] + k.beta * y[n] * window + k.gamma * lagged * inputs[n] + k.delta;
        if (!std::isfinite(y[n + 1]) || std::abs(y[n + 1]) > 1e6) {
            throw std::runtime_error("narma_targets: recursion diverged");
        }
    }
    return {y.begin() + 1, y.end()};
}

[[nodiscard]] inline TaskRun narma_task(const ReservoirConfig &cfg, const CircuitTemplate &tpl,
                                        std::size_t order = 10) {
    cfg.validate();
    const auto inputs = narma_inputs(cfg.steps);
    const auto all_targets = narma_targets(inputs, order);
    const FeatureMatrix fm = run_sequence(cfg, tpl, inputs);
    const std::span<const double> targets(all_targets.data() + fm.first_step, fm.rows());
    auto fit = fit_readout(fm, targets, cfg.ridge_lambda, cfg.train_fraction);
    fit.run.inputs = inputs;
    return fit.run;
}

struct ConvergenceResult {
    std::vector<double> distances; ///< D(0) for the inputs, then after each step
    std::optional<ExpDecayFit> fit;
    bool contractive = false;
    std::vector<std::string> warnings;
};

/**
 * Iterates two initial states under identical inputs and fits
 * D(n) = D0 2^{-eta n} on the leading run of distances above `floor`.
 * The first step uses the full density-matrix route so arbitrary initial
 * states are accepted; later steps use the compiled channel.
 */
[[nodiscard]] inline ConvergenceResult convergence_rate(const ReservoirConfig &cfg, const CircuitTemplate &tpl,
                                                        std::span<const double> inputs,
                                                        const DensityMatrix &rho_a, const DensityMatrix &rho_b,
                                                        double floor = 1e-12) {
    cfg.validate();
    if (inputs.empty()) {
        throw std::invalid_argument("convergence_rate: no inputs");
    }
    ConvergenceResult out;
    out.distances.push_back(trace_distance(rho_a, rho_b));
    if (out.distances.front() < 1e-14) {
        out.warnings.emplace_back("identical initial states; decay rate undefined");
        return out;
    }
    ReservoirChannel channel(cfg, tpl);
    const auto first_a = step(rho_a, inputs[0], cfg, tpl);
    const auto first_b = step(rho_b, inputs[0], cfg, tpl);
    std::vector<Qubit> mem = cfg.memory;
    std::sort(mem.begin(), mem.end());
    CMatrix sa = partial_trace(first_a.next, mem).matrix();
    CMatrix sb = partial_trace(first_b.next, mem).matrix();
    out.distances.push_back(0.5 * eigvalsh(sa - sb).cwiseAbs().sum());

    std::vector<double> scratch(channel.feature_count());
    for (std::size_t n = 1; n < inputs.size(); ++n) {
        channel.step(sa, inputs[n], scratch);
        channel.step(sb, inputs[n], scratch);
        out.distances.push_back(0.5 * eigvalsh(sa - sb).cwiseAbs().sum());
    }

    std::vector<double> xs;
    std::vector<double> ds;
    for (std::size_t n = 0; n < out.distances.size() && out.distances[n] > floor; ++n) {
        xs.push_back(static_cast<double>(n));
        ds.push_back(out.distances[n]);
    }
    if (xs.size() >= 3) {
        out.fit = fit_exp_decay(xs, ds);
        out.contractive = out.fit->eta > 0.0;
    } else {
        // Collapsed below the floor within two steps.
        out.contractive = out.distances.back() < out.distances.front();
        out.warnings.emplace_back("distance fell below floor too quickly to fit");
    }
    if (!out.contractive) {
        out.warnings.emplace_back("distance does not decay; echo-state property violated");
    }
    return out;
}

} // namespace pqrc
