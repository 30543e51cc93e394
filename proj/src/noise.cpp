// Copyright 2026 The rcphase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rcphase/noise.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "rcphase/error.hpp"

namespace rcphase {

namespace {

bool commutes(const PauliString &a, const PauliString &b) {
    std::size_t anti = 0;
    for (std::size_t q = 0; q < a.num_qubits(); q++) {
        anti += a[q] != PauliLetter::I && b[q] != PauliLetter::I && a[q] != b[q];
    }
    return anti % 2 == 0;
}

void check_probability(double p, const char *what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::BadProbabilities, std::string(what) + " = " + std::to_string(p) + " outside [0, 1]");
    }
}

}  // namespace

std::vector<double> PauliChannel::fidelities() const {
    std::size_t count = probabilities.size();
    std::vector<double> f(count, 0.0);
    for (std::size_t qi = 0; qi < count; qi++) {
        PauliString q = PauliString::from_index(arity, qi);
        double acc = 0.0;
        for (std::size_t pi = 0; pi < count; pi++) {
            double sign = commutes(PauliString::from_index(arity, pi), q) ? 1.0 : -1.0;
            acc += sign * probabilities[pi];
        }
        f[qi] = acc;
    }
    return f;
}

KrausChannel PauliChannel::to_kraus() const {
    KrausChannel ch{arity, {}};
    for (std::size_t i = 0; i < probabilities.size(); i++) {
        if (probabilities[i] > 0) {
            ch.kraus_ops.push_back(std::sqrt(probabilities[i]) * PauliString::from_index(arity, i).matrix());
        }
    }
    if (ch.kraus_ops.empty()) {
        throw Error(ErrorCode::BadProbabilities, "Pauli channel has no support");
    }
    return ch;
}

void PauliChannel::validate() const {
    if (probabilities.size() != (std::size_t{1} << (2 * arity))) {
        throw Error(ErrorCode::BadProbabilities, "probability table has wrong size");
    }
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0)) {
            throw Error(ErrorCode::BadProbabilities, "negative Pauli probability");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorCode::BadProbabilities, "Pauli probabilities sum to " + std::to_string(total));
    }
}

KrausChannel make_stochastic_pauli(double px, double py, double pz) {
    check_probability(px, "px");
    check_probability(py, "py");
    check_probability(pz, "pz");
    double pi = 1.0 - px - py - pz;
    if (pi < -1e-15) {
        throw Error(ErrorCode::BadProbabilities, "px + py + pz exceeds 1");
    }
    pi = std::max(pi, 0.0);
    KrausChannel ch{1, {}};
    const double probs[4] = {pi, px, py, pz};
    for (int k = 0; k < 4; k++) {
        if (probs[k] > 0) {
            ch.kraus_ops.push_back(std::sqrt(probs[k]) * pauli_matrix(static_cast<PauliLetter>(k)));
        }
    }
    return ch;
}

KrausChannel make_depolarizing(double p) {
    check_probability(p, "p");
    return make_stochastic_pauli(p / 4, p / 4, p / 4);
}

KrausChannel make_amplitude_damping(double gamma) {
    check_probability(gamma, "gamma");
    ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
    e0(0, 0) = 1;
    e0(1, 1) = std::sqrt(1 - gamma);
    ComplexMatrix e1 = ComplexMatrix::Zero(2, 2);
    e1(0, 1) = std::sqrt(gamma);
    return KrausChannel{1, {e0, e1}};
}

KrausChannel make_coherent(const PauliString &axis, double theta) {
    if (!axis.is_hermitian()) {
        throw Error(ErrorCode::BadParams, "coherent axis must be a Hermitian Pauli");
    }
    ComplexMatrix p = axis.matrix();
    auto d = p.rows();
    ComplexMatrix k = std::cos(theta / 2) * ComplexMatrix::Identity(d, d) - kI * std::sin(theta / 2) * p;
    return KrausChannel{axis.num_qubits(), {k}};
}

KrausChannel tensor(const KrausChannel &a, const KrausChannel &b) {
    KrausChannel out{a.arity + b.arity, {}};
    for (const auto &ea : a.kraus_ops) {
        for (const auto &eb : b.kraus_ops) {
            out.kraus_ops.push_back(kron(ea, eb));
        }
    }
    return out;
}

KrausChannel compose(const KrausChannel &a, const KrausChannel &b) {
    if (a.arity != b.arity) {
        throw Error(ErrorCode::DimensionMismatch, "cannot compose channels of arity " + std::to_string(a.arity) +
                                                      " and " + std::to_string(b.arity));
    }
    KrausChannel out{a.arity, {}};
    for (const auto &ea : a.kraus_ops) {
        for (const auto &eb : b.kraus_ops) {
            out.kraus_ops.push_back(ea * eb);
        }
    }
    return out;
}

bool is_hermitian_kraus(const KrausChannel &ch, double tol) {
    for (const auto &e : ch.kraus_ops) {
        if (max_abs(e - e.adjoint()) > tol) {
            return false;
        }
    }
    return true;
}

PauliChannel pauli_twirl(const KrausChannel &ch) {
    if (ch.arity > 2) {
        throw Error(ErrorCode::TooLarge, "pauli_twirl supports arity <= 2");
    }
    validate_channel(ch);
    std::size_t count = std::size_t{1} << (2 * ch.arity);
    double d = static_cast<double>(ch.dim());
    PauliChannel out{ch.arity, std::vector<double>(count, 0.0)};
    for (std::size_t i = 0; i < count; i++) {
        ComplexMatrix p = PauliString::from_index(ch.arity, i).matrix();
        double acc = 0.0;
        for (const auto &e : ch.kraus_ops) {
            acc += std::norm((p * e).trace());
        }
        out.probabilities[i] = acc / (d * d);
    }
    return out;
}

PauliChannel pauli_twirl(const PauliChannel &ch) {
    ch.validate();
    return ch;
}

Eigen::MatrixXd pauli_transfer_matrix(const KrausChannel &ch) {
    std::size_t count = std::size_t{1} << (2 * ch.arity);
    double d = static_cast<double>(ch.dim());
    std::vector<ComplexMatrix> paulis;
    paulis.reserve(count);
    for (std::size_t i = 0; i < count; i++) {
        paulis.push_back(PauliString::from_index(ch.arity, i).matrix());
    }
    auto c = static_cast<Eigen::Index>(count);
    Eigen::MatrixXd r(c, c);
    for (Eigen::Index b = 0; b < c; b++) {
        ComplexMatrix image = ComplexMatrix::Zero(paulis[0].rows(), paulis[0].cols());
        for (const auto &e : ch.kraus_ops) {
            image += e * paulis[static_cast<std::size_t>(b)] * e.adjoint();
        }
        for (Eigen::Index a = 0; a < c; a++) {
            r(a, b) = (paulis[static_cast<std::size_t>(a)] * image).trace().real() / d;
        }
    }
    return r;
}

double noise_strength(const PauliChannel &ch) {
    ch.validate();
    return 1.0 - ch.probabilities[0];
}

double noise_strength(const KrausChannel &ch) {
    validate_channel(ch);
    if (ch.kraus_ops.size() == 1) {
        Eigen::ComplexEigenSolver<ComplexMatrix> solver(ch.kraus_ops[0]);
        const auto &ev = solver.eigenvalues();
        double spread = 0.0;
        for (Eigen::Index a = 0; a < ev.size(); a++) {
            for (Eigen::Index b = a + 1; b < ev.size(); b++) {
                spread = std::max(spread, circular_distance(std::arg(ev(a)), std::arg(ev(b))));
            }
        }
        return std::sin(spread / 2);
    }
    if (ch.arity <= 2) {
        return noise_strength(pauli_twirl(ch));
    }
    // p_I of the twirl is |Tr E_k|^2 / d^2 summed, valid at any arity.
    double d = static_cast<double>(ch.dim());
    double pi = 0.0;
    for (const auto &e : ch.kraus_ops) {
        pi += std::norm(e.trace());
    }
    return 1.0 - pi / (d * d);
}

NoiseModel::NoiseModel(std::size_t n_qubits)
    : easy_(n_qubits, KrausChannel::identity(1)), hard_(n_qubits, KrausChannel::identity(1)) {
}

NoiseModel NoiseModel::uniform(std::size_t n_qubits, const KrausChannel &single_qubit) {
    validate_channel(single_qubit);
    NoiseModel m(n_qubits);
    for (std::size_t q = 0; q < n_qubits; q++) {
        m.easy_[q] = single_qubit;
        m.hard_[q] = single_qubit;
    }
    m.kind = "custom";
    m.strength = noise_strength(single_qubit);
    return m;
}

NoiseModel NoiseModel::from_config(const NoiseConfig &cfg, std::size_t n_qubits) {
    NoiseModel m(n_qubits);
    m.kind = cfg.type;
    m.strength = cfg.strength;
    if (cfg.type == "none") {
        return m;
    }
    if (cfg.type == "pauli" || cfg.type == "depolarizing" || cfg.type == "amp_damp") {
        KrausChannel ch;
        if (cfg.type == "pauli") {
            double third = cfg.strength / 3;
            ch = make_stochastic_pauli(cfg.px.value_or(third), cfg.py.value_or(third), cfg.pz.value_or(third));
        } else if (cfg.type == "depolarizing") {
            ch = make_depolarizing(cfg.strength);
        } else {
            ch = make_amplitude_damping(cfg.strength);
        }
        for (std::size_t q = 0; q < n_qubits; q++) {
            m.easy_[q] = ch;
            m.hard_[q] = ch;
        }
    } else if (cfg.type == "coherent") {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_int_distribution<int> pick(1, 3);
        auto axis_for = [&]() {
            PauliString axis(1);
            if (cfg.axis == "random-per-location") {
                axis.set(0, static_cast<PauliLetter>(pick(rng)));
            } else {
                axis = PauliString::parse(cfg.axis);
                if (axis.num_qubits() != 1) {
                    throw Error(ErrorCode::BadParams, "coherent axis must be a single-qubit Pauli");
                }
            }
            return axis;
        };
        // Locations are drawn in a fixed order so the assignment is a pure function of the seed.
        for (std::size_t q = 0; q < n_qubits; q++) {
            m.easy_[q] = make_coherent(axis_for(), cfg.strength);
        }
        for (std::size_t q = 0; q < n_qubits; q++) {
            m.hard_[q] = make_coherent(axis_for(), cfg.strength);
        }
    } else {
        throw Error(ErrorCode::BadParams, "unknown noise type '" + cfg.type + "'");
    }
    if (cfg.correlated_hard) {
        if (cfg.type == "coherent") {
            m.hard_correlated_ = make_coherent(PauliString::parse("XX"), cfg.strength);
        } else {
            double p = cfg.strength / 15;
            PauliChannel two{2, std::vector<double>(16, p)};
            two.probabilities[0] = 1 - 15 * p;
            m.hard_correlated_ = two.to_kraus();
        }
    }
    return m;
}

KrausChannel NoiseModel::hard_channel(std::size_t a, std::size_t b) const {
    if (hard_correlated_) {
        return *hard_correlated_;
    }
    return tensor(hard_.at(a), hard_.at(b));
}

void NoiseModel::set_easy(std::size_t q, KrausChannel ch) {
    validate_channel(ch);
    easy_.at(q) = std::move(ch);
}

void NoiseModel::set_hard(std::size_t q, KrausChannel ch) {
    validate_channel(ch);
    hard_.at(q) = std::move(ch);
}

void NoiseModel::set_hard_correlated(std::optional<KrausChannel> ch) {
    if (ch) {
        validate_channel(*ch);
        if (ch->arity != 2) {
            throw Error(ErrorCode::DimensionMismatch, "correlated hard channel must act on 2 qubits");
        }
    }
    hard_correlated_ = std::move(ch);
}

namespace {

bool is_identity_channel(const KrausChannel &ch) {
    if (ch.kraus_ops.size() != 1) {
        return false;
    }
    const auto &e = ch.kraus_ops[0];
    // Global phase is irrelevant.
    cd ph = e(0, 0);
    return std::abs(std::abs(ph) - 1) < 1e-14 &&
           max_abs(e - ph * ComplexMatrix::Identity(e.rows(), e.cols())) < 1e-14;
}

}  // namespace

bool NoiseModel::is_noiseless() const {
    for (const auto &ch : easy_) {
        if (!is_identity_channel(ch)) {
            return false;
        }
    }
    for (const auto &ch : hard_) {
        if (!is_identity_channel(ch)) {
            return false;
        }
    }
    return !hard_correlated_ || is_identity_channel(*hard_correlated_);
}

bool NoiseModel::is_unitary() const {
    auto single = [](const KrausChannel &ch) { return ch.kraus_ops.size() == 1; };
    for (const auto &ch : easy_) {
        if (!single(ch)) {
            return false;
        }
    }
    for (const auto &ch : hard_) {
        if (!single(ch)) {
            return false;
        }
    }
    return !hard_correlated_ || single(*hard_correlated_);
}

}  // namespace rcphase
