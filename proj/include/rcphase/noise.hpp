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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcphase/pauli.hpp"
#include "rcphase/superop.hpp"

namespace rcphase {

/// Stochastic Pauli channel rho -> sum_P p_P P rho P, probabilities indexed by
/// PauliString::index() (4^arity entries, identity first).
struct PauliChannel {
    std::size_t arity = 1;
    std::vector<double> probabilities;

    double probability(const PauliString &p) const {
        return probabilities.at(p.index());
    }
    /// Pauli-transfer diagonal: f_Q = sum_P p_P (-1)^{[P,Q] != 0}.
    std::vector<double> fidelities() const;
    KrausChannel to_kraus() const;
    /// Throws BadProbabilities unless nonnegative and summing to 1 within 1e-12.
    void validate() const;
};

KrausChannel make_stochastic_pauli(double px, double py, double pz);
/// rho -> (1-p) rho + p I/2, i.e. Pauli probabilities p/4 each.
KrausChannel make_depolarizing(double p);
KrausChannel make_amplitude_damping(double gamma);
/// Single Kraus operator exp(-i theta axis / 2); axis must have phase +-1.
KrausChannel make_coherent(const PauliString &axis, double theta);

/// Tensor product channel (a on the first qubits, b on the rest).
KrausChannel tensor(const KrausChannel &a, const KrausChannel &b);
/// Apply b, then a: Kraus set {A_j B_k}.
KrausChannel compose(const KrausChannel &a, const KrausChannel &b);

bool is_hermitian_kraus(const KrausChannel &ch, double tol = 1e-10);

/// Twirl over the arity-qubit Pauli group (arity <= 2); p_P = sum_k |Tr(P E_k)|^2 / d^2.
PauliChannel pauli_twirl(const KrausChannel &ch);
PauliChannel pauli_twirl(const PauliChannel &ch);

/// Pauli-transfer matrix R[a][b] = Tr(P_a N(P_b)) / d (real for CPTP maps).
Eigen::MatrixXd pauli_transfer_matrix(const KrausChannel &ch);

/// Diamond-distance proxy. Single unitary Kraus: sin(theta_eff / 2) from the
/// eigenphase spread; anything else: 1 - p_I of the Pauli twirl (exactly the
/// total error probability for Pauli channels).
double noise_strength(const KrausChannel &ch);
double noise_strength(const PauliChannel &ch);

struct NoiseConfig {
    /// "none" | "pauli" | "depolarizing" | "amp_damp" | "coherent"
    std::string type = "none";
    double strength = 0.0;
    /// Coherent axis: "X" | "Y" | "Z" | "random-per-location".
    std::string axis = "Z";
    /// Optional explicit Pauli probabilities for type "pauli"; default p/3 each.
    std::optional<double> px, py, pz;
    std::uint64_t seed = 0;
    /// Correlated two-qubit hook (off by default): when true, hard gates get
    /// the two-qubit depolarizing-type channel of the same strength instead of
    /// a product of single-qubit channels.
    bool correlated_hard = false;
};

/// Time-independent assignment of channels to gate locations. After every
/// easy layer each qubit receives `easy_channel(q)` (idle qubits count as an
/// identity gate); after every hard gate its targets receive
/// `hard_channel(a, b)`. Channels never depend on which gate was executed.
class NoiseModel {
   public:
    NoiseModel() = default;
    explicit NoiseModel(std::size_t n_qubits);
    static NoiseModel noiseless(std::size_t n_qubits) {
        return NoiseModel(n_qubits);
    }
    static NoiseModel from_config(const NoiseConfig &cfg, std::size_t n_qubits);
    /// Same channel after every gate on every qubit.
    static NoiseModel uniform(std::size_t n_qubits, const KrausChannel &single_qubit);

    std::size_t n_qubits() const {
        return easy_.size();
    }
    const KrausChannel &easy_channel(std::size_t q) const {
        return easy_.at(q);
    }
    const KrausChannel &hard_single(std::size_t q) const {
        return hard_.at(q);
    }
    KrausChannel hard_channel(std::size_t a, std::size_t b) const;
    bool has_correlated_hard() const {
        return hard_correlated_.has_value();
    }

    void set_easy(std::size_t q, KrausChannel ch);
    void set_hard(std::size_t q, KrausChannel ch);
    void set_hard_correlated(std::optional<KrausChannel> ch);

    bool is_noiseless() const;
    /// Every channel has a single (unitary) Kraus operator.
    bool is_unitary() const;

    double strength = 0.0;
    std::string kind = "none";

   private:
    std::vector<KrausChannel> easy_;
    std::vector<KrausChannel> hard_;
    std::optional<KrausChannel> hard_correlated_;
};

}  // namespace rcphase
