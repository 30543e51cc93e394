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
#include <vector>

#include "rcphase/circuit.hpp"
#include "rcphase/noise.hpp"
#include "rcphase/pauli.hpp"

namespace rcphase {

struct RcEnsemble {
    Circuit bare;
    std::vector<Circuit> randomized;
    std::vector<std::uint64_t> seeds;
    /// twirls[r][k] is T_k of member r.
    std::vector<std::vector<PauliString>> twirls;
};

struct CompileOptions {
    /// Test hook: every T_k is the identity.
    bool identity_twirls = false;
};

/// Independent uniform single-qubit Paulis for each qubit of each cycle.
std::vector<PauliString> draw_twirls(std::size_t n_qubits, std::size_t n_cycles, std::uint64_t seed);

/// Dresses every easy layer as T_k C_k T_{k-1}^c with T_{k-1}^c = G_{k-1} T_{k-1} G_{k-1}^dag
/// (T_0^c = I), fused to one gate per qubit, and stores G_K T_K G_K^dag as the
/// terminal frame. Throws NonCliffordHardLayer.
Circuit randomize(const Circuit &bare, const std::vector<PauliString> &twirls);

/// Terminal frame G T G^dag for a prefix ending with a cycle whose hard layer
/// is `hard` and whose twirl is `twirl` (identity letters omitted).
std::vector<Gate> terminal_frame(const std::vector<Gate> &hard, const PauliString &twirl);

/// Member r uses seed derive_seed(seed, r).
RcEnsemble compile(const Circuit &bare, std::size_t n_r, std::uint64_t seed, const CompileOptions &opts = {});

struct EquivalenceReport {
    /// 1 - |Tr(V^dag U)| / 2^n per member.
    std::vector<double> deviations;
    double max_deviation = 0.0;
};

EquivalenceReport verify_equivalence(const RcEnsemble &e);

/// Superoperator (row-major vectorization) of the noisy circuit, n <= 3.
ComplexMatrix noisy_superoperator(const Circuit &c, const NoiseModel *noise);

/// Average noisy superoperator over the ensemble, or over all 4^{nK} twirl
/// assignments when `exhaustive` is set. n <= 3; at most 4^8 assignments.
ComplexMatrix effective_channel(const RcEnsemble &e, const NoiseModel &noise, bool exhaustive);

/// One cycle with its noise replaced by the Pauli twirl of the cycle noise
/// Lambda = N_hard o G N_easy G^dag, followed by nothing else: returns
/// twirl(Lambda) o (G C). n <= 3.
ComplexMatrix twirled_cycle_superoperator(const Cycle &cycle, std::size_t n_qubits, const NoiseModel &noise);
/// Product of twirled_cycle_superoperator over the cycles of `bare`.
ComplexMatrix twirled_reference_superoperator(const Circuit &bare, const NoiseModel &noise);

/// Pauli-transfer diagonal f_P = Tr(P Lambda(P)) / 2^n of the twirled cycle
/// noise, 4^n entries indexed like PauliString::index(). Works at any n the
/// state simulator supports; cost grows with the support of the local
/// Pauli-transfer matrices.
std::vector<double> twirled_cycle_fidelities(const Cycle &cycle, std::size_t n_qubits, const NoiseModel &noise);

/// Throws NonCliffordHardLayer when a hard gate is not Clifford.
void require_clifford_hard_layers(const Circuit &c);

}  // namespace rcphase
