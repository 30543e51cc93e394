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

#include <string>
#include <utility>
#include <vector>

#include "rcphase/linalg.hpp"
#include "rcphase/pauli.hpp"

namespace rcphase {

/// Elementary gate. The matrix is always rebuilt from (name, params) so a
/// serialized circuit reproduces bit-identical matrices.
struct Gate {
    std::string name;
    std::vector<std::size_t> qubits;
    std::vector<double> params;
    ComplexMatrix matrix;
    bool clifford = false;

    std::size_t arity() const {
        return qubits.size();
    }
    bool operator==(const Gate &other) const;
};

/// Gate factory. Known names: id x y z h s sdg rx ry rz u cz cnot swap iswap
/// phased_coupler. "u" takes the 8 numbers re/im of a row-major 2x2 unitary.
Gate make_gate(const std::string &name, std::vector<std::size_t> qubits, std::vector<double> params = {});
/// Arbitrary single-qubit unitary as a "u" gate.
Gate make_u_gate(std::size_t qubit, const ComplexMatrix &m);

/// fSim-style number-conserving coupler
/// [[1,0,0,0],[0,cos t,-i sin t,0],[0,-i sin t,cos t,0],[0,0,0,exp(-i phi)]].
ComplexMatrix phased_coupler_matrix(double theta, double phi);

struct Cycle {
    std::vector<Gate> easy;  // single-qubit gates, at most one per qubit
    std::vector<Gate> hard;  // two-qubit Clifford gates on disjoint pairs

    bool operator==(const Cycle &other) const = default;
};

struct Circuit {
    std::size_t n_qubits = 0;
    std::vector<Cycle> cycles;
    /// Noise-free single-qubit frame applied after the last cycle. Empty for bare
    /// circuits; randomized compiling stores its terminal Pauli correction here.
    std::vector<Gate> terminal;

    bool operator==(const Circuit &other) const = default;
};

/// Throws BadParams on any invariant violation (qubit range, layer overlap,
/// non-Clifford hard gate, wrong arity).
void validate(const Circuit &c);

inline constexpr std::size_t kMaxUnitaryQubits = 12;

/// G_K C_K ... G_1 C_1 followed by the terminal frame. TooLarge above 12 qubits.
ComplexMatrix circuit_unitary(const Circuit &c);
/// Unitary of one cycle (easy layer then hard layer).
ComplexMatrix cycle_unitary(const Cycle &cycle, std::size_t n_qubits);

/// Applies a gate to a state vector in place.
void apply_gate(ComplexVector &psi, std::size_t n_qubits, const Gate &g);
void apply_matrix(ComplexVector &psi, std::size_t n_qubits, const std::vector<std::size_t> &qubits,
                  const ComplexMatrix &m);

Circuit repeat(const Circuit &c, std::size_t l);

/// Multiplication by 4 modulo 255 on 8 qubits, realized as a SWAP network that
/// rotates the register by two positions. Other inputs throw Unsupported.
Circuit build_order_finding_circuit(int x = 4, int modulus = 255);

struct CouplerParams {
    double theta = 0.0;
    double phi = 0.0;
};

/// One period of a number-conserving brickwork circuit: site Z rotations plus
/// fSim-style couplers on odd bonds (0,1),(2,3),... then even bonds (1,2),(3,4),...
/// Couplers are decomposed into CNOT hard layers and single-qubit easy layers.
/// `couplers` lists odd bonds first, then even bonds (n-1 entries total).
Circuit build_floquet_circuit(std::size_t n, const std::vector<double> &single_angles,
                              const std::vector<CouplerParams> &couplers);

/// Conjugates a Pauli through a layer of gates: returns L P L^dag where L is
/// the tensor product of the (Clifford) gates. Idle qubits pass through.
PauliString conjugate_through_layer(const std::vector<Gate> &layer, const PauliString &p);

std::string serialize(const Circuit &c);
Circuit deserialize(const std::string &text);

}  // namespace rcphase
