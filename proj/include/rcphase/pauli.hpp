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
#include <string>
#include <string_view>
#include <vector>

#include "rcphase/linalg.hpp"

namespace rcphase {

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// n-qubit Pauli word with a phase i^k. Qubit 0 is the leftmost tensor factor
/// (most significant bit of a basis-state index).
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(std::size_t n);
    PauliString(std::vector<PauliLetter> letters, int phase_exponent = 0);

    static PauliString identity(std::size_t n) {
        return PauliString(n);
    }
    /// Parses "XIZ", "-iXY", "+YY", "i Z".
    static PauliString parse(std::string_view text);
    /// Base-4 index with qubit 0 most significant (I=0, X=1, Y=2, Z=3); phase +1.
    static PauliString from_index(std::size_t n, std::size_t index);

    std::size_t num_qubits() const {
        return letters_.size();
    }
    PauliLetter operator[](std::size_t q) const {
        return letters_[q];
    }
    void set(std::size_t q, PauliLetter l) {
        letters_[q] = l;
    }
    const std::vector<PauliLetter> &letters() const {
        return letters_;
    }
    /// Phase is i^phase_exponent(), exponent in {0,1,2,3}.
    int phase_exponent() const {
        return phase_;
    }
    cd phase() const;
    void set_phase_exponent(int k) {
        phase_ = ((k % 4) + 4) % 4;
    }

    std::size_t index() const;
    std::size_t weight() const;
    bool is_identity_word() const;
    /// Matrix form is Hermitian exactly when the phase is +-1.
    bool is_hermitian() const {
        return phase_ % 2 == 0;
    }
    /// Same letters, ignoring phase.
    bool same_word(const PauliString &other) const {
        return letters_ == other.letters_;
    }

    PauliString operator*(const PauliString &rhs) const;
    PauliString inverse() const;
    PauliString adjoint() const {
        return inverse();
    }
    /// Letters on the given qubits, phase +1.
    PauliString restrict_to(const std::vector<std::size_t> &qubits) const;

    ComplexMatrix matrix() const;
    std::string str() const;

    bool operator==(const PauliString &other) const = default;

   private:
    std::vector<PauliLetter> letters_;
    int phase_ = 0;
};

ComplexMatrix pauli_matrix(PauliLetter l);

/// Returns Q with Q = c p c^dag (phase included). Throws NotPauliImage when the
/// conjugate is not proportional to a Pauli word with phase in {+-1, +-i}.
PauliString conjugate_pauli(const ComplexMatrix &c, const PauliString &p, double tol = 1e-9);

/// True when `u` maps every single-qubit X and Z onto a Pauli word.
bool is_clifford(const ComplexMatrix &u, double tol = 1e-9);

}  // namespace rcphase
