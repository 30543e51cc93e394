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
#include <map>
#include <utility>
#include <vector>

#include "rcphase/circuit.hpp"
#include "rcphase/noise.hpp"

namespace rcphase {

struct DensityMatrix {
    std::size_t n_qubits = 0;
    ComplexMatrix matrix;

    static DensityMatrix from_pure(const ComplexVector &psi);
    static DensityMatrix basis_state(std::size_t n_qubits, std::size_t index = 0);
    static DensityMatrix maximally_mixed(std::size_t n_qubits);

    std::size_t dim() const {
        return std::size_t{1} << n_qubits;
    }
    cd trace() const {
        return matrix.trace();
    }
    /// Throws NotCPTP when the Hermiticity, trace or positivity bounds fail.
    void validate(double tol = 1e-9, double positivity_tol = 1e-8) const;
};

/// Applies a k-qubit superoperator (4^k x 4^k, row-major vectorization of the
/// local 2^k x 2^k block; qubits[0] most significant) in place. k is 1 or 2.
/// With `hermitian` set, rho and the map are assumed Hermitian(-preserving) and
/// only the upper block triangle is computed, the rest is mirrored.
void apply_local_superoperator(DensityMatrix &rho, const std::vector<std::size_t> &qubits, const ComplexMatrix &s,
                               bool hermitian = false);

/// Applies the Pauli-diagonal channel P -> f[index(P)] P (4^n fidelities).
void apply_pauli_diagonal(DensityMatrix &rho, const std::vector<double> &fidelities);

/// Gate-by-gate noisy evolution with cached local superoperators. Each easy
/// layer is a full layer: every qubit receives its easy channel whether or not
/// a gate acts on it. Each hard gate is followed by the hard channel on its
/// targets. The terminal frame is applied without noise.
class NoisyEvolver {
   public:
    NoisyEvolver(std::size_t n_qubits, const NoiseModel *noise);

    void run(DensityMatrix &rho, const Circuit &c);
    void run_cycle(DensityMatrix &rho, const Cycle &cycle);
    /// Pure-state evolution, valid only when every channel is unitary.
    void run(ComplexVector &psi, const Circuit &c);
    void run_cycle(ComplexVector &psi, const Cycle &cycle);

    /// True when the pure-state path reproduces density-matrix evolution.
    bool supports_pure_states() const;

    /// Default true. Clear it before evolving non-Hermitian operators such as |i><j|.
    void set_hermitian_states(bool on) {
        hermitian_ = on;
    }

   private:
    const ComplexMatrix &easy_noise_superop(std::size_t q);
    const ComplexMatrix &hard_noise_superop(std::size_t a, std::size_t b);

    std::size_t n_;
    const NoiseModel *noise_;
    bool hermitian_ = true;
    std::vector<ComplexMatrix> easy_cache_;
    std::map<std::pair<std::size_t, std::size_t>, ComplexMatrix> hard_cache_;
};

/// Density-matrix evolution of `c` from `rho0`; `noise` may be null.
DensityMatrix run_circuit(const DensityMatrix &rho0, const Circuit &c, const NoiseModel *noise = nullptr);

/// Tr[h rho]; throws NotHermitian / DimensionMismatch.
double expect_hermitian(const DensityMatrix &rho, const ComplexMatrix &h);

/// O = 2|phi0><t| split as O = H_re + i H_im.
struct ObservablePair {
    ComplexVector phi0;
    ComplexVector target;

    /// Normalizes both vectors, fixes their global phases (largest-magnitude
    /// amplitude real positive) and checks orthogonality within 1e-9.
    static ObservablePair make(ComplexVector phi0, ComplexVector target);

    ComplexMatrix h_re() const;
    ComplexMatrix h_im() const;
    /// (|phi0> + |t>)/sqrt(2)
    ComplexVector superposition() const;
};

/// 2 <t|rho|phi0>
cd expect_complex(const DensityMatrix &rho, const ObservablePair &obs);
cd expect_complex(const ComplexVector &psi, const ObservablePair &obs);

struct ShotConfig {
    std::uint64_t shots = 0;  // 0 = exact expectation
    std::uint64_t seed = 0;
    /// Readout confusion: each recorded outcome is replaced by a uniformly
    /// chosen different outcome class with this probability.
    double readout_error = 0.0;
};

/// Projective measurement in the eigenbasis of a Hermitian observable.
/// Eigenvalues equal within 1e-9 form one outcome class; the zero-eigenvalue
/// class is kept implicit (probability 1 minus the rest).
class MeasurementBasis {
   public:
    static MeasurementBasis from_hermitian(const ComplexMatrix &h);

    std::size_t num_outcomes() const {
        return eigenvalues_.size();
    }
    const std::vector<double> &eigenvalues() const {
        return eigenvalues_;
    }
    std::vector<double> probabilities(const DensityMatrix &rho) const;
    std::vector<double> probabilities(const ComplexVector &psi) const;
    double mean(const std::vector<double> &probabilities) const;
    /// Multinomial sample of sc.shots outcomes; sc.shots == 0 returns mean(probabilities).
    double sample(const std::vector<double> &probabilities, const ShotConfig &sc) const;

   private:
    std::vector<double> eigenvalues_;
    std::vector<ComplexMatrix> projector_vectors_;  // empty for the implicit class
};

double sample_hermitian(const DensityMatrix &rho, const ComplexMatrix &h, const ShotConfig &sc);

}  // namespace rcphase
