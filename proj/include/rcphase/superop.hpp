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

#include <vector>

#include "rcphase/linalg.hpp"

namespace rcphase {

/// rho -> sum_k E_k rho E_k^dag on `arity` qubits.
struct KrausChannel {
    std::size_t arity = 1;
    std::vector<ComplexMatrix> kraus_ops;

    std::size_t dim() const {
        return std::size_t{1} << arity;
    }
    /// max-norm of sum_k E_k^dag E_k - I
    double cptp_defect() const;
    bool is_cptp(double tol = 1e-9) const {
        return cptp_defect() <= tol;
    }

    static KrausChannel identity(std::size_t arity);
    static KrausChannel unitary(const ComplexMatrix &u);
};

/// Throws NotCPTP / DimensionMismatch when the channel is malformed.
void validate_channel(const KrausChannel &ch, double tol = 1e-9);

/// dim^2 x dim^2 matrix sum_k E_k (x) conj(E_k), acting on row-major vec(rho).
ComplexMatrix superoperator(const KrausChannel &channel, std::size_t dim);
/// Superoperator of rho -> u rho u^dag.
ComplexMatrix unitary_superoperator(const ComplexMatrix &u);

/// Applies a superoperator to a density matrix (row-major vectorization).
ComplexMatrix apply_superoperator(const ComplexMatrix &s, const ComplexMatrix &rho);

/// Eigenphase displacement of the noisy channel noise o U relative to U.
/// Each noisy eigenvalue is assigned to the ideal degenerate eigenspace it
/// overlaps most; the returned value per noisy eigenvalue is its circular
/// distance from that eigenspace's phase.
std::vector<double> superop_eigenphase_shift(const ComplexMatrix &u, const KrausChannel &noise,
                                             double overlap_tol = 0.5);

}  // namespace rcphase
