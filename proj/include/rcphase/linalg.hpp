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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace rcphase {

using cd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cd kI{0.0, 1.0};

struct Tolerances {
    double construction = 1e-10;
    double validation = 1e-8;
};

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);
ComplexMatrix kron_all(const std::vector<ComplexMatrix> &factors);

double max_abs(const ComplexMatrix &m);
double unitarity_defect(const ComplexMatrix &u);
bool is_unitary(const ComplexMatrix &u, double tol = Tolerances{}.validation);
bool is_hermitian(const ComplexMatrix &h, double tol = 1e-10);

/// Maps an angle onto the principal branch (-pi, pi].
double wrap_phase(double x);
/// min_k |a - b + 2 pi k|
double circular_distance(double a, double b);

/// Spectral decomposition U = sum_a exp(i phase_a) |v_a><v_a|.
struct UnitarySpectrum {
    std::size_t dimension = 0;
    std::vector<double> phases;  // ascending, each in (-pi, pi]
    ComplexMatrix eigenvectors;  // column a is |v_a>

    ComplexMatrix reconstruct() const;
};

/// Throws NotUnitary when ||u^dag u - I||_max exceeds `tol`.
UnitarySpectrum eig_unitary(const ComplexMatrix &u, double tol = Tolerances{}.validation);

/// Haar-distributed unitary from a seeded complex Ginibre matrix (QR with phase fix).
ComplexMatrix random_unitary(std::size_t dim, unsigned long long seed);

/// One step of the splitmix64 generator.
std::uint64_t splitmix64(std::uint64_t x);
/// Counter-based child seed: independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace rcphase
