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

#include "rcphase/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "rcphase/error.hpp"

namespace rcphase {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::NotPauliImage: return "NotPauliImage";
        case ErrorCode::NotCPTP: return "NotCPTP";
        case ErrorCode::DegeneracyAmbiguous: return "DegeneracyAmbiguous";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::Unsupported: return "Unsupported";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::BadProbabilities: return "BadProbabilities";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NonCliffordHardLayer: return "NonCliffordHardLayer";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::TooFewModes: return "TooFewModes";
        case ErrorCode::ReferenceNotEigenstate: return "ReferenceNotEigenstate";
        case ErrorCode::ShotSplit: return "ShotSplit";
    }
    return "Unknown";
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix kron_all(const std::vector<ComplexMatrix> &factors) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (const auto &f : factors) {
        out = kron(out, f);
    }
    return out;
}

double max_abs(const ComplexMatrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return m.cwiseAbs().maxCoeff();
}

double unitarity_defect(const ComplexMatrix &u) {
    if (u.rows() != u.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

bool is_unitary(const ComplexMatrix &u, double tol) {
    return unitarity_defect(u) <= tol;
}

bool is_hermitian(const ComplexMatrix &h, double tol) {
    return h.rows() == h.cols() && max_abs(h - h.adjoint()) <= tol;
}

double wrap_phase(double x) {
    double y = std::remainder(x, 2 * kPi);  // [-pi, pi]
    if (y <= -kPi) {
        y += 2 * kPi;
    }
    return y;
}

double circular_distance(double a, double b) {
    return std::abs(std::remainder(a - b, 2 * kPi));
}

ComplexMatrix UnitarySpectrum::reconstruct() const {
    ComplexVector d(static_cast<Eigen::Index>(phases.size()));
    for (std::size_t a = 0; a < phases.size(); a++) {
        d(static_cast<Eigen::Index>(a)) = std::polar(1.0, phases[a]);
    }
    return eigenvectors * d.asDiagonal() * eigenvectors.adjoint();
}

UnitarySpectrum eig_unitary(const ComplexMatrix &u, double tol) {
    double defect = unitarity_defect(u);
    if (!(defect <= tol)) {
        throw Error(ErrorCode::NotUnitary, "||u^dag u - I||_max = " + std::to_string(defect));
    }
    // A normal matrix has a diagonal Schur form, so the Schur vectors are an
    // orthonormal eigenbasis even inside degenerate eigenspaces.
    Eigen::ComplexSchur<ComplexMatrix> schur(u);
    const ComplexMatrix &t = schur.matrixT();
    const ComplexMatrix &q = schur.matrixU();
    auto n = static_cast<std::size_t>(u.rows());

    std::vector<double> raw(n);
    for (std::size_t a = 0; a < n; a++) {
        raw[a] = wrap_phase(std::arg(t(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a))));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return raw[x] < raw[y]; });

    UnitarySpectrum out;
    out.dimension = n;
    out.phases.resize(n);
    out.eigenvectors.resize(u.rows(), u.cols());
    for (std::size_t a = 0; a < n; a++) {
        out.phases[a] = raw[order[a]];
        out.eigenvectors.col(static_cast<Eigen::Index>(a)) = q.col(static_cast<Eigen::Index>(order[a]));
    }
    return out;
}

ComplexMatrix random_unitary(std::size_t dim, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto d = static_cast<Eigen::Index>(dim);
    ComplexMatrix g(d, d);
    for (Eigen::Index i = 0; i < d; i++) {
        for (Eigen::Index j = 0; j < d; j++) {
            g(i, j) = cd(normal(rng), normal(rng));
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; j++) {
        cd diag = r(j, j);
        double mag = std::abs(diag);
        q.col(j) *= (mag > 0 ? diag / mag : cd(1.0));
    }
    return q;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ (b * 0xD6E8FEB86659FD93ULL));
    return splitmix64(h ^ (c * 0xA0761D6478BD642FULL));
}

}  // namespace rcphase
