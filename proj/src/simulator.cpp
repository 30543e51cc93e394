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

#include "rcphase/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "rcphase/error.hpp"
#include "rcphase/superop.hpp"

namespace rcphase {

namespace {

std::size_t qubit_stride(std::size_t n, std::size_t q) {
    return std::size_t{1} << (n - 1 - q);
}

template <int K>
void apply_local(DensityMatrix &rho, const std::array<std::size_t, K> &strides, const ComplexMatrix &s,
                 bool hermitian) {
    constexpr int kDim = 1 << K;
    constexpr int kSize = kDim * kDim;
    const std::size_t d = rho.dim();
    std::size_t mask = 0;
    std::array<std::size_t, kDim> off{};
    for (int r = 0; r < kDim; r++) {
        std::size_t o = 0;
        for (int k = 0; k < K; k++) {
            if (r & (1 << (K - 1 - k))) {
                o += strides[k];
            }
        }
        off[r] = o;
    }
    for (int k = 0; k < K; k++) {
        mask |= strides[k];
    }
    std::vector<std::size_t> bases;
    bases.reserve(d >> K);
    for (std::size_t i = 0; i < d; i++) {
        if ((i & mask) == 0) {
            bases.push_back(i);
        }
    }
    // Row-sparse copy; products of permutation gates and damping-type noise are mostly zeros.
    std::array<cd, kSize * kSize> m;
    std::array<int, kSize * kSize> col;
    std::array<int, kSize> nnz{};
    for (int a = 0; a < kSize; a++) {
        for (int b = 0; b < kSize; b++) {
            if (s(a, b) != cd(0.0)) {
                m[a * kSize + nnz[a]] = s(a, b);
                col[a * kSize + nnz[a]] = b;
                nnz[a]++;
            }
        }
    }
    cd *data = rho.matrix.data();
    std::array<cd, kSize> v;
    for (std::size_t j0 : bases) {
        for (std::size_t i0 : bases) {
            if (hermitian && i0 > j0) {
                break;
            }
            for (int r = 0; r < kDim; r++) {
                for (int c = 0; c < kDim; c++) {
                    v[r * kDim + c] = data[(i0 + off[r]) + (j0 + off[c]) * d];
                }
            }
            for (int r = 0; r < kDim; r++) {
                for (int c = 0; c < kDim; c++) {
                    const int a = r * kDim + c;
                    cd acc = 0;
                    for (int x = 0; x < nnz[a]; x++) {
                        acc += m[a * kSize + x] * v[col[a * kSize + x]];
                    }
                    data[(i0 + off[r]) + (j0 + off[c]) * d] = acc;
                }
            }
            if (hermitian && i0 != j0) {
                for (int r = 0; r < kDim; r++) {
                    for (int c = 0; c < kDim; c++) {
                        data[(j0 + off[c]) + (i0 + off[r]) * d] = std::conj(data[(i0 + off[r]) + (j0 + off[c]) * d]);
                    }
                }
            }
        }
    }
}

ComplexMatrix gate_superop(const ComplexMatrix &g) {
    return kron(g, g.conjugate());
}

bool is_identity_matrix(const ComplexMatrix &m) {
    return m.isIdentity(0.0);
}

}  // namespace

DensityMatrix DensityMatrix::from_pure(const ComplexVector &psi) {
    auto d = static_cast<std::size_t>(psi.size());
    std::size_t n = 0;
    while ((std::size_t{1} << n) < d) {
        n++;
    }
    if ((std::size_t{1} << n) != d) {
        throw Error(ErrorCode::DimensionMismatch, "state length is not a power of two");
    }
    return DensityMatrix{n, psi * psi.adjoint()};
}

DensityMatrix DensityMatrix::basis_state(std::size_t n_qubits, std::size_t index) {
    auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
    DensityMatrix rho{n_qubits, ComplexMatrix::Zero(d, d)};
    rho.matrix(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n_qubits) {
    auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
    return DensityMatrix{n_qubits, ComplexMatrix::Identity(d, d) / static_cast<double>(d)};
}

void DensityMatrix::validate(double tol, double positivity_tol) const {
    if (static_cast<std::size_t>(matrix.rows()) != dim() || matrix.rows() != matrix.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "density matrix has wrong shape");
    }
    if (max_abs(matrix - matrix.adjoint()) > tol) {
        throw Error(ErrorCode::NotCPTP, "density matrix is not Hermitian");
    }
    if (std::abs(matrix.trace() - 1.0) > tol) {
        throw Error(ErrorCode::NotCPTP, "density matrix trace deviates from 1");
    }
    ComplexMatrix herm = (matrix + matrix.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -positivity_tol) {
        throw Error(ErrorCode::NotCPTP, "density matrix has a negative eigenvalue");
    }
}

void apply_local_superoperator(DensityMatrix &rho, const std::vector<std::size_t> &qubits, const ComplexMatrix &s,
                               bool hermitian) {
    const std::size_t n = rho.n_qubits;
    for (std::size_t q : qubits) {
        if (q >= n) {
            throw Error(ErrorCode::DimensionMismatch, "qubit index out of range");
        }
    }
    if (qubits.size() == 1 && s.rows() == 4 && s.cols() == 4) {
        apply_local<1>(rho, {qubit_stride(n, qubits[0])}, s, hermitian);
    } else if (qubits.size() == 2 && s.rows() == 16 && s.cols() == 16) {
        apply_local<2>(rho, {qubit_stride(n, qubits[0]), qubit_stride(n, qubits[1])}, s, hermitian);
    } else {
        throw Error(ErrorCode::DimensionMismatch, "local superoperator must act on 1 or 2 qubits");
    }
}

void apply_pauli_diagonal(DensityMatrix &rho, const std::vector<double> &fidelities) {
    const std::size_t n = rho.n_qubits;
    const std::size_t d = rho.dim();
    if (fidelities.size() != d * d) {
        throw Error(ErrorCode::DimensionMismatch, "expected 4^n Pauli fidelities");
    }
    cd *data = rho.matrix.data();
    // Slot (row bit, column bit) = (0,0) I, (0,1) X, (1,0) Y, (1,1) Z; coefficients c_P = Tr(P rho_q) / 2.
    for (std::size_t q = 0; q < n; q++) {
        const std::size_t b = qubit_stride(n, q);
        for (std::size_t j = 0; j < d; j++) {
            if (j & b) {
                continue;
            }
            for (std::size_t i = 0; i < d; i++) {
                if (i & b) {
                    continue;
                }
                cd &r00 = data[i + j * d];
                cd &r01 = data[i + (j + b) * d];
                cd &r10 = data[(i + b) + j * d];
                cd &r11 = data[(i + b) + (j + b) * d];
                cd ci = (r00 + r11) * 0.5;
                cd cx = (r01 + r10) * 0.5;
                cd cy = kI * (r01 - r10) * 0.5;
                cd cz = (r00 - r11) * 0.5;
                r00 = ci;
                r01 = cx;
                r10 = cy;
                r11 = cz;
            }
        }
    }
    std::vector<std::size_t> spread(d, 0);
    for (std::size_t x = 0; x < d; x++) {
        std::size_t s = 0;
        for (std::size_t p = 0; p < n; p++) {
            if (x & (std::size_t{1} << p)) {
                s |= std::size_t{1} << (2 * p);
            }
        }
        spread[x] = s;
    }
    for (std::size_t j = 0; j < d; j++) {
        for (std::size_t i = 0; i < d; i++) {
            data[i + j * d] *= fidelities[(spread[i] << 1) | spread[j]];
        }
    }
    for (std::size_t q = 0; q < n; q++) {
        const std::size_t b = qubit_stride(n, q);
        for (std::size_t j = 0; j < d; j++) {
            if (j & b) {
                continue;
            }
            for (std::size_t i = 0; i < d; i++) {
                if (i & b) {
                    continue;
                }
                cd &r00 = data[i + j * d];
                cd &r01 = data[i + (j + b) * d];
                cd &r10 = data[(i + b) + j * d];
                cd &r11 = data[(i + b) + (j + b) * d];
                cd ci = r00, cx = r01, cy = r10, cz = r11;
                r00 = ci + cz;
                r11 = ci - cz;
                r01 = cx - kI * cy;
                r10 = cx + kI * cy;
            }
        }
    }
}

NoisyEvolver::NoisyEvolver(std::size_t n_qubits, const NoiseModel *noise) : n_(n_qubits), noise_(noise) {
    if (noise_ != nullptr && noise_->n_qubits() != n_qubits) {
        throw Error(ErrorCode::DimensionMismatch, "noise model covers " + std::to_string(noise_->n_qubits()) +
                                                      " qubits, circuit has " + std::to_string(n_qubits));
    }
    if (noise_ != nullptr && noise_->is_noiseless()) {
        noise_ = nullptr;
    }
}

bool NoisyEvolver::supports_pure_states() const {
    return noise_ == nullptr || noise_->is_unitary();
}

const ComplexMatrix &NoisyEvolver::easy_noise_superop(std::size_t q) {
    if (easy_cache_.empty()) {
        easy_cache_.resize(n_);
        for (std::size_t k = 0; k < n_; k++) {
            easy_cache_[k] = superoperator(noise_->easy_channel(k), 2);
        }
    }
    return easy_cache_[q];
}

const ComplexMatrix &NoisyEvolver::hard_noise_superop(std::size_t a, std::size_t b) {
    auto key = std::make_pair(a, b);
    auto it = hard_cache_.find(key);
    if (it == hard_cache_.end()) {
        it = hard_cache_.emplace(key, superoperator(noise_->hard_channel(a, b), 4)).first;
    }
    return it->second;
}

void NoisyEvolver::run_cycle(DensityMatrix &rho, const Cycle &cycle) {
    if (rho.n_qubits != n_) {
        throw Error(ErrorCode::DimensionMismatch, "state and circuit qubit counts differ");
    }
    std::vector<const Gate *> by_qubit(n_, nullptr);
    for (const auto &g : cycle.easy) {
        by_qubit.at(g.qubits.at(0)) = &g;
    }
    for (std::size_t q = 0; q < n_; q++) {
        const Gate *g = by_qubit[q];
        if (noise_ == nullptr) {
            if (g != nullptr) {
                apply_local_superoperator(rho, {q}, gate_superop(g->matrix), hermitian_);
            }
            continue;
        }
        const ComplexMatrix &sn = easy_noise_superop(q);
        if (g != nullptr) {
            apply_local_superoperator(rho, {q}, sn * gate_superop(g->matrix), hermitian_);
        } else if (!is_identity_matrix(sn)) {
            apply_local_superoperator(rho, {q}, sn, hermitian_);
        }
    }
    for (const auto &g : cycle.hard) {
        ComplexMatrix s = gate_superop(g.matrix);
        if (noise_ != nullptr) {
            if (g.arity() == 2) {
                s = hard_noise_superop(g.qubits[0], g.qubits[1]) * s;
            } else {
                s = superoperator(noise_->hard_single(g.qubits[0]), 2) * s;
            }
        }
        apply_local_superoperator(rho, g.qubits, s, hermitian_);
    }
}

void NoisyEvolver::run(DensityMatrix &rho, const Circuit &c) {
    if (c.n_qubits != n_) {
        throw Error(ErrorCode::DimensionMismatch, "circuit qubit count differs from evolver");
    }
    for (const auto &cycle : c.cycles) {
        run_cycle(rho, cycle);
    }
    for (const auto &g : c.terminal) {
        apply_local_superoperator(rho, g.qubits, gate_superop(g.matrix), hermitian_);
    }
}

void NoisyEvolver::run_cycle(ComplexVector &psi, const Cycle &cycle) {
    if (!supports_pure_states()) {
        throw Error(ErrorCode::Unsupported, "pure-state evolution needs unitary noise");
    }
    if (static_cast<std::size_t>(psi.size()) != (std::size_t{1} << n_)) {
        throw Error(ErrorCode::DimensionMismatch, "state and circuit qubit counts differ");
    }
    std::vector<const Gate *> by_qubit(n_, nullptr);
    for (const auto &g : cycle.easy) {
        by_qubit.at(g.qubits.at(0)) = &g;
    }
    for (std::size_t q = 0; q < n_; q++) {
        const Gate *g = by_qubit[q];
        if (g != nullptr) {
            apply_gate(psi, n_, *g);
        }
        if (noise_ != nullptr) {
            const ComplexMatrix &k = noise_->easy_channel(q).kraus_ops[0];
            if (!is_identity_matrix(k)) {
                apply_matrix(psi, n_, {q}, k);
            }
        }
    }
    for (const auto &g : cycle.hard) {
        apply_gate(psi, n_, g);
        if (noise_ == nullptr) {
            continue;
        }
        if (g.arity() == 2 && noise_->has_correlated_hard()) {
            apply_matrix(psi, n_, g.qubits, noise_->hard_channel(g.qubits[0], g.qubits[1]).kraus_ops[0]);
        } else {
            for (std::size_t q : g.qubits) {
                const ComplexMatrix &k = noise_->hard_single(q).kraus_ops[0];
                if (!is_identity_matrix(k)) {
                    apply_matrix(psi, n_, {q}, k);
                }
            }
        }
    }
}

void NoisyEvolver::run(ComplexVector &psi, const Circuit &c) {
    if (c.n_qubits != n_) {
        throw Error(ErrorCode::DimensionMismatch, "circuit qubit count differs from evolver");
    }
    for (const auto &cycle : c.cycles) {
        run_cycle(psi, cycle);
    }
    for (const auto &g : c.terminal) {
        apply_gate(psi, n_, g);
    }
}

DensityMatrix run_circuit(const DensityMatrix &rho0, const Circuit &c, const NoiseModel *noise) {
    if (rho0.n_qubits != c.n_qubits) {
        throw Error(ErrorCode::DimensionMismatch, "state has " + std::to_string(rho0.n_qubits) +
                                                      " qubits, circuit has " + std::to_string(c.n_qubits));
    }
    DensityMatrix rho = rho0;
    NoisyEvolver evolver(c.n_qubits, noise);
    evolver.run(rho, c);
    return rho;
}

double expect_hermitian(const DensityMatrix &rho, const ComplexMatrix &h) {
    if (h.rows() != rho.matrix.rows() || h.cols() != rho.matrix.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "observable and state dimensions differ");
    }
    if (!is_hermitian(h, 1e-9)) {
        throw Error(ErrorCode::NotHermitian, "observable is not Hermitian");
    }
    return h.cwiseProduct(rho.matrix.transpose()).sum().real();
}

namespace {

ComplexVector normalized_with_fixed_phase(ComplexVector v) {
    double norm = v.norm();
    if (norm == 0.0) {
        throw Error(ErrorCode::BadParams, "observable vector is zero");
    }
    v /= norm;
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); i++) {
        if (std::abs(v(i)) > std::abs(v(best)) + 1e-12) {
            best = i;
        }
    }
    v *= std::conj(v(best)) / std::abs(v(best));
    return v;
}

}  // namespace

ObservablePair ObservablePair::make(ComplexVector phi0, ComplexVector target) {
    if (phi0.size() != target.size()) {
        throw Error(ErrorCode::DimensionMismatch, "reference and target have different lengths");
    }
    ObservablePair obs{normalized_with_fixed_phase(std::move(phi0)), normalized_with_fixed_phase(std::move(target))};
    if (std::abs(obs.phi0.dot(obs.target)) > 1e-9) {
        throw Error(ErrorCode::BadParams, "reference and target states are not orthogonal");
    }
    return obs;
}

ComplexMatrix ObservablePair::h_re() const {
    return phi0 * target.adjoint() + target * phi0.adjoint();
}

ComplexMatrix ObservablePair::h_im() const {
    return -kI * (phi0 * target.adjoint() - target * phi0.adjoint());
}

ComplexVector ObservablePair::superposition() const {
    return (phi0 + target) / std::sqrt(2.0);
}

cd expect_complex(const DensityMatrix &rho, const ObservablePair &obs) {
    if (static_cast<Eigen::Index>(rho.dim()) != obs.phi0.size()) {
        throw Error(ErrorCode::DimensionMismatch, "observable and state dimensions differ");
    }
    return 2.0 * obs.target.dot(rho.matrix * obs.phi0);
}

cd expect_complex(const ComplexVector &psi, const ObservablePair &obs) {
    if (psi.size() != obs.phi0.size()) {
        throw Error(ErrorCode::DimensionMismatch, "observable and state dimensions differ");
    }
    return 2.0 * obs.target.dot(psi) * std::conj(obs.phi0.dot(psi));
}

MeasurementBasis MeasurementBasis::from_hermitian(const ComplexMatrix &h) {
    if (!is_hermitian(h, 1e-9)) {
        throw Error(ErrorCode::NotHermitian, "observable is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((h + h.adjoint()) / 2.0);
    const auto &ev = solver.eigenvalues();
    const auto &vecs = solver.eigenvectors();
    MeasurementBasis basis;
    bool has_zero = false;
    Eigen::Index a = 0;
    while (a < ev.size()) {
        Eigen::Index b = a + 1;
        while (b < ev.size() && ev(b) - ev(a) <= 1e-9) {
            b++;
        }
        double value = ev.segment(a, b - a).mean();
        if (std::abs(value) <= 1e-9) {
            has_zero = true;
        } else {
            basis.eigenvalues_.push_back(value);
            basis.projector_vectors_.push_back(vecs.middleCols(a, b - a));
        }
        a = b;
    }
    if (has_zero) {
        basis.eigenvalues_.push_back(0.0);
        basis.projector_vectors_.emplace_back();
    }
    return basis;
}

std::vector<double> MeasurementBasis::probabilities(const DensityMatrix &rho) const {
    std::vector<double> p(eigenvalues_.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < eigenvalues_.size(); k++) {
        const auto &v = projector_vectors_[k];
        if (v.size() == 0) {
            continue;
        }
        p[k] = std::max(0.0, (v.adjoint() * rho.matrix * v).trace().real());
        total += p[k];
    }
    for (std::size_t k = 0; k < eigenvalues_.size(); k++) {
        if (projector_vectors_[k].size() == 0) {
            p[k] = std::max(0.0, rho.trace().real() - total);
        }
    }
    return p;
}

std::vector<double> MeasurementBasis::probabilities(const ComplexVector &psi) const {
    std::vector<double> p(eigenvalues_.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < eigenvalues_.size(); k++) {
        const auto &v = projector_vectors_[k];
        if (v.size() == 0) {
            continue;
        }
        p[k] = (v.adjoint() * psi).squaredNorm();
        total += p[k];
    }
    for (std::size_t k = 0; k < eigenvalues_.size(); k++) {
        if (projector_vectors_[k].size() == 0) {
            p[k] = std::max(0.0, psi.squaredNorm() - total);
        }
    }
    return p;
}

double MeasurementBasis::mean(const std::vector<double> &probabilities) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < eigenvalues_.size(); k++) {
        acc += eigenvalues_[k] * probabilities.at(k);
    }
    return acc;
}

namespace {

/// Sequential-binomial multinomial draw.
std::vector<std::uint64_t> multinomial(std::uint64_t n, const std::vector<double> &p, std::mt19937_64 &rng) {
    std::vector<std::uint64_t> counts(p.size(), 0);
    double mass = 0.0;
    for (double x : p) {
        mass += x;
    }
    std::uint64_t remaining = n;
    for (std::size_t k = 0; k + 1 < p.size() && remaining > 0; k++) {
        double q = mass > 0 ? std::clamp(p[k] / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::uint64_t> draw(remaining, q);
        counts[k] = draw(rng);
        remaining -= counts[k];
        mass -= p[k];
    }
    if (!p.empty()) {
        counts.back() += remaining;
    }
    return counts;
}

}  // namespace

double MeasurementBasis::sample(const std::vector<double> &probabilities, const ShotConfig &sc) const {
    if (sc.shots == 0) {
        return mean(probabilities);
    }
    if (probabilities.size() != eigenvalues_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "probability vector does not match outcome count");
    }
    std::mt19937_64 rng(sc.seed);
    std::vector<std::uint64_t> counts = multinomial(sc.shots, probabilities, rng);
    const std::size_t m = counts.size();
    if (sc.readout_error > 0.0 && m > 1) {
        std::vector<std::uint64_t> recorded(m, 0);
        std::vector<double> uniform_other(m - 1, 1.0 / static_cast<double>(m - 1));
        for (std::size_t k = 0; k < m; k++) {
            std::binomial_distribution<std::uint64_t> flips(counts[k], sc.readout_error);
            std::uint64_t moved = flips(rng);
            recorded[k] += counts[k] - moved;
            std::vector<std::uint64_t> spread = multinomial(moved, uniform_other, rng);
            for (std::size_t o = 0, slot = 0; o < m; o++) {
                if (o != k) {
                    recorded[o] += spread[slot++];
                }
            }
        }
        counts = recorded;
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < m; k++) {
        acc += eigenvalues_[k] * static_cast<double>(counts[k]);
    }
    return acc / static_cast<double>(sc.shots);
}

double sample_hermitian(const DensityMatrix &rho, const ComplexMatrix &h, const ShotConfig &sc) {
    if (sc.shots == 0) {
        return expect_hermitian(rho, h);
    }
    MeasurementBasis basis = MeasurementBasis::from_hermitian(h);
    return basis.sample(basis.probabilities(rho), sc);
}

}  // namespace rcphase
