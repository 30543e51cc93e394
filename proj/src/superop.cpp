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

#include "rcphase/superop.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "rcphase/error.hpp"

namespace rcphase {

double KrausChannel::cptp_defect() const {
    auto d = static_cast<Eigen::Index>(dim());
    ComplexMatrix acc = ComplexMatrix::Zero(d, d);
    for (const auto &e : kraus_ops) {
        if (e.rows() != d || e.cols() != d) {
            return std::numeric_limits<double>::infinity();
        }
        acc += e.adjoint() * e;
    }
    return max_abs(acc - ComplexMatrix::Identity(d, d));
}

KrausChannel KrausChannel::identity(std::size_t arity) {
    auto d = static_cast<Eigen::Index>(std::size_t{1} << arity);
    return KrausChannel{arity, {ComplexMatrix::Identity(d, d)}};
}

KrausChannel KrausChannel::unitary(const ComplexMatrix &u) {
    std::size_t arity = 0;
    while ((Eigen::Index{1} << arity) < u.rows()) {
        arity++;
    }
    return KrausChannel{arity, {u}};
}

void validate_channel(const KrausChannel &ch, double tol) {
    if (ch.kraus_ops.empty()) {
        throw Error(ErrorCode::NotCPTP, "channel has no Kraus operators");
    }
    for (const auto &e : ch.kraus_ops) {
        if (static_cast<std::size_t>(e.rows()) != ch.dim() || e.rows() != e.cols()) {
            throw Error(ErrorCode::DimensionMismatch, "Kraus operator does not match channel arity");
        }
    }
    double defect = ch.cptp_defect();
    if (!(defect <= tol)) {
        throw Error(ErrorCode::NotCPTP, "||sum E^dag E - I||_max = " + std::to_string(defect));
    }
}

ComplexMatrix superoperator(const KrausChannel &channel, std::size_t dim) {
    if (channel.dim() != dim) {
        throw Error(ErrorCode::DimensionMismatch, "channel dimension " + std::to_string(channel.dim()) +
                                                      " != " + std::to_string(dim));
    }
    validate_channel(channel);
    auto d2 = static_cast<Eigen::Index>(dim * dim);
    ComplexMatrix s = ComplexMatrix::Zero(d2, d2);
    for (const auto &e : channel.kraus_ops) {
        s += kron(e, e.conjugate());
    }
    return s;
}

ComplexMatrix unitary_superoperator(const ComplexMatrix &u) {
    return kron(u, u.conjugate());
}

ComplexMatrix apply_superoperator(const ComplexMatrix &s, const ComplexMatrix &rho) {
    Eigen::Index d = rho.rows();
    ComplexVector v(d * d);
    for (Eigen::Index i = 0; i < d; i++) {
        for (Eigen::Index j = 0; j < d; j++) {
            v(i * d + j) = rho(i, j);
        }
    }
    ComplexVector w = s * v;
    ComplexMatrix out(d, d);
    for (Eigen::Index i = 0; i < d; i++) {
        for (Eigen::Index j = 0; j < d; j++) {
            out(i, j) = w(i * d + j);
        }
    }
    return out;
}

std::vector<double> superop_eigenphase_shift(const ComplexMatrix &u, const KrausChannel &noise, double overlap_tol) {
    UnitarySpectrum spec = eig_unitary(u);
    auto d = static_cast<Eigen::Index>(spec.dimension);
    auto d2 = d * d;

    // Ideal eigen-operators |a><b| vectorize to a (x) conj(b) with phase lambda_a - lambda_b.
    struct Cluster {
        double phase;
        std::vector<Eigen::Index> members;
    };
    std::vector<Cluster> clusters;
    ComplexMatrix ideal_vecs(d2, d2);
    std::vector<double> ideal_phase(static_cast<std::size_t>(d2));
    for (Eigen::Index a = 0; a < d; a++) {
        for (Eigen::Index b = 0; b < d; b++) {
            Eigen::Index col = a * d + b;
            ideal_vecs.col(col) = kron(spec.eigenvectors.col(a), spec.eigenvectors.col(b).conjugate());
            double w = wrap_phase(spec.phases[static_cast<std::size_t>(a)] - spec.phases[static_cast<std::size_t>(b)]);
            ideal_phase[static_cast<std::size_t>(col)] = w;
            bool placed = false;
            for (auto &c : clusters) {
                if (circular_distance(c.phase, w) <= 1e-7) {
                    c.members.push_back(col);
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                clusters.push_back({w, {col}});
            }
        }
    }

    ComplexMatrix noisy = superoperator(noise, static_cast<std::size_t>(d)) * unitary_superoperator(u);
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(noisy);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::DegeneracyAmbiguous, "noisy superoperator eigendecomposition failed");
    }
    const ComplexVector &mu = solver.eigenvalues();
    const ComplexMatrix &vecs = solver.eigenvectors();

    std::vector<std::size_t> counts(clusters.size(), 0);
    std::vector<double> shifts(static_cast<std::size_t>(d2));
    for (Eigen::Index m = 0; m < d2; m++) {
        ComplexVector v = vecs.col(m).normalized();
        double best = -1.0;
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < clusters.size(); c++) {
            double w = 0.0;
            for (auto col : clusters[c].members) {
                w += std::norm(ideal_vecs.col(col).dot(v));
            }
            if (w > best) {
                best = w;
                best_c = c;
            }
        }
        if (best < overlap_tol) {
            throw Error(ErrorCode::DegeneracyAmbiguous,
                        "noisy eigenvector " + std::to_string(m) + " has max eigenspace overlap " + std::to_string(best));
        }
        counts[best_c]++;
        shifts[static_cast<std::size_t>(m)] =
            std::abs(mu(m)) < 1e-300 ? 0.0 : circular_distance(std::arg(mu(m)), clusters[best_c].phase);
    }
    for (std::size_t c = 0; c < clusters.size(); c++) {
        if (counts[c] != clusters[c].members.size()) {
            throw Error(ErrorCode::DegeneracyAmbiguous, "eigenvalue matching is not one-to-one");
        }
    }
    return shifts;
}

}  // namespace rcphase
