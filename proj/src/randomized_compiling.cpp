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

#include "rcphase/randomized_compiling.hpp"

#include <array>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "rcphase/error.hpp"
#include "rcphase/simulator.hpp"
#include "rcphase/superop.hpp"

namespace rcphase {

namespace {

/// Images of every Pauli on a gate's support under g P g^dag and g^dag P g.
struct ConjugationTable {
    std::vector<std::uint8_t> fwd, inv;
    std::vector<std::int8_t> fwd_sign, inv_sign;
};

const ConjugationTable &table_for(const Gate &g) {
    static std::mutex mutex;
    static std::map<std::string, ConjugationTable> cache;
    std::ostringstream key;
    key.precision(17);
    key << g.name;
    for (double p : g.params) {
        key << ',' << p;
    }
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key.str());
    if (it != cache.end()) {
        return it->second;
    }
    const std::size_t k = g.arity();
    const std::size_t count = std::size_t{1} << (2 * k);
    ConjugationTable t;
    ComplexMatrix gd = g.matrix.adjoint();
    for (std::size_t i = 0; i < count; i++) {
        PauliString p = PauliString::from_index(k, i);
        PauliString a = conjugate_pauli(g.matrix, p);
        PauliString b = conjugate_pauli(gd, p);
        t.fwd.push_back(static_cast<std::uint8_t>(a.index()));
        t.fwd_sign.push_back(a.phase_exponent() == 2 ? -1 : 1);
        t.inv.push_back(static_cast<std::uint8_t>(b.index()));
        t.inv_sign.push_back(b.phase_exponent() == 2 ? -1 : 1);
    }
    return cache.emplace(key.str(), std::move(t)).first->second;
}

using Letters = std::vector<std::uint8_t>;

/// Conjugates Pauli letters through a Clifford layer in place; returns the sign.
int conjugate_letters(const std::vector<Gate> &layer, Letters &letters, bool inverse) {
    int sign = 1;
    for (const auto &g : layer) {
        const ConjugationTable &t = table_for(g);
        std::size_t idx = 0;
        for (std::size_t q : g.qubits) {
            idx = 4 * idx + letters[q];
        }
        std::size_t img = inverse ? t.inv[idx] : t.fwd[idx];
        sign *= inverse ? t.inv_sign[idx] : t.fwd_sign[idx];
        for (std::size_t j = g.qubits.size(); j-- > 0;) {
            letters[g.qubits[j]] = static_cast<std::uint8_t>(img % 4);
            img /= 4;
        }
    }
    return sign;
}

Letters letters_of(const PauliString &p) {
    Letters out(p.num_qubits());
    for (std::size_t q = 0; q < p.num_qubits(); q++) {
        out[q] = static_cast<std::uint8_t>(p[q]);
    }
    return out;
}

const char *pauli_gate_name(std::uint8_t letter) {
    static const char *names[4] = {"id", "x", "y", "z"};
    return names[letter];
}

void require_small_superop(std::size_t n) {
    if (n > 3) {
        throw Error(ErrorCode::TooLarge, "superoperator construction limited to 3 qubits");
    }
}

ComplexMatrix pauli_superop(const PauliString &p) {
    ComplexMatrix m = p.matrix();
    return kron(m, m.conjugate());
}

}  // namespace

void require_clifford_hard_layers(const Circuit &c) {
    for (std::size_t k = 0; k < c.cycles.size(); k++) {
        for (const auto &g : c.cycles[k].hard) {
            if (!g.clifford) {
                throw Error(ErrorCode::NonCliffordHardLayer,
                            "hard gate '" + g.name + "' in cycle " + std::to_string(k) + " is not Clifford");
            }
        }
    }
}

std::vector<PauliString> draw_twirls(std::size_t n_qubits, std::size_t n_cycles, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<PauliString> out;
    out.reserve(n_cycles);
    for (std::size_t k = 0; k < n_cycles; k++) {
        PauliString t(n_qubits);
        for (std::size_t q = 0; q < n_qubits; q++) {
            t.set(q, static_cast<PauliLetter>(pick(rng)));
        }
        out.push_back(std::move(t));
    }
    return out;
}

Circuit randomize(const Circuit &bare, const std::vector<PauliString> &twirls) {
    validate(bare);
    require_clifford_hard_layers(bare);
    if (!bare.terminal.empty()) {
        throw Error(ErrorCode::BadParams, "circuit already carries a terminal frame");
    }
    if (twirls.size() != bare.cycles.size()) {
        throw Error(ErrorCode::BadParams, "need one twirl per cycle");
    }
    const std::size_t n = bare.n_qubits;
    Circuit out{n, {}, {}};
    out.cycles.reserve(bare.cycles.size());
    Letters carry(n, 0);  // T_{k-1}^c
    for (std::size_t k = 0; k < bare.cycles.size(); k++) {
        const Cycle &cyc = bare.cycles[k];
        if (twirls[k].num_qubits() != n) {
            throw Error(ErrorCode::DimensionMismatch, "twirl has the wrong qubit count");
        }
        Letters t = letters_of(twirls[k]);
        std::vector<const Gate *> by_qubit(n, nullptr);
        for (const auto &g : cyc.easy) {
            by_qubit[g.qubits[0]] = &g;
        }
        Cycle dressed;
        dressed.hard = cyc.hard;
        dressed.easy.reserve(n);
        for (std::size_t q = 0; q < n; q++) {
            if (t[q] == 0 && carry[q] == 0) {
                dressed.easy.push_back(by_qubit[q] != nullptr ? *by_qubit[q] : make_gate("id", {q}));
                continue;
            }
            ComplexMatrix m = pauli_matrix(static_cast<PauliLetter>(t[q]));
            if (by_qubit[q] != nullptr) {
                m = m * by_qubit[q]->matrix;
            }
            m = m * pauli_matrix(static_cast<PauliLetter>(carry[q]));
            dressed.easy.push_back(make_u_gate(q, m));
        }
        out.cycles.push_back(std::move(dressed));
        conjugate_letters(cyc.hard, t, false);
        carry = std::move(t);
    }
    for (std::size_t q = 0; q < n; q++) {
        if (carry[q] != 0) {
            out.terminal.push_back(make_gate(pauli_gate_name(carry[q]), {q}));
        }
    }
    return out;
}

std::vector<Gate> terminal_frame(const std::vector<Gate> &hard, const PauliString &twirl) {
    Letters t = letters_of(twirl);
    conjugate_letters(hard, t, false);
    std::vector<Gate> out;
    for (std::size_t q = 0; q < t.size(); q++) {
        if (t[q] != 0) {
            out.push_back(make_gate(pauli_gate_name(t[q]), {q}));
        }
    }
    return out;
}

RcEnsemble compile(const Circuit &bare, std::size_t n_r, std::uint64_t seed, const CompileOptions &opts) {
    if (n_r < 1) {
        throw Error(ErrorCode::BadParams, "n_r must be at least 1");
    }
    validate(bare);
    require_clifford_hard_layers(bare);
    RcEnsemble e;
    e.bare = bare;
    for (std::size_t r = 0; r < n_r; r++) {
        std::uint64_t s = derive_seed(seed, r);
        std::vector<PauliString> tw =
            opts.identity_twirls ? std::vector<PauliString>(bare.cycles.size(), PauliString(bare.n_qubits))
                                 : draw_twirls(bare.n_qubits, bare.cycles.size(), s);
        e.randomized.push_back(randomize(bare, tw));
        e.seeds.push_back(s);
        e.twirls.push_back(std::move(tw));
    }
    return e;
}

EquivalenceReport verify_equivalence(const RcEnsemble &e) {
    EquivalenceReport rep;
    if (e.randomized.empty()) {
        return rep;
    }
    if (e.bare.n_qubits > 8) {
        throw Error(ErrorCode::TooLarge, "equivalence check limited to 8 qubits");
    }
    ComplexMatrix u = circuit_unitary(e.bare);
    const double d = static_cast<double>(u.rows());
    for (const auto &c : e.randomized) {
        ComplexMatrix v = circuit_unitary(c);
        double overlap = std::abs((v.adjoint() * u).trace()) / d;
        rep.deviations.push_back(1.0 - overlap);
        rep.max_deviation = std::max(rep.max_deviation, std::abs(1.0 - overlap));
    }
    return rep;
}

ComplexMatrix noisy_superoperator(const Circuit &c, const NoiseModel *noise) {
    require_small_superop(c.n_qubits);
    const std::size_t n = c.n_qubits;
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
    NoisyEvolver evolver(n, noise);
    evolver.set_hermitian_states(false);
    for (Eigen::Index i = 0; i < d; i++) {
        for (Eigen::Index j = 0; j < d; j++) {
            DensityMatrix rho{n, ComplexMatrix::Zero(d, d)};
            rho.matrix(i, j) = 1.0;
            evolver.run(rho, c);
            for (Eigen::Index a = 0; a < d; a++) {
                for (Eigen::Index b = 0; b < d; b++) {
                    s(a * d + b, i * d + j) = rho.matrix(a, b);
                }
            }
        }
    }
    return s;
}

ComplexMatrix effective_channel(const RcEnsemble &e, const NoiseModel &noise, bool exhaustive) {
    const std::size_t n = e.bare.n_qubits;
    require_small_superop(n);
    const auto d2 = static_cast<Eigen::Index>(std::size_t{1} << (2 * n));
    ComplexMatrix acc = ComplexMatrix::Zero(d2, d2);
    if (!exhaustive) {
        if (e.randomized.empty()) {
            throw Error(ErrorCode::BadParams, "empty ensemble");
        }
        for (const auto &c : e.randomized) {
            acc += noisy_superoperator(c, &noise);
        }
        return acc / static_cast<double>(e.randomized.size());
    }
    const std::size_t k_cycles = e.bare.cycles.size();
    if (2 * n * k_cycles > 16) {
        throw Error(ErrorCode::TooLarge, "exhaustive twirl needs 4^" + std::to_string(n * k_cycles) + " circuits");
    }
    const std::size_t per_cycle = std::size_t{1} << (2 * n);
    const std::size_t total = std::size_t{1} << (2 * n * k_cycles);
    for (std::size_t idx = 0; idx < total; idx++) {
        std::vector<PauliString> tw;
        std::size_t rest = idx;
        for (std::size_t k = 0; k < k_cycles; k++) {
            tw.push_back(PauliString::from_index(n, rest % per_cycle));
            rest /= per_cycle;
        }
        acc += noisy_superoperator(randomize(e.bare, tw), &noise);
    }
    return acc / static_cast<double>(total);
}

ComplexMatrix twirled_cycle_superoperator(const Cycle &cycle, std::size_t n_qubits, const NoiseModel &noise) {
    require_small_superop(n_qubits);
    Circuit hard_only{n_qubits, {Cycle{{}, cycle.hard}}, {}};
    ComplexMatrix noisy = noisy_superoperator(hard_only, &noise);
    ComplexMatrix g = cycle_unitary(Cycle{{}, cycle.hard}, n_qubits);
    ComplexMatrix lambda = noisy * unitary_superoperator(g.adjoint());
    const std::size_t count = std::size_t{1} << (2 * n_qubits);
    ComplexMatrix twirled = ComplexMatrix::Zero(lambda.rows(), lambda.cols());
    for (std::size_t i = 0; i < count; i++) {
        ComplexMatrix sp = pauli_superop(PauliString::from_index(n_qubits, i));
        twirled += sp * lambda * sp;
    }
    twirled /= static_cast<double>(count);
    return twirled * unitary_superoperator(cycle_unitary(cycle, n_qubits));
}

ComplexMatrix twirled_reference_superoperator(const Circuit &bare, const NoiseModel &noise) {
    require_small_superop(bare.n_qubits);
    const auto d2 = static_cast<Eigen::Index>(std::size_t{1} << (2 * bare.n_qubits));
    ComplexMatrix s = ComplexMatrix::Identity(d2, d2);
    for (const auto &cycle : bare.cycles) {
        s = twirled_cycle_superoperator(cycle, bare.n_qubits, noise) * s;
    }
    return s;
}

std::vector<double> twirled_cycle_fidelities(const Cycle &cycle, std::size_t n, const NoiseModel &noise) {
    if (noise.n_qubits() != n) {
        throw Error(ErrorCode::DimensionMismatch, "noise model qubit count differs");
    }
    for (const auto &g : cycle.hard) {
        if (!g.clifford) {
            throw Error(ErrorCode::NonCliffordHardLayer, "hard gate '" + g.name + "' is not Clifford");
        }
    }
    // Sparse columns of the easy-noise transfer matrices: column Q -> {(R, value)}.
    std::vector<std::array<std::vector<std::pair<std::uint8_t, double>>, 4>> easy_cols(n);
    for (std::size_t q = 0; q < n; q++) {
        Eigen::MatrixXd r = pauli_transfer_matrix(noise.easy_channel(q));
        for (int col = 0; col < 4; col++) {
            for (int row = 0; row < 4; row++) {
                if (std::abs(r(row, col)) > 1e-15) {
                    easy_cols[q][static_cast<std::size_t>(col)].emplace_back(static_cast<std::uint8_t>(row),
                                                                              r(row, col));
                }
            }
        }
    }
    std::vector<Eigen::MatrixXd> hard_ptm;
    std::vector<bool> in_hard(n, false);
    for (const auto &g : cycle.hard) {
        if (g.arity() == 2) {
            hard_ptm.push_back(pauli_transfer_matrix(noise.hard_channel(g.qubits[0], g.qubits[1])));
        } else {
            hard_ptm.push_back(pauli_transfer_matrix(noise.hard_single(g.qubits[0])));
        }
        for (std::size_t q : g.qubits) {
            in_hard[q] = true;
        }
    }
    const std::size_t count = std::size_t{1} << (2 * n);
    std::vector<double> f(count, 0.0);
    Letters p(n), qv(n), r(n);
    for (std::size_t pi = 0; pi < count; pi++) {
        std::size_t rest = pi;
        for (std::size_t q = n; q-- > 0;) {
            p[q] = static_cast<std::uint8_t>(rest % 4);
            rest /= 4;
        }
        qv = p;
        const int sign_q = conjugate_letters(cycle.hard, qv, true);
        double total = 0.0;
        std::function<void(std::size_t, double)> expand = [&](std::size_t q, double coef) {
            if (q == n) {
                Letters rp = r;
                double term = coef * conjugate_letters(cycle.hard, rp, false);
                for (std::size_t gi = 0; gi < cycle.hard.size() && term != 0.0; gi++) {
                    std::size_t row = 0, col = 0;
                    for (std::size_t t : cycle.hard[gi].qubits) {
                        row = 4 * row + p[t];
                        col = 4 * col + rp[t];
                    }
                    term *= hard_ptm[gi](static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
                }
                total += term;
                return;
            }
            for (const auto &[letter, value] : easy_cols[q][qv[q]]) {
                // Qubits outside the hard layer see no further noise, so the letter must already match.
                if (!in_hard[q] && letter != p[q]) {
                    continue;
                }
                r[q] = letter;
                expand(q + 1, coef * value);
            }
        };
        expand(0, static_cast<double>(sign_q));
        f[pi] = total;
    }
    return f;
}

}  // namespace rcphase
