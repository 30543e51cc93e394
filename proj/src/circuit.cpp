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

#include "rcphase/circuit.hpp"

#include <cmath>
#include <set>

#include "rcphase/error.hpp"

namespace rcphase {

namespace {

ComplexMatrix mat2(cd a, cd b, cd c, cd d) {
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

ComplexMatrix rotation(PauliLetter axis, double angle) {
    // exp(-i angle P / 2)
    return std::cos(angle / 2) * ComplexMatrix::Identity(2, 2) - kI * std::sin(angle / 2) * pauli_matrix(axis);
}

void expect_params(const std::string &name, const std::vector<double> &params, std::size_t count) {
    if (params.size() != count) {
        throw Error(ErrorCode::BadParams, "gate '" + name + "' takes " + std::to_string(count) + " parameter(s), got " +
                                              std::to_string(params.size()));
    }
}

}  // namespace

bool Gate::operator==(const Gate &other) const {
    return name == other.name && qubits == other.qubits && params == other.params;
}

ComplexMatrix phased_coupler_matrix(double theta, double phi) {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = 1;
    m(1, 1) = std::cos(theta);
    m(1, 2) = -kI * std::sin(theta);
    m(2, 1) = -kI * std::sin(theta);
    m(2, 2) = std::cos(theta);
    m(3, 3) = std::polar(1.0, -phi);
    return m;
}

Gate make_gate(const std::string &name, std::vector<std::size_t> qubits, std::vector<double> params) {
    Gate g;
    g.name = name;
    g.qubits = std::move(qubits);
    g.params = std::move(params);
    std::size_t want_qubits = 1;
    const double r = 1 / std::sqrt(2.0);
    if (name == "id") {
        expect_params(name, g.params, 0);
        g.matrix = ComplexMatrix::Identity(2, 2);
    } else if (name == "x" || name == "y" || name == "z") {
        expect_params(name, g.params, 0);
        g.matrix = pauli_matrix(name == "x" ? PauliLetter::X : name == "y" ? PauliLetter::Y : PauliLetter::Z);
    } else if (name == "h") {
        expect_params(name, g.params, 0);
        g.matrix = mat2(r, r, r, -r);
    } else if (name == "s") {
        expect_params(name, g.params, 0);
        g.matrix = mat2(1, 0, 0, kI);
    } else if (name == "sdg") {
        expect_params(name, g.params, 0);
        g.matrix = mat2(1, 0, 0, -kI);
    } else if (name == "rx" || name == "ry" || name == "rz") {
        expect_params(name, g.params, 1);
        PauliLetter axis = name == "rx" ? PauliLetter::X : name == "ry" ? PauliLetter::Y : PauliLetter::Z;
        g.matrix = rotation(axis, g.params[0]);
    } else if (name == "u") {
        expect_params(name, g.params, 8);
        const auto &p = g.params;
        g.matrix = mat2(cd(p[0], p[1]), cd(p[2], p[3]), cd(p[4], p[5]), cd(p[6], p[7]));
        if (!is_unitary(g.matrix, 1e-9)) {
            throw Error(ErrorCode::BadParams, "'u' gate matrix is not unitary");
        }
    } else {
        want_qubits = 2;
        g.matrix = ComplexMatrix::Zero(4, 4);
        if (name == "cz") {
            expect_params(name, g.params, 0);
            g.matrix.diagonal() << 1, 1, 1, -1;
        } else if (name == "cnot") {
            expect_params(name, g.params, 0);
            g.matrix(0, 0) = g.matrix(1, 1) = g.matrix(2, 3) = g.matrix(3, 2) = 1;
        } else if (name == "swap") {
            expect_params(name, g.params, 0);
            g.matrix(0, 0) = g.matrix(1, 2) = g.matrix(2, 1) = g.matrix(3, 3) = 1;
        } else if (name == "iswap") {
            expect_params(name, g.params, 0);
            g.matrix(0, 0) = g.matrix(3, 3) = 1;
            g.matrix(1, 2) = g.matrix(2, 1) = kI;
        } else if (name == "phased_coupler") {
            expect_params(name, g.params, 2);
            g.matrix = phased_coupler_matrix(g.params[0], g.params[1]);
        } else {
            throw Error(ErrorCode::BadParams, "unknown gate '" + name + "'");
        }
    }
    if (g.qubits.size() != want_qubits) {
        throw Error(ErrorCode::BadParams, "gate '" + name + "' acts on " + std::to_string(want_qubits) + " qubit(s)");
    }
    if (want_qubits == 2 && g.qubits[0] == g.qubits[1]) {
        throw Error(ErrorCode::BadParams, "gate '" + name + "' has repeated qubit");
    }
    g.clifford = is_clifford(g.matrix);
    return g;
}

Gate make_u_gate(std::size_t qubit, const ComplexMatrix &m) {
    return make_gate("u", {qubit},
                     {m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag(), m(1, 0).real(), m(1, 0).imag(),
                      m(1, 1).real(), m(1, 1).imag()});
}

void validate(const Circuit &c) {
    auto check_gate = [&](const Gate &g) {
        for (auto q : g.qubits) {
            if (q >= c.n_qubits) {
                throw Error(ErrorCode::BadParams, "gate '" + g.name + "' qubit " + std::to_string(q) +
                                                      " >= n_qubits " + std::to_string(c.n_qubits));
            }
        }
    };
    auto check_single_layer = [&](const std::vector<Gate> &layer, const char *what) {
        std::set<std::size_t> used;
        for (const auto &g : layer) {
            check_gate(g);
            if (g.arity() != 1) {
                throw Error(ErrorCode::BadParams, std::string(what) + " layer holds multi-qubit gate '" + g.name + "'");
            }
            if (!used.insert(g.qubits[0]).second) {
                throw Error(ErrorCode::BadParams, std::string(what) + " layer uses qubit twice");
            }
        }
    };
    for (std::size_t k = 0; k < c.cycles.size(); k++) {
        const auto &cy = c.cycles[k];
        check_single_layer(cy.easy, "easy");
        std::set<std::size_t> used;
        for (const auto &g : cy.hard) {
            check_gate(g);
            if (g.arity() != 2) {
                throw Error(ErrorCode::BadParams, "hard layer holds single-qubit gate '" + g.name + "'");
            }
            if (!g.clifford) {
                throw Error(ErrorCode::NonCliffordHardLayer, "hard gate '" + g.name + "' in cycle " + std::to_string(k) +
                                                      " is not Clifford");
            }
            for (auto q : g.qubits) {
                if (!used.insert(q).second) {
                    throw Error(ErrorCode::BadParams, "hard layer uses qubit twice");
                }
            }
        }
    }
    check_single_layer(c.terminal, "terminal");
}

void apply_matrix(ComplexVector &psi, std::size_t n_qubits, const std::vector<std::size_t> &qubits,
                  const ComplexMatrix &m) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    cd *data = psi.data();
    if (qubits.size() == 1) {
        const std::size_t stride = std::size_t{1} << (n_qubits - 1 - qubits[0]);
        const cd m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; i++) {
                cd a = data[i];
                cd b = data[i + stride];
                data[i] = m00 * a + m01 * b;
                data[i + stride] = m10 * a + m11 * b;
            }
        }
        return;
    }
    if (qubits.size() == 2) {
        const std::size_t sa = std::size_t{1} << (n_qubits - 1 - qubits[0]);
        const std::size_t sb = std::size_t{1} << (n_qubits - 1 - qubits[1]);
        const std::size_t offs[4] = {0, sb, sa, sa + sb};
        for (std::size_t i = 0; i < dim; i++) {
            if (i & (sa | sb)) {
                continue;
            }
            cd v[4];
            for (int k = 0; k < 4; k++) {
                v[k] = data[i + offs[k]];
            }
            for (int r = 0; r < 4; r++) {
                cd acc = 0;
                for (int k = 0; k < 4; k++) {
                    acc += m(r, k) * v[k];
                }
                data[i + offs[r]] = acc;
            }
        }
        return;
    }
    throw Error(ErrorCode::BadParams, "apply_matrix supports 1 or 2 target qubits");
}

void apply_gate(ComplexVector &psi, std::size_t n_qubits, const Gate &g) {
    apply_matrix(psi, n_qubits, g.qubits, g.matrix);
}

namespace {

void apply_layer_to_columns(ComplexMatrix &u, std::size_t n, const std::vector<Gate> &layer) {
    for (Eigen::Index col = 0; col < u.cols(); col++) {
        ComplexVector v = u.col(col);
        for (const auto &g : layer) {
            apply_gate(v, n, g);
        }
        u.col(col) = v;
    }
}

void require_small(std::size_t n) {
    if (n > kMaxUnitaryQubits) {
        throw Error(ErrorCode::TooLarge, std::to_string(n) + " qubits exceeds the dense-unitary limit");
    }
}

}  // namespace

ComplexMatrix cycle_unitary(const Cycle &cycle, std::size_t n_qubits) {
    require_small(n_qubits);
    auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    apply_layer_to_columns(u, n_qubits, cycle.easy);
    apply_layer_to_columns(u, n_qubits, cycle.hard);
    return u;
}

ComplexMatrix circuit_unitary(const Circuit &c) {
    require_small(c.n_qubits);
    auto dim = static_cast<Eigen::Index>(std::size_t{1} << c.n_qubits);
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    for (Eigen::Index col = 0; col < dim; col++) {
        ComplexVector v = u.col(col);
        for (const auto &cy : c.cycles) {
            for (const auto &g : cy.easy) {
                apply_gate(v, c.n_qubits, g);
            }
            for (const auto &g : cy.hard) {
                apply_gate(v, c.n_qubits, g);
            }
        }
        for (const auto &g : c.terminal) {
            apply_gate(v, c.n_qubits, g);
        }
        u.col(col) = v;
    }
    return u;
}

Circuit repeat(const Circuit &c, std::size_t l) {
    if (!c.terminal.empty()) {
        throw Error(ErrorCode::BadParams, "cannot repeat a circuit carrying a terminal frame");
    }
    Circuit out;
    out.n_qubits = c.n_qubits;
    out.cycles.reserve(c.cycles.size() * l);
    for (std::size_t i = 0; i < l; i++) {
        out.cycles.insert(out.cycles.end(), c.cycles.begin(), c.cycles.end());
    }
    return out;
}

Circuit build_order_finding_circuit(int x, int modulus) {
    if (x != 4 || modulus != 255) {
        throw Error(ErrorCode::Unsupported, "only x = 4, modulus = 255 is supported");
    }
    // Multiplying by 4 mod 255 rotates the 8-bit register left by two bits, i.e.
    // the content of qubit q moves to qubit q - 2 (mod 8). On each residue class
    // of qubits the 4-cycle is the product of two reflections.
    Circuit c;
    c.n_qubits = 8;
    Cycle first;
    first.hard = {make_gate("swap", {2, 6}), make_gate("swap", {3, 7})};
    Cycle second;
    second.hard = {make_gate("swap", {0, 6}), make_gate("swap", {2, 4}), make_gate("swap", {1, 7}),
                   make_gate("swap", {3, 5})};
    c.cycles = {first, second};
    return c;
}

Circuit build_floquet_circuit(std::size_t n, const std::vector<double> &single_angles,
                              const std::vector<CouplerParams> &couplers) {
    if (n < 2) {
        throw Error(ErrorCode::BadParams, "Floquet circuit needs n >= 2");
    }
    if (single_angles.size() != n || couplers.size() != n - 1) {
        throw Error(ErrorCode::BadParams, "expected " + std::to_string(n) + " angles and " + std::to_string(n - 1) +
                                              " couplers");
    }
    std::vector<std::pair<std::size_t, std::size_t>> odd, even;
    for (std::size_t q = 0; q + 1 < n; q += 2) {
        odd.emplace_back(q, q + 1);
    }
    for (std::size_t q = 1; q + 1 < n; q += 2) {
        even.emplace_back(q, q + 1);
    }
    std::vector<CouplerParams> odd_params(couplers.begin(), couplers.begin() + static_cast<long>(odd.size()));
    std::vector<CouplerParams> even_params(couplers.begin() + static_cast<long>(odd.size()), couplers.end());

    // Each coupler is exp(-i theta (XX+YY)/2) * exp(-i phi |11><11|). The
    // conditional phase is CNOT.Rz(phi/2).CNOT up to Rz(-phi/2) on both qubits;
    // the hopping term is CNOT.(Rx(theta) x Rz(theta)).CNOT in the frame where
    // Rx(pi/2) maps ZZ to YY. All local Z corrections are merged into the site
    // rotations at the start of the period, which keeps the period
    // number-conserving.
    std::vector<double> z_angle = single_angles;
    auto add_corrections = [&](const auto &bonds, const auto &params) {
        for (std::size_t b = 0; b < bonds.size(); b++) {
            z_angle[bonds[b].first] -= params[b].phi / 2;
            z_angle[bonds[b].second] -= params[b].phi / 2;
        }
    };
    add_corrections(odd, odd_params);
    add_corrections(even, even_params);

    auto cnot_layer = [](const auto &bonds) {
        std::vector<Gate> layer;
        for (const auto &[a, b] : bonds) {
            layer.push_back(make_gate("cnot", {a, b}));
        }
        return layer;
    };
    auto phase_layer = [](const auto &bonds, const auto &params) {
        std::vector<Gate> layer;
        for (std::size_t b = 0; b < bonds.size(); b++) {
            layer.push_back(make_gate("rz", {bonds[b].second}, {params[b].phi / 2}));
        }
        return layer;
    };
    auto hop_layer = [](const auto &bonds, const auto &params) {
        std::vector<Gate> layer;
        for (std::size_t b = 0; b < bonds.size(); b++) {
            layer.push_back(make_gate("rx", {bonds[b].first}, {params[b].theta}));
            layer.push_back(make_gate("rz", {bonds[b].second}, {params[b].theta}));
        }
        return layer;
    };
    auto frame_layer = [n](double angle) {
        std::vector<Gate> layer;
        for (std::size_t q = 0; q < n; q++) {
            layer.push_back(make_gate("rx", {q}, {angle}));
        }
        return layer;
    };
    std::vector<Gate> site;
    for (std::size_t q = 0; q < n; q++) {
        site.push_back(make_gate("rz", {q}, {z_angle[q]}));
    }

    std::vector<Cycle> cycles = {
        {site, cnot_layer(odd)},
        {phase_layer(odd, odd_params), cnot_layer(odd)},
        {{}, cnot_layer(even)},
        {phase_layer(even, even_params), cnot_layer(even)},
        {frame_layer(-kPi / 2), cnot_layer(odd)},
        {hop_layer(odd, odd_params), cnot_layer(odd)},
        {{}, cnot_layer(even)},
        {hop_layer(even, even_params), cnot_layer(even)},
        {frame_layer(kPi / 2), {}},
    };
    Circuit c;
    c.n_qubits = n;
    for (auto &cy : cycles) {
        if (!cy.easy.empty() || !cy.hard.empty()) {
            c.cycles.push_back(std::move(cy));
        }
    }
    validate(c);
    return c;
}

PauliString conjugate_through_layer(const std::vector<Gate> &layer, const PauliString &p) {
    PauliString out = p;
    int phase = p.phase_exponent();
    for (const auto &g : layer) {
        PauliString sub = p.restrict_to(g.qubits);
        PauliString img = conjugate_pauli(g.matrix, sub);
        for (std::size_t k = 0; k < g.qubits.size(); k++) {
            out.set(g.qubits[k], img[k]);
        }
        phase += img.phase_exponent();
    }
    out.set_phase_exponent(phase);
    return out;
}

}  // namespace rcphase
