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

#include "rcphase/pauli.hpp"

#include <cctype>
#include <cmath>

#include "rcphase/error.hpp"

namespace rcphase {

namespace {

// (a, b) -> (letter of a*b, extra phase exponent)
struct LetterProduct {
    PauliLetter letter;
    int phase;
};

constexpr LetterProduct kProduct[4][4] = {
    {{PauliLetter::I, 0}, {PauliLetter::X, 0}, {PauliLetter::Y, 0}, {PauliLetter::Z, 0}},
    {{PauliLetter::X, 0}, {PauliLetter::I, 0}, {PauliLetter::Z, 1}, {PauliLetter::Y, 3}},
    {{PauliLetter::Y, 0}, {PauliLetter::Z, 3}, {PauliLetter::I, 0}, {PauliLetter::X, 1}},
    {{PauliLetter::Z, 0}, {PauliLetter::Y, 1}, {PauliLetter::X, 3}, {PauliLetter::I, 0}},
};

bool x_bit(PauliLetter l) {
    return l == PauliLetter::X || l == PauliLetter::Y;
}

PauliLetter letter_from_bits(bool x, bool z) {
    if (x) {
        return z ? PauliLetter::Y : PauliLetter::X;
    }
    return z ? PauliLetter::Z : PauliLetter::I;
}

}  // namespace

PauliString::PauliString(std::size_t n) : letters_(n, PauliLetter::I) {
}

PauliString::PauliString(std::vector<PauliLetter> letters, int phase_exponent) : letters_(std::move(letters)) {
    set_phase_exponent(phase_exponent);
}

PauliString PauliString::parse(std::string_view text) {
    int phase = 0;
    std::vector<PauliLetter> letters;
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            pos++;
        }
    };
    skip_space();
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        phase += text[pos] == '-' ? 2 : 0;
        pos++;
    }
    skip_space();
    if (pos < text.size() && text[pos] == 'i') {
        phase += 1;
        pos++;
    }
    for (; pos < text.size(); pos++) {
        char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[pos])));
        switch (c) {
            case 'I': case '_': letters.push_back(PauliLetter::I); break;
            case 'X': letters.push_back(PauliLetter::X); break;
            case 'Y': letters.push_back(PauliLetter::Y); break;
            case 'Z': letters.push_back(PauliLetter::Z); break;
            case ' ': break;
            default:
                throw Error(ErrorCode::ParseError, "bad Pauli character '" + std::string(1, text[pos]) + "'");
        }
    }
    return PauliString(std::move(letters), phase);
}

PauliString PauliString::from_index(std::size_t n, std::size_t index) {
    PauliString p(n);
    for (std::size_t q = n; q-- > 0;) {
        p.letters_[q] = static_cast<PauliLetter>(index & 3u);
        index >>= 2;
    }
    return p;
}

cd PauliString::phase() const {
    static const cd table[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
    return table[phase_];
}

std::size_t PauliString::index() const {
    std::size_t idx = 0;
    for (auto l : letters_) {
        idx = idx * 4 + static_cast<std::size_t>(l);
    }
    return idx;
}

std::size_t PauliString::weight() const {
    std::size_t w = 0;
    for (auto l : letters_) {
        w += l != PauliLetter::I;
    }
    return w;
}

bool PauliString::is_identity_word() const {
    return weight() == 0;
}

PauliString PauliString::operator*(const PauliString &rhs) const {
    if (rhs.num_qubits() != num_qubits()) {
        throw Error(ErrorCode::DimensionMismatch, "Pauli product of different widths");
    }
    PauliString out(num_qubits());
    int phase = phase_ + rhs.phase_;
    for (std::size_t q = 0; q < num_qubits(); q++) {
        const auto &p = kProduct[static_cast<int>(letters_[q])][static_cast<int>(rhs.letters_[q])];
        out.letters_[q] = p.letter;
        phase += p.phase;
    }
    out.set_phase_exponent(phase);
    return out;
}

PauliString PauliString::inverse() const {
    PauliString out = *this;
    out.set_phase_exponent(-phase_);
    return out;
}

PauliString PauliString::restrict_to(const std::vector<std::size_t> &qubits) const {
    PauliString out(qubits.size());
    for (std::size_t k = 0; k < qubits.size(); k++) {
        out.letters_[k] = letters_.at(qubits[k]);
    }
    return out;
}

ComplexMatrix pauli_matrix(PauliLetter l) {
    ComplexMatrix m(2, 2);
    switch (l) {
        case PauliLetter::I: m << 1, 0, 0, 1; break;
        case PauliLetter::X: m << 0, 1, 1, 0; break;
        case PauliLetter::Y: m << 0, -kI, kI, 0; break;
        case PauliLetter::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

ComplexMatrix PauliString::matrix() const {
    std::size_t n = num_qubits();
    auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    std::size_t xmask = 0;
    for (std::size_t q = 0; q < n; q++) {
        if (x_bit(letters_[q])) {
            xmask |= std::size_t{1} << (n - 1 - q);
        }
    }
    for (std::size_t row = 0; row < static_cast<std::size_t>(dim); row++) {
        cd v = phase();
        for (std::size_t q = 0; q < n; q++) {
            bool bit = (row >> (n - 1 - q)) & 1u;
            switch (letters_[q]) {
                case PauliLetter::I: case PauliLetter::X: break;
                case PauliLetter::Y: v *= bit ? kI : -kI; break;
                case PauliLetter::Z: v *= bit ? -1.0 : 1.0; break;
            }
        }
        m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(row ^ xmask)) = v;
    }
    return m;
}

std::string PauliString::str() const {
    static const char *prefix[4] = {"+", "+i", "-", "-i"};
    std::string s = prefix[phase_];
    for (auto l : letters_) {
        s += "IXYZ"[static_cast<int>(l)];
    }
    return s;
}

PauliString conjugate_pauli(const ComplexMatrix &c, const PauliString &p, double tol) {
    std::size_t n = p.num_qubits();
    auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    if (c.rows() != dim || c.cols() != dim) {
        throw Error(ErrorCode::DimensionMismatch, "conjugating matrix does not match Pauli width");
    }
    ComplexMatrix m = c * p.matrix() * c.adjoint();

    // A Pauli word has one unit-modulus entry per row at column row ^ xmask.
    Eigen::Index xcol = 0;
    m.row(0).cwiseAbs().maxCoeff(&xcol);
    auto xmask = static_cast<std::size_t>(xcol);
    cd ref = m(0, xcol);
    if (std::abs(ref) < 0.5) {
        throw Error(ErrorCode::NotPauliImage, "conjugate has no unit entry in row 0");
    }
    std::vector<PauliLetter> letters(n);
    for (std::size_t q = 0; q < n; q++) {
        std::size_t bit = std::size_t{1} << (n - 1 - q);
        cd ratio = m(static_cast<Eigen::Index>(bit), static_cast<Eigen::Index>(bit ^ xmask)) / ref;
        // Row ratio is -1 for Z and Y, +1 for I and X.
        letters[q] = letter_from_bits((xmask & bit) != 0, ratio.real() < 0);
    }
    PauliString q(std::move(letters));
    ComplexMatrix qm = q.matrix();
    cd coeff = (qm.adjoint() * m).trace() / static_cast<double>(dim);
    if (max_abs(m - coeff * qm) > tol) {
        throw Error(ErrorCode::NotPauliImage, "c p c^dag is not proportional to " + q.str());
    }
    int k = -1;
    const cd phases[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
    for (int j = 0; j < 4; j++) {
        if (std::abs(coeff - phases[j]) <= tol) {
            k = j;
        }
    }
    if (k < 0) {
        throw Error(ErrorCode::NotPauliImage, "conjugate has a phase outside {+-1, +-i}");
    }
    q.set_phase_exponent(k);
    return q;
}

bool is_clifford(const ComplexMatrix &u, double tol) {
    auto dim = static_cast<std::size_t>(u.rows());
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) {
        n++;
    }
    if ((std::size_t{1} << n) != dim || u.rows() != u.cols()) {
        return false;
    }
    for (std::size_t q = 0; q < n; q++) {
        for (auto l : {PauliLetter::X, PauliLetter::Z}) {
            PauliString p(n);
            p.set(q, l);
            try {
                conjugate_pauli(u, p, tol);
            } catch (const Error &) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace rcphase
