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


// Test-side reference computations, written independently of the library code paths.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

inline Mat pauli(char c) {
    Mat m(2, 2);
    switch (c) {
        case 'X':
            m << 0, 1, 1, 0;
            break;
        case 'Y':
            m << 0, cd(0, -1), cd(0, 1), 0;
            break;
        case 'Z':
            m << 1, 0, 0, -1;
            break;
        default:
            m << 1, 0, 0, 1;
    }
    return m;
}

/// Elementwise definition (a (x) b)[i*rb + k, j*cb + l] = a[i,j] b[k,l].
inline Mat kron(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            for (Eigen::Index k = 0; k < b.rows(); k++) {
                for (Eigen::Index l = 0; l < b.cols(); l++) {
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

inline Mat pauli_word(const std::string &w) {
    Mat m = Mat::Identity(1, 1);
    for (char c : w) {
        m = kron(m, pauli(c));
    }
    return m;
}

inline Mat rx(double t) {
    Mat m(2, 2);
    m << std::cos(t / 2), cd(0, -std::sin(t / 2)), cd(0, -std::sin(t / 2)), std::cos(t / 2);
    return m;
}

inline Mat rz(double t) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = std::polar(1.0, -t / 2);
    m(1, 1) = std::polar(1.0, t / 2);
    return m;
}

inline Mat cnot() {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return m;
}

inline Mat swap() {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
    return m;
}

/// Apply a channel given by Kraus operators to rho directly.
inline Mat apply_kraus(const std::vector<Mat> &ks, const Mat &rho) {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const auto &k : ks) {
        out += k * rho * k.adjoint();
    }
    return out;
}

/// Superoperator by acting on every matrix unit |i><j| (row-major vec).
inline Mat superop_by_action(const std::vector<Mat> &ks, Eigen::Index d) {
    Mat s = Mat::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; i++) {
        for (Eigen::Index j = 0; j < d; j++) {
            Mat e = Mat::Zero(d, d);
            e(i, j) = 1;
            Mat out = apply_kraus(ks, e);
            for (Eigen::Index a = 0; a < d; a++) {
                for (Eigen::Index b = 0; b < d; b++) {
                    s(a * d + b, i * d + j) = out(a, b);
                }
            }
        }
    }
    return s;
}

/// Pauli-twirl probabilities p_P = sum_k |Tr(P E_k)|^2 / d^2 for one qubit (I, X, Y, Z).
inline std::vector<double> twirl_probs_1q(const std::vector<Mat> &ks) {
    std::vector<double> p(4, 0.0);
    const char letters[] = {'I', 'X', 'Y', 'Z'};
    for (int a = 0; a < 4; a++) {
        for (const auto &k : ks) {
            p[a] += std::norm((pauli(letters[a]) * k).trace()) / 4.0;
        }
    }
    return p;
}

inline double max_abs(const Mat &m) {
    return m.cwiseAbs().maxCoeff();
}

inline Vec random_state(std::size_t dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Vec v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); i++) {
        v(i) = cd(g(rng), g(rng));
    }
    return v.normalized();
}

/// Bit rotation by `k` places to the left on `bits` bits.
inline std::size_t rotl(std::size_t x, unsigned k, unsigned bits) {
    const std::size_t mask = (std::size_t{1} << bits) - 1;
    return ((x << k) | (x >> (bits - k))) & mask;
}

/// Greedy multiset match of complex numbers; returns the largest pairing distance.
inline double multiset_distance(std::vector<cd> a, std::vector<cd> b) {
    if (a.size() != b.size()) {
        return 1e300;
    }
    double worst = 0;
    std::vector<bool> used(b.size(), false);
    for (const auto &x : a) {
        double best = 1e300;
        std::size_t bi = 0;
        for (std::size_t j = 0; j < b.size(); j++) {
            if (!used[j] && std::abs(x - b[j]) < best) {
                best = std::abs(x - b[j]);
                bi = j;
            }
        }
        used[bi] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

/// Synthetic damped-exponential signal sum_n a_n (g_n e^{i lambda_n})^L.
struct Tone {
    cd a;
    double g;
    double lambda;
};

inline std::vector<cd> synth(const std::vector<Tone> &tones, std::size_t count, std::size_t l0 = 0) {
    std::vector<cd> z(count, cd(0, 0));
    for (std::size_t i = 0; i < count; i++) {
        const double l = static_cast<double>(l0 + i);
        for (const auto &t : tones) {
            z[i] += t.a * std::pow(t.g, l) * std::polar(1.0, t.lambda * l);
        }
    }
    return z;
}

inline double circ(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2 * kPi);
    return std::min(d, 2 * kPi - d);
}

}  // namespace oracle
