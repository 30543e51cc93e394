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


#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rcphase/circuit.hpp"
#include "rcphase/error.hpp"
#include "rcphase/linalg.hpp"
#include "rcphase/noise.hpp"
#include "rcphase/pauli.hpp"
#include "rcphase/superop.hpp"

using namespace rcphase;

TEST_CASE("kron matches the elementwise definition") {
    CHECK(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)).isApprox(ComplexMatrix::Identity(4, 4)));
    ComplexMatrix xi = kron(oracle::pauli('X'), ComplexMatrix::Identity(2, 2));
    ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
    expect(0, 2) = expect(1, 3) = expect(2, 0) = expect(3, 1) = 1;
    CHECK(max_abs(xi - expect) == 0.0);
    ComplexMatrix zz = kron(oracle::pauli('Z'), oracle::pauli('Z'));
    ComplexVector diag(4);
    diag << 1, -1, -1, 1;
    CHECK(max_abs(zz - ComplexMatrix(diag.asDiagonal())) == 0.0);

    std::mt19937_64 rng(3);
    ComplexMatrix a = random_unitary(3, 11), b = random_unitary(2, 12);
    CHECK(max_abs(kron(a, b) - oracle::kron(a, b)) < 1e-15);
}

TEST_CASE("eig_unitary on diagonal and permutation inputs") {
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = kI;
    auto s = eig_unitary(d);
    REQUIRE(s.phases.size() == 2);
    CHECK(s.phases[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.phases[1] == doctest::Approx(kPi / 2).epsilon(1e-12));

    auto rzs = eig_unitary(oracle::rz(0.7));
    CHECK(rzs.phases[0] == doctest::Approx(-0.35).epsilon(1e-12));
    CHECK(rzs.phases[1] == doctest::Approx(0.35).epsilon(1e-12));

    // Cyclic shift by two on 8 bits: every orbit has length 1, 2 or 4.
    ComplexMatrix perm = ComplexMatrix::Zero(256, 256);
    for (std::size_t i = 0; i < 256; i++) {
        perm(static_cast<Eigen::Index>(oracle::rotl(i, 2, 8)), static_cast<Eigen::Index>(i)) = 1;
    }
    auto ps = eig_unitary(perm);
    const double allowed[] = {0.0, kPi / 2, -kPi / 2, kPi};
    for (double ph : ps.phases) {
        double best = 10;
        for (double a : allowed) {
            best = std::min(best, circular_distance(ph, a));
        }
        CHECK(best < 1e-9);
    }
}

TEST_CASE("eig_unitary reconstructs random unitaries and keeps phases on the principal branch") {
    for (std::size_t dim : {2u, 4u, 8u, 16u, 32u, 64u}) {
        ComplexMatrix u = random_unitary(dim, 100 + dim);
        auto s = eig_unitary(u);
        CHECK(max_abs(s.reconstruct() - u) <= 1e-9);
        for (double ph : s.phases) {
            CHECK(ph > -kPi);
            CHECK(ph <= kPi);
        }
    }
    ComplexMatrix bad = ComplexMatrix::Identity(2, 2) * 1.1;
    CHECK_THROWS_AS(eig_unitary(bad), Error);
}

TEST_CASE("conjugate_pauli examples") {
    CHECK(conjugate_pauli(oracle::cnot(), PauliString::parse("XI")) == PauliString::parse("XX"));
    CHECK(conjugate_pauli(oracle::swap(), PauliString::parse("ZI")) == PauliString::parse("IZ"));
    for (const char *w : {"XYZ", "IIZ", "YYI"}) {
        CHECK(conjugate_pauli(ComplexMatrix::Identity(8, 8), PauliString::parse(w)) == PauliString::parse(w));
    }
    CHECK_THROWS_AS(conjugate_pauli(oracle::rx(0.3), PauliString::parse("Z")), Error);
}

TEST_CASE("conjugate_pauli agrees with direct matrix conjugation") {
    std::mt19937_64 rng(21);
    const std::vector<std::pair<std::string, std::size_t>> gates = {
        {"h", 1}, {"s", 1}, {"cnot", 2}, {"cz", 2}, {"swap", 2}};
    for (int trial = 0; trial < 60; trial++) {
        const std::size_t n = 1 + rng() % 3;
        const auto &[name, arity] = gates[rng() % gates.size()];
        if (arity > n) {
            continue;
        }
        std::vector<std::size_t> qs;
        while (qs.size() < arity) {
            std::size_t q = rng() % n;
            if (std::find(qs.begin(), qs.end(), q) == qs.end()) {
                qs.push_back(q);
            }
        }
        Circuit c{n, {Cycle{}}, {}};
        if (arity == 1) {
            c.cycles[0].easy.push_back(make_gate(name, qs));
        } else {
            c.cycles[0].hard.push_back(make_gate(name, qs));
        }
        ComplexMatrix u = circuit_unitary(c);
        PauliString p = PauliString::from_index(n, rng() % (std::size_t{1} << (2 * n)));
        PauliString q = conjugate_pauli(u, p);
        CHECK(oracle::max_abs(q.matrix() - u * p.matrix() * u.adjoint()) <= 1e-9);
    }
}

TEST_CASE("superoperator examples") {
    CHECK(max_abs(superoperator(KrausChannel::identity(1), 2) - ComplexMatrix::Identity(4, 4)) == 0.0);

    const double th = 0.37;
    ComplexMatrix u = ComplexMatrix::Identity(2, 2);
    u(1, 1) = std::polar(1.0, th);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(unitary_superoperator(u));
    std::vector<cd> got(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    CHECK(oracle::multiset_distance(got, {1.0, 1.0, std::polar(1.0, th), std::polar(1.0, -th)}) < 1e-12);

    const double p = 0.13;
    ComplexMatrix s = superoperator(make_stochastic_pauli(0, 0, p), 2);
    ComplexVector diag(4);
    diag << 1, 1 - 2 * p, 1 - 2 * p, 1;
    CHECK(max_abs(s - ComplexMatrix(diag.asDiagonal())) < 1e-15);

    KrausChannel ad = make_amplitude_damping(0.3);
    CHECK(max_abs(superoperator(ad, 2) - oracle::superop_by_action(ad.kraus_ops, 2)) < 1e-15);
}

TEST_CASE("superoperator eigenvalues are the pairwise eigenphase differences") {
    for (std::uint64_t seed = 1; seed <= 4; seed++) {
        ComplexMatrix u = random_unitary(4, seed);
        auto spec = eig_unitary(u);
        std::vector<cd> expect;
        for (double a : spec.phases) {
            for (double b : spec.phases) {
                expect.push_back(std::polar(1.0, a - b));
            }
        }
        Eigen::ComplexEigenSolver<ComplexMatrix> es(unitary_superoperator(u));
        std::vector<cd> got(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        CHECK(oracle::multiset_distance(got, expect) <= 1e-8);
    }
}

namespace {

double max_shift(const ComplexMatrix &u, const KrausChannel &ch) {
    auto v = superop_eigenphase_shift(u, ch);
    return *std::max_element(v.begin(), v.end());
}

double slope_over(const ComplexMatrix &u, KrausChannel (*make)(double)) {
    std::vector<double> xs, ys;
    for (double p : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
        KrausChannel ch = make(p);
        xs.push_back(std::log(noise_strength(ch)));
        ys.push_back(std::log(max_shift(u, ch)));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); i++) {
        mx += xs[i] / xs.size();
        my += ys[i] / ys.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); i++) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace

TEST_CASE("superop_eigenphase_shift scaling") {
    const ComplexMatrix rx = oracle::rx(0.7);
    for (double s : superop_eigenphase_shift(rx, KrausChannel::identity(1))) {
        CHECK(s < 1e-12);
    }
    CHECK(slope_over(rx, [](double p) { return make_stochastic_pauli(0, 0, p); }) == doctest::Approx(2.0).epsilon(0.05));
    // One-qubit damping produces no first-order shift on any one-qubit unitary.
    CHECK(slope_over(rx, make_amplitude_damping) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(slope_over(random_unitary(4, 7), [](double g) {
              auto a = make_amplitude_damping(g);
              return tensor(a, a);
          }) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(slope_over(rx, [](double t) { return make_coherent(PauliString::parse("X"), t); }) ==
          doctest::Approx(1.0).epsilon(0.1));
    CHECK(slope_over(oracle::rz(0.4) * rx, [](double t) { return make_coherent(PauliString::parse("Z"), t); }) ==
          doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("seed derivation is deterministic and order independent") {
    CHECK(derive_seed(5, 1, 2, 3) == derive_seed(5, 1, 2, 3));
    CHECK(derive_seed(5, 1, 2, 3) != derive_seed(5, 1, 3, 2));
    CHECK(derive_seed(5, 1) != derive_seed(6, 1));
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("wrap_phase and circular_distance") {
    CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(3 * kPi / 2) == doctest::Approx(-kPi / 2));
    CHECK(circular_distance(3.14, -3.14) == doctest::Approx(2 * kPi - 6.28).epsilon(1e-9));
}
