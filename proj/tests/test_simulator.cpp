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


#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rcphase/error.hpp"
#include "rcphase/experiments.hpp"
#include "rcphase/simulator.hpp"
#include "rcphase/superop.hpp"

using namespace rcphase;

namespace {

NoiseModel coherent_model(std::size_t n, double theta, std::uint64_t seed) {
    NoiseConfig cfg;
    cfg.type = "coherent";
    cfg.strength = theta;
    cfg.axis = "random-per-location";
    cfg.seed = seed;
    return NoiseModel::from_config(cfg, n);
}

NoiseModel typed_model(const std::string &type, std::size_t n, double s) {
    NoiseConfig cfg;
    cfg.type = type;
    cfg.strength = s;
    return NoiseModel::from_config(cfg, n);
}

}  // namespace

TEST_CASE("noiseless run matches the circuit unitary") {
    Circuit c = build_order_finding_circuit();
    std::mt19937_64 rng(3);
    ComplexVector psi = oracle::random_state(256, rng);
    DensityMatrix out = run_circuit(DensityMatrix::from_pure(psi), c);
    ComplexVector v = circuit_unitary(c) * psi;
    CHECK(max_abs(out.matrix - v * v.adjoint()) < 1e-12);
}

TEST_CASE("single-qubit channel examples") {
    Circuit x{1, {Cycle{{make_gate("x", {0})}, {}}}, {}};
    NoiseModel deph(1);
    deph.set_easy(0, make_stochastic_pauli(0, 0, 0.1));
    DensityMatrix out = run_circuit(DensityMatrix::basis_state(1, 0), x, &deph);
    CHECK(std::abs(out.matrix(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(out.matrix(0, 0)) < 1e-15);

    Circuit h{1, {Cycle{{make_gate("h", {0})}, {}}}, {}};
    NoiseModel dep(1);
    dep.set_easy(0, make_stochastic_pauli(0.25, 0.25, 0.25));
    DensityMatrix mixed = run_circuit(DensityMatrix::basis_state(1, 0), h, &dep);
    CHECK(max_abs(mixed.matrix - DensityMatrix::maximally_mixed(1).matrix) < 1e-15);
}

TEST_CASE("expectation values") {
    DensityMatrix zero = DensityMatrix::basis_state(1, 0);
    CHECK(expect_hermitian(zero, oracle::pauli('Z')) == doctest::Approx(1.0));
    CHECK(expect_hermitian(zero, oracle::pauli('X')) == doctest::Approx(0.0));
    ComplexMatrix not_h(2, 2);
    not_h << 0, 1, 0, 0;
    CHECK_THROWS_AS(expect_hermitian(zero, not_h), Error);
    CHECK_THROWS_AS(expect_hermitian(zero, ComplexMatrix::Identity(4, 4)), Error);

    ComplexVector e0 = ComplexVector::Zero(2), e1 = ComplexVector::Zero(2);
    e0(0) = 1;
    e1(1) = 1;
    ObservablePair obs = ObservablePair::make(e0, e1);
    CHECK(max_abs(obs.h_re() + kI * obs.h_im() - 2.0 * e0 * e1.adjoint()) < 1e-15);
    CHECK(is_hermitian(obs.h_re()));
    CHECK(is_hermitian(obs.h_im()));
    for (double alpha : {0.0, 0.4, -2.5, kPi}) {
        ComplexVector psi(2);
        psi << 1 / std::sqrt(2.0), std::polar(1 / std::sqrt(2.0), alpha);
        cd z = expect_complex(DensityMatrix::from_pure(psi), obs);
        CHECK(std::abs(z - std::polar(1.0, alpha)) < 1e-12);
        CHECK(std::abs(expect_complex(psi, obs) - z) < 1e-12);
    }
    CHECK_THROWS_AS(ObservablePair::make(e0, e0), Error);
}

TEST_CASE("finite sampling") {
    ComplexVector plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    DensityMatrix rho = DensityMatrix::from_pure(plus);
    ShotConfig exact;
    CHECK(sample_hermitian(rho, oracle::pauli('X'), exact) == doctest::Approx(1.0).epsilon(1e-14));
    ShotConfig many{1000000, 5, 0.0};
    CHECK(sample_hermitian(rho, oracle::pauli('X'), many) == doctest::Approx(1.0).epsilon(1e-12));
    ShotConfig sc{1000, 42, 0.0};
    CHECK(sample_hermitian(rho, oracle::pauli('Z'), sc) == sample_hermitian(rho, oracle::pauli('Z'), sc));

    // Mean over repeated draws stays within a few standard errors of the exact value.
    std::mt19937_64 rng(17);
    ComplexVector psi = oracle::random_state(4, rng);
    DensityMatrix r4 = DensityMatrix::from_pure(psi);
    ComplexMatrix h = oracle::kron(oracle::pauli('X'), oracle::pauli('Z')) + 0.5 * oracle::pauli_word("YY");
    const double exact_v = expect_hermitian(r4, h);
    double acc = 0, acc2 = 0;
    const int trials = 200;
    for (int t = 0; t < trials; t++) {
        double v = sample_hermitian(r4, h, ShotConfig{1000, derive_seed(9, t), 0.0});
        acc += v;
        acc2 += v * v;
    }
    const double mean = acc / trials;
    const double sd = std::sqrt(acc2 / trials - mean * mean);
    CHECK(std::abs(mean - exact_v) < 5 * sd / std::sqrt(trials));
    CHECK(sd > 0.0);
}

TEST_CASE("states stay physical") {
    Circuit c = build_floquet_circuit(3, {0.3, -1.1, 2.0}, {{0.5, 0.2}, {1.0, -0.7}});
    for (const char *type : {"amp_damp", "depolarizing", "pauli", "coherent"}) {
        NoiseModel m = typed_model(type, 3, 0.05);
        DensityMatrix rho = DensityMatrix::basis_state(3, 5);
        for (int k = 0; k < 5; k++) {
            rho = run_circuit(rho, c, &m);
            CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
            CHECK_NOTHROW(rho.validate());
        }
    }
}

TEST_CASE("pure-state path equals the density path under unitary noise") {
    FloquetInstanceConfig fc;
    fc.n = 4;
    QpeInstance inst = make_floquet_instance(fc);
    NoiseModel m = coherent_model(4, 0.05, 3);
    NoisyEvolver ev(4, &m);
    REQUIRE(ev.supports_pure_states());
    ComplexVector psi = inst.phi0;
    DensityMatrix rho = DensityMatrix::from_pure(psi);
    for (int k = 0; k < 4; k++) {
        ev.run(psi, inst.circuit);
        ev.run(rho, inst.circuit);
    }
    CHECK(max_abs(rho.matrix - psi * psi.adjoint()) < 1e-12);

    NoiseModel amp = typed_model("amp_damp", 4, 0.01);
    CHECK_FALSE(NoisyEvolver(4, &amp).supports_pure_states());
}

TEST_CASE("Hermitian kernel matches the general kernel") {
    std::mt19937_64 rng(8);
    for (std::size_t n : {2u, 3u, 4u}) {
        ComplexVector psi = oracle::random_state(std::size_t{1} << n, rng);
        ComplexVector chi = oracle::random_state(std::size_t{1} << n, rng);
        DensityMatrix a;
        a.n_qubits = n;
        a.matrix = 0.7 * psi * psi.adjoint() + 0.3 * chi * chi.adjoint();
        DensityMatrix b = a;
        KrausChannel ch = tensor(make_amplitude_damping(0.2), make_coherent(PauliString::parse("Y"), 0.3));
        ch = compose(KrausChannel::unitary(random_unitary(4, n)), ch);
        ComplexMatrix s = superoperator(ch, 4);
        apply_local_superoperator(a, {0, n - 1}, s, true);
        apply_local_superoperator(b, {0, n - 1}, s, false);
        CHECK(max_abs(a.matrix - b.matrix) < 1e-14);
        ComplexMatrix s1 = superoperator(make_amplitude_damping(0.4), 2);
        apply_local_superoperator(a, {1}, s1, true);
        apply_local_superoperator(b, {1}, s1, false);
        CHECK(max_abs(a.matrix - b.matrix) < 1e-14);
        // Against explicit Kraus application on the full space.
        std::vector<ComplexMatrix> full;
        for (const auto &k : make_amplitude_damping(0.4).kraus_ops) {
            ComplexMatrix f = ComplexMatrix::Identity(1, 1);
            for (std::size_t q = 0; q < n; q++) {
                f = oracle::kron(f, q == 1 ? k : ComplexMatrix::Identity(2, 2));
            }
            full.push_back(f);
        }
        DensityMatrix c = b;
        apply_local_superoperator(c, {1}, s1, true);
        CHECK(max_abs(c.matrix - oracle::apply_kraus(full, b.matrix)) < 1e-14);
    }
}

TEST_CASE("apply_pauli_diagonal equals the explicit Pauli channel") {
    std::mt19937_64 rng(4);
    ComplexVector psi = oracle::random_state(4, rng);
    DensityMatrix rho = DensityMatrix::from_pure(psi);
    PauliChannel pc = pauli_twirl(tensor(make_amplitude_damping(0.3), make_coherent(PauliString::parse("X"), 0.6)));
    DensityMatrix a = rho;
    apply_pauli_diagonal(a, pc.fidelities());
    ComplexMatrix expect = oracle::apply_kraus(pc.to_kraus().kraus_ops, rho.matrix);
    CHECK(max_abs(a.matrix - expect) < 1e-14);
}

TEST_CASE("noiseless signal follows the eigen-decomposition") {
    FloquetInstanceConfig fc;
    fc.n = 4;
    QpeInstance inst = make_floquet_instance(fc);
    ObservablePair obs = ObservablePair::make(inst.phi0, inst.target);
    ComplexMatrix u = circuit_unitary(inst.circuit);
    UnitarySpectrum sp = eig_unitary(u);
    cd lambda0 = (obs.phi0.adjoint() * u * obs.phi0)(0, 0);
    NoisyEvolver ev(4, nullptr);
    ComplexVector psi = obs.superposition();
    for (int l = 0; l <= 12; l++) {
        cd z = expect_complex(psi, obs);
        cd predicted = 0;
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(sp.phases.size()); k++) {
            cd c = (sp.eigenvectors.col(k).adjoint() * obs.target)(0, 0);
            predicted += std::norm(c) * std::polar(1.0, l * sp.phases[static_cast<std::size_t>(k)]) / std::pow(lambda0, l);
        }
        CHECK(std::abs(z - predicted) < 1e-7);
        ev.run(psi, inst.circuit);
    }
}
