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
#include "rcphase/spectral.hpp"

using namespace rcphase;

namespace {

Signal make_signal(const std::vector<oracle::Tone> &tones, std::size_t count) {
    Signal s;
    s.values = oracle::synth(tones, count);
    return s;
}

ModeEstimate fit(const Signal &s, std::size_t order) {
    return refine_fit(s, matrix_pencil(s, order));
}

std::vector<double> phases_of(const ModeEstimate &e) {
    std::vector<double> out;
    for (const auto &m : e.modes) {
        out.push_back(m.lambda);
    }
    return out;
}

std::vector<oracle::Tone> six_tones() {
    return {{{0.30, 0.10}, 1.0, -2.6}, {{0.20, -0.05}, 0.99, -1.7}, {{0.15, 0.0}, 0.97, -0.6},
            {{0.10, 0.10}, 1.0, 0.4},  {{0.12, -0.02}, 0.95, 1.5},  {{0.08, 0.0}, 0.99, 2.7}};
}

}  // namespace

TEST_CASE("DFT examples") {
    Signal ones;
    ones.values.assign(8, cd(1, 0));
    auto m = dft_magnitudes(ones);
    CHECK(m[0] == doctest::Approx(8.0));
    for (std::size_t k = 1; k < 8; k++) {
        CHECK(m[k] < 1e-12);
    }
    Signal tone = make_signal({{{1, 0}, 1.0, 2 * kPi * 3 / 16}}, 16);
    auto peaks = dft_peaks(tone, 1);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].bin == 3);
    CHECK(peaks[0].magnitude == doctest::Approx(16.0));
    CHECK(peaks[0].phase == doctest::Approx(2 * kPi * 3 / 16));
    CHECK_THROWS_AS(dft_peaks(tone, 9), Error);

    std::vector<double> mags = {10, 1, 1, 5, 1, 1, 1, 1, 9, 1, 1, 1};
    auto sp = spurious_peaks(mags, {0}, 3.0, 1);
    CHECK(sp == std::vector<std::size_t>{3, 8});
    CHECK(spurious_peaks(mags, {0, 3, 7}, 3.0, 1).empty());
}

TEST_CASE("matrix pencil recovers exact tones") {
    Signal s = make_signal({{{0.6, 0.2}, 0.98, 0.7}, {{0.3, 0}, 1.0, -1.9}}, 40);
    ModeEstimate e = matrix_pencil(s, 2);
    REQUIRE(e.modes.size() == 2);
    CHECK(e.modes[0].lambda == doctest::Approx(-1.9).epsilon(1e-10));
    CHECK(e.modes[1].lambda == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(e.modes[1].g == doctest::Approx(0.98).epsilon(1e-10));
    CHECK(std::abs(e.modes[1].amplitude - cd(0.6, 0.2)) < 1e-10);
    CHECK(e.residual < 1e-20);

    PencilOptions auto_order;
    auto_order.model_order = 0;
    auto_order.sv_threshold = 1e-6;
    CHECK(matrix_pencil(s, auto_order).modes.size() == 2);

    Signal zero;
    zero.values.assign(20, cd(0, 0));
    CHECK_THROWS_AS(matrix_pencil(zero, 2), Error);
}

TEST_CASE("up to six modes are recovered to 1e-7") {
    for (std::size_t k = 1; k <= 6; k++) {
        std::vector<oracle::Tone> tones = six_tones();
        tones.resize(k);
        Signal s = make_signal(tones, 51);
        ModeEstimate pencil = matrix_pencil(s, k);
        ModeEstimate refined = refine_fit(s, pencil);
        std::vector<double> truth;
        for (const auto &t : tones) {
            truth.push_back(t.lambda);
        }
        CHECK(estimation_error(refined, truth).mean <= 1e-7);
        auto a = phases_of(pencil), b = phases_of(refined);
        for (std::size_t i = 0; i < a.size(); i++) {
            CHECK(std::abs(a[i] - b[i]) <= 1e-6);
        }
    }
}

TEST_CASE("refinement never increases the residual and clamps growth") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n01;
    Signal s = make_signal(six_tones(), 51);
    for (auto &v : s.values) {
        v += 0.01 * cd(n01(rng), n01(rng));
    }
    ModeEstimate init = matrix_pencil(s, 6);
    ModeEstimate out = refine_fit(s, init);
    CHECK(out.residual <= init.residual + 1e-15);
    CHECK(out.residual == doctest::Approx(model_residual(s, out)).epsilon(1e-9));

    Signal grow = make_signal({{{1, 0}, 1.2, 0.3}}, 30);
    ModeEstimate g = refine_fit(grow, modes_from_peaks(grow, dft_peaks(grow, 1)));
    for (const auto &m : g.modes) {
        CHECK(m.g <= 1.05 + 1e-12);
    }

    RefineOptions tight;
    tight.max_iterations = 0;
    ModeEstimate stuck = refine_fit(s, init, tight);
    CHECK_FALSE(stuck.converged);
    CHECK(stuck.residual == doctest::Approx(init.residual).epsilon(1e-12));
}

TEST_CASE("single-tone phase variance approaches the Cramer-Rao bound") {
    const std::size_t n = 50;
    const double sigma = 0.05;  // per real component
    const double lambda = 0.8;
    std::vector<double> est;
    for (std::uint64_t seed = 0; seed < 100; seed++) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n01;
        Signal s = make_signal({{{1, 0}, 1.0, lambda}}, n);
        for (auto &v : s.values) {
            v += sigma * cd(n01(rng), n01(rng));
        }
        est.push_back(fit(s, 1).modes.at(0).lambda);
    }
    double mean = 0, var = 0;
    for (double e : est) {
        mean += e / est.size();
    }
    for (double e : est) {
        var += (e - mean) * (e - mean) / (est.size() - 1);
    }
    const double nn = static_cast<double>(n);
    const double crb = 12 * sigma * sigma / (nn * (nn * nn - 1));
    CHECK(std::abs(mean - lambda) < 4 * std::sqrt(crb / est.size()));
    CHECK(var / crb > 0.6);
    CHECK(var / crb < 1.6);
}

TEST_CASE("estimation_error matching") {
    ModeEstimate e;
    e.modes = {{cd(1, 0), 1, 1, 0.09}, {cd(1, 0), 1, 1, 0.52}, {cd(1, 0), 1, 1, 2.0}};
    PhaseErrorReport r = estimation_error(e, {0.1, 0.5});
    CHECK(r.errors[0] == doctest::Approx(0.01));
    CHECK(r.errors[1] == doctest::Approx(0.02));
    CHECK(r.assignment == std::vector<std::size_t>{0, 1});
    CHECK(r.mean == doctest::Approx(0.015));

    ModeEstimate wrap;
    wrap.modes = {{cd(1, 0), 1, 1, -3.1}};
    CHECK(estimation_error(wrap, {3.1}).mean == doctest::Approx(2 * kPi - 6.2));

    // A greedy nearest-first match would pair 0.3 with 0.35 and pay more in total.
    ModeEstimate cross;
    cross.modes = {{cd(1, 0), 1, 1, 0.35}, {cd(1, 0), 1, 1, 0.65}};
    PhaseErrorReport c = estimation_error(cross, {0.3, 0.4});
    CHECK(c.mean == doctest::Approx((0.05 + 0.25) / 2));

    CHECK_THROWS_AS(estimation_error(wrap, {0.1, 0.2}), Error);
}

TEST_CASE("phases do not depend on a common amplitude factor") {
    Signal a = make_signal(six_tones(), 51);
    Signal b = a;
    for (auto &v : b.values) {
        v *= std::polar(0.3, 1.2);
    }
    auto pa = phases_of(fit(a, 6)), pb = phases_of(fit(b, 6));
    for (std::size_t i = 0; i < pa.size(); i++) {
        CHECK(std::abs(pa[i] - pb[i]) < 1e-8);
    }
}

TEST_CASE("dominant_modes keeps the heaviest") {
    ModeEstimate e;
    e.modes = {{cd(0.1, 0), 0.1, 1, -1}, {cd(0.5, 0), 0.5, 1, 0}, {cd(0.3, 0), 0.3, 1, 1}, {cd(0.05, 0), 0.05, 1, 2}};
    ModeEstimate d = dominant_modes(e, 2);
    REQUIRE(d.modes.size() == 2);
    CHECK(d.modes[0].lambda == 0);
    CHECK(d.modes[1].lambda == 1);
}

TEST_CASE("CSV and JSON round trips") {
    Signal s = make_signal(six_tones(), 13);
    s.l_offset = 1;
    s.shots = 1000;
    s.n_r = 20;
    s.mode = "rc";
    s.seed = 77;
    Signal back = signal_from_csv(signal_to_csv(s));
    CHECK(back.l_offset == 1);
    REQUIRE(back.values.size() == s.values.size());
    for (std::size_t i = 0; i < s.values.size(); i++) {
        CHECK(back.values[i] == s.values[i]);
    }
    CHECK_THROWS_AS(signal_from_csv("L,re,im\n0,abc,1\n"), Error);

    ModeEstimate e = fit(make_signal(six_tones(), 51), 6);
    ModeEstimate r = mode_estimate_from_json(to_json(e));
    REQUIRE(r.modes.size() == e.modes.size());
    for (std::size_t i = 0; i < e.modes.size(); i++) {
        CHECK(r.modes[i].lambda == e.modes[i].lambda);
        CHECK(r.modes[i].amplitude == e.modes[i].amplitude);
    }
}
