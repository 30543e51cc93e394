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


// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rcphase/experiments.hpp"
#include "rcphase/linalg.hpp"
#include "rcphase/pipeline.hpp"
#include "rcphase/randomized_compiling.hpp"
#include "rcphase/spectral.hpp"

using namespace rcphase;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string g(double a) {
    return fmt("%.4g", a);
}

/// Every fitted mode of every simulated run, for the growth bound check.
std::vector<double> fitted_growth;

void collect(const QpeReport &r) {
    for (const auto &m : r.fit.modes) {
        fitted_growth.push_back(m.g);
    }
}

Outcome theorem_check() {
    TheoremCheckResult r = run_theorem_check(TheoremCheckConfig::defaults());
    std::string d;
    for (const auto &c : r.cases) {
        d += c.name + "=" + fmt("%.3f", c.slope) + "(" + fmt("%.0f", c.expected_slope) + ") ";
    }
    return {r.pass(), d};
}

Outcome rc_equivalence() {
    std::size_t count = 0;
    double worst = 0;
    FloquetInstanceConfig fc;
    const Circuit floquet = make_floquet_instance(fc).circuit;
    const Circuit order = make_order_finding_instance().circuit;
    for (std::size_t b = 0; b < 50; b++) {
        const Circuit bare = b % 2 == 0 ? repeat(floquet, 1 + b % 5) : order;
        RcEnsemble e = compile(bare, 20, derive_seed(2024, b));
        EquivalenceReport rep = verify_equivalence(e);
        count += rep.deviations.size();
        worst = std::max(worst, rep.max_deviation);
    }
    return {count == 1000 && worst <= 1e-8, std::to_string(count) + " circuits, worst 1-|Tr(V^dag U)|/2^n = " + g(worst)};
}

Outcome twirl_identity() {
    Circuit c{2, {}, {}};
    c.cycles.push_back(Cycle{{make_gate("rx", {0}, {0.3}), make_gate("rz", {1}, {1.1})}, {make_gate("cnot", {0, 1})}});
    c.cycles.push_back(Cycle{{make_gate("ry", {1}, {-0.8})}, {make_gate("cz", {0, 1})}});
    c.cycles.push_back(Cycle{{make_gate("h", {0}), make_gate("rz", {1}, {0.4})}, {make_gate("cnot", {1, 0})}});
    double worst = 0;
    for (const char *type : {"coherent", "amp_damp", "pauli"}) {
        NoiseConfig nc;
        nc.type = type;
        nc.strength = 0.1;
        nc.axis = "random-per-location";
        nc.seed = 5;
        NoiseModel noise = NoiseModel::from_config(nc, 2);
        for (std::size_t k = 1; k <= 3; k++) {
            Circuit prefix{2, {c.cycles.begin(), c.cycles.begin() + static_cast<long>(k)}, {}};
            ComplexMatrix ex = effective_channel(compile(prefix, 1, 1), noise, true);
            worst = std::max(worst, max_abs(ex - twirled_reference_superoperator(prefix, noise)));
        }
    }
    return {worst <= 1e-9, "max entry difference " + g(worst)};
}

Outcome order_finding_noiseless(const OrderFindingResult &r, const OrderFindingConfig &cfg) {
    bool ok = r.noiseless_ok(cfg.expected_bins);
    std::string d = "peaks";
    double bin_phase_err = 0;
    const double n = static_cast<double>(r.noiseless.magnitudes.size());
    const double truth[] = {0, kPi / 2, kPi, 3 * kPi / 2};
    for (std::size_t i = 0; i < r.noiseless.peak_bins.size(); i++) {
        d += " " + std::to_string(r.noiseless.peak_bins[i]);
        if (i < 4) {
            bin_phase_err = std::max(bin_phase_err, circular_distance(2 * kPi * r.noiseless.peak_bins[i] / n, truth[i]));
        }
    }
    QpeConfig q = make_order_finding_instance().qpe_config();
    q.l_min = cfg.l_min;
    q.l_max = cfg.l_max;
    QpeReport exact = run_qpe(q);
    collect(exact);
    ok = ok && bin_phase_err <= 1e-6 && exact.error.mean <= 1e-6;
    d += "; DFT-bin phase error " + g(bin_phase_err) + "; exact-signal fit error " + g(exact.error.mean) +
         "; sampled fit error " + g(r.noiseless_report.error.mean);
    return {ok, d};
}

Outcome order_finding_coherent(const OrderFindingResult &r) {
    bool ok = !r.bare.spurious.empty() && r.rc.spurious.empty() && r.rc.mean_error < r.bare.mean_error;
    return {ok, "bare spurious " + std::to_string(r.bare.spurious.size()) + ", rc spurious " +
                    std::to_string(r.rc.spurious.size()) + "; mean error bare " + g(r.bare.mean_error) + " rc " +
                    g(r.rc.mean_error)};
}

Outcome floquet() {
    FloquetConfig cfg;
    cfg.mid_grid_only = true;
    cfg.threads = 0;
    FloquetResult r = run_floquet(cfg);
    for (const auto &p : r.points) {
        collect(p.bare);
        collect(p.rc);
    }
    std::string d = "coherent bare " + g(r.coherent_mid_bare) + " rc " + g(r.coherent_mid_rc) + " (need rc <= bare/" +
                    fmt("%.0f", cfg.coherent_factor) + ": " + (r.coherent_ok ? "ok" : "no") + "); amp_damp bare " +
                    g(r.amp_damp_mid_bare) + " rc " + g(r.amp_damp_mid_rc) + " (need rc <= " +
                    fmt("%.1f", cfg.amp_damp_ratio) + " bare: " + (r.amp_damp_ok ? "ok" : "no") + ")";
    return {r.coherent_ok && r.amp_damp_ok, d};
}

Outcome scaling() {
    ScalingConfig cfg;
    cfg.threads = 0;
    ScalingResult r = run_scaling(cfg);
    std::string d = "rc weak " + fmt("%.3f", r.rc_weak) + " strong " + fmt("%.3f", r.rc_strong) + "; " +
                    cfg.bare_check_curve + " " + fmt("%.3f", r.bare_slope);
    return {r.pass(), d};
}

Outcome nr_sweep() {
    NrSweepConfig cfg;
    cfg.threads = 0;
    NrSweepResult r = run_nr_sweep(cfg);
    std::string d = "slope " + fmt("%.3f", r.slope) + " over " + std::to_string(r.errors.size()) + " seeds; mean errors";
    for (double e : r.mean_errors) {
        d += " " + g(e);
    }
    return {r.pass && r.errors.size() >= 20, d};
}

Outcome estimator_suite() {
    // Synthetic exact signals with 1..6 damped modes.
    const std::vector<std::vector<double>> tone = {{0.30, 0.10, 1.00, -2.6}, {0.20, -0.05, 0.99, -1.7},
                                                   {0.15, 0.00, 0.97, -0.6}, {0.10, 0.10, 1.00, 0.4},
                                                   {0.12, -0.02, 0.95, 1.5}, {0.08, 0.00, 0.99, 2.7}};
    double worst_exact = 0, worst_gap = 0;
    for (std::size_t k = 1; k <= 6; k++) {
        Signal s;
        std::vector<double> truth;
        for (std::size_t l = 0; l <= 50; l++) {
            cd z = 0;
            for (std::size_t t = 0; t < k; t++) {
                z += cd(tone[t][0], tone[t][1]) * std::pow(tone[t][2], l) * std::polar(1.0, tone[t][3] * l);
            }
            s.values.push_back(z);
        }
        for (std::size_t t = 0; t < k; t++) {
            truth.push_back(tone[t][3]);
        }
        ModeEstimate p = matrix_pencil(s, k);
        ModeEstimate r = refine_fit(s, p);
        worst_exact = std::max(worst_exact, estimation_error(r, truth).mean);
        for (std::size_t i = 0; i < k; i++) {
            worst_gap = std::max(worst_gap, circular_distance(p.modes[i].lambda, r.modes[i].lambda));
        }
    }
    double g_max = 0;
    for (double x : fitted_growth) {
        g_max = std::max(g_max, x);
    }
    bool ok = worst_exact <= 1e-7 && worst_gap <= 1e-6 && g_max <= 1.05 && !fitted_growth.empty();
    return {ok, "exact recovery " + g(worst_exact) + ", pencil vs refined " + g(worst_gap) + ", max fitted g " +
                    fmt("%.6f", g_max) + " over " + std::to_string(fitted_growth.size()) + " modes"};
}

Outcome spam() {
    QpeConfig q = make_floquet_instance(FloquetInstanceConfig{}).qpe_config();
    q.l_max = 50;
    q.shots = 1000000;
    q.seed = 10;
    q.spam.prep_depolarizing = 0.1;
    q.spam.readout_error = 0.05;
    QpeReport r = run_qpe(q);
    collect(r);
    return {r.error.mean <= 1e-3, "mean phase error " + g(r.error.mean)};
}

int failures = 0;

void report(int id, const std::string &name, double limit_s, const std::function<Outcome()> &fn) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o = fn();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string d = o.detail + " [" + fmt("%.1f", secs) + " s";
    if (limit_s > 0) {
        d += ", limit " + fmt("%.0f", limit_s) + " s";
        o.pass = o.pass && secs < limit_s;
    }
    d += "]";
    failures += o.pass ? 0 : 1;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), d.c_str());
    std::fflush(stdout);
}

}  // namespace

int main() {
    report(1, "theorem-check", 60, theorem_check);
    report(2, "rc-equivalence", 120, rc_equivalence);
    report(3, "exhaustive-twirl-identity", 0, twirl_identity);

    OrderFindingConfig of;
    of.threads = 0;
    OrderFindingResult ofr;
    double of_secs = 0;
    {
        auto t0 = std::chrono::steady_clock::now();
        ofr = run_order_finding(of);
        of_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        collect(ofr.noiseless_report);
        collect(ofr.bare_report);
        collect(ofr.rc_report);
    }
    report(4, "order-finding-noiseless", 0, [&] {
        Outcome o = order_finding_noiseless(ofr, of);
        o.pass = o.pass && of_secs < 300;
        o.detail += "; full run " + fmt("%.1f", of_secs) + " s, limit 300 s";
        return o;
    });
    report(5, "order-finding-coherent", 0, [&] { return order_finding_coherent(ofr); });
    report(6, "floquet-mid-grid", 1800, floquet);
    report(7, "scaling", 0, scaling);
    report(8, "nr-sweep", 0, nr_sweep);
    report(9, "estimator-suite", 0, estimator_suite);
    report(10, "spam-robustness", 0, spam);

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
