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


#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcphase/circuit.hpp"
#include "rcphase/pipeline.hpp"

namespace rcphase {

/// Least-squares slope of log(y) against log(x). Non-positive entries are skipped;
/// fewer than two usable points give NaN.
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

/// Circuit plus reference and target states for one phase-estimation problem.
struct QpeInstance {
    std::string name;
    Circuit circuit;
    ComplexVector phi0;
    ComplexVector target;
    std::optional<ComplexMatrix> subspace;

    /// QpeConfig carrying this instance, everything else defaulted.
    QpeConfig qpe_config() const;
};

struct FloquetInstanceConfig {
    std::size_t n = 6;
    std::uint64_t seed = 77;
};

/// Random number-conserving Floquet period: site angles uniform in [-pi, pi),
/// coupler theta in [pi/8, 3pi/8), phi in [0, pi/2), drawn from mt19937_64(seed)
/// in that order. Reference |0...0>, target the uniform single-excitation state,
/// subspace the single-excitation block.
QpeInstance make_floquet_instance(const FloquetInstanceConfig &cfg);

/// Multiplication by 4 mod 255 on 8 qubits; reference |0...0>, target |0...01>.
QpeInstance make_order_finding_instance();

// ---------------------------------------------------------------- theorem check

struct TheoremCase {
    std::string name;
    /// "rx" (angles[0]), "rz_rx" (Rz(angles[0]) Rx(angles[1])) or "random" (2 qubits).
    std::string unitary = "rx";
    std::vector<double> angles{0.7};
    std::uint64_t unitary_seed = 7;
    /// "pauli" (0.2p, 0.3p, 0.5p), "dephasing", "depolarizing", "amp_damp" or "coherent".
    std::string channel = "pauli";
    std::string axis = "Z";
    double expected_slope = 2.0;

    std::size_t n_qubits() const {
        return unitary == "random" ? 2 : 1;
    }
    ComplexMatrix unitary_matrix() const;
    /// Per-qubit channel at strength s, tensored over all qubits.
    KrausChannel channel_at(double s) const;
};

struct TheoremCheckConfig {
    std::vector<double> strengths;  // default: 9 log-spaced points over [1e-4, 1e-2]
    std::vector<TheoremCase> cases;
    double slope_tolerance = 0.1;

    static TheoremCheckConfig defaults();
    static TheoremCheckConfig from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;
};

struct TheoremRow {
    std::string name;
    double strength = 0;
    double noise_strength = 0;
    double max_shift = 0;
};

struct TheoremCaseResult {
    std::string name;
    double slope = 0;
    double expected_slope = 0;
    bool pass = false;
};

struct TheoremCheckResult {
    std::vector<TheoremRow> rows;
    std::vector<TheoremCaseResult> cases;
    std::string config_hash;

    bool pass() const;
    std::string csv() const;
    nlohmann::json summary() const;
};

TheoremCheckResult run_theorem_check(const TheoremCheckConfig &cfg);

// ---------------------------------------------------------------- scaling

/// Exact-expectation phase error against per-location noise probability p.
/// Curves: "rc_pauli" (exact twirl, Pauli p/3 each), "bare_pauli",
/// "bare_amp_damp" and "rc_amp_damp" (gamma = p), "bare_coherent" and
/// "rc_coherent" (random axes, theta = 2 asin p so that noise_strength is p).
struct ScalingConfig {
    FloquetInstanceConfig instance;
    std::vector<double> probabilities{1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
    std::vector<std::string> curves{"rc_pauli",    "bare_pauli",    "bare_amp_damp",
                                    "rc_amp_damp", "bare_coherent", "rc_coherent"};
    double weak_max = 3e-4;
    double strong_min = 3e-3;
    std::size_t l_max = 200;
    /// Fit order picked from singular values above this fraction of the largest.
    double sv_threshold = 1e-10;
    std::uint64_t seed = 1;
    /// Axis draw for the coherent curves.
    std::uint64_t noise_seed = 7;
    unsigned threads = 1;
    /// Curve whose weak-window slope is held against the bare target.
    std::string bare_check_curve = "bare_coherent";
    double rc_slope_min = 1.6;
    double rc_slope_max = 2.1;
    double bare_slope_target = 1.0;
    double bare_slope_tolerance = 0.2;

    static ScalingConfig from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;
};

struct ScalingRow {
    std::string curve;
    double p = 0;
    double error = 0;
};

struct CurveSlopes {
    std::string curve;
    double weak = 0;
    double strong = 0;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    std::vector<CurveSlopes> slopes;
    std::string config_hash;
    double rc_weak = 0, rc_strong = 0, bare_slope = 0;
    bool rc_weak_ok = false, rc_strong_ok = false, bare_ok = false;

    bool pass() const {
        return rc_weak_ok && rc_strong_ok && bare_ok;
    }
    std::string csv() const;
    nlohmann::json summary() const;
};

ScalingResult run_scaling(const ScalingConfig &cfg);

// ---------------------------------------------------------------- floquet

struct FloquetConfig {
    FloquetInstanceConfig instance;
    std::vector<double> coherent_grid{0.0025, 0.005, 0.01, 0.02, 0.04};
    std::vector<double> amp_damp_grid{2.5e-4, 5e-4, 1e-3, 2e-3, 4e-3};
    std::string coherent_axis = "random-per-location";
    std::uint64_t shots = 1000000;
    std::size_t n_r = 20;
    std::size_t l_max = 50;
    std::uint64_t seed = 1;
    std::uint64_t noise_seed = 7;
    RcStrategy rc_strategy = RcStrategy::FreshPerL;
    /// Number of largest grid points used for the RC power-law fit.
    std::size_t strong_points = 3;
    double coherent_factor = 5.0;  // pass when rc <= bare / factor at mid-grid
    double amp_damp_ratio = 0.7;  // pass when rc <= ratio * bare at mid-grid
    unsigned threads = 1;
    /// Only the middle grid point of each family.
    bool mid_grid_only = false;

    static FloquetConfig from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;
};

struct FloquetPoint {
    std::string family;  // "coherent" or "amp_damp"
    double strength = 0;
    QpeReport bare;
    QpeReport rc;
};

struct FloquetResult {
    std::vector<FloquetPoint> points;
    std::string config_hash;
    double coherent_mid_bare = 0, coherent_mid_rc = 0;
    double amp_damp_mid_bare = 0, amp_damp_mid_rc = 0;
    double coherent_rc_exponent = 0, amp_damp_rc_exponent = 0;
    bool coherent_ok = false, amp_damp_ok = false;

    bool pass() const {
        return coherent_ok && amp_damp_ok;
    }
    std::string csv() const;
    nlohmann::json summary() const;
};

FloquetResult run_floquet(const FloquetConfig &cfg);

// ---------------------------------------------------------------- order finding

struct OrderFindingConfig {
    std::uint64_t shots = 100000;
    std::size_t l_min = 1;
    std::size_t l_max = 100;
    NoiseConfig noise;  // default: coherent, 0.05 rad, random axis per location
    std::size_t n_r = 20;
    std::uint64_t seed = 1;
    RcStrategy rc_strategy = RcStrategy::FreshPerL;
    double tau_factor = 3.0;
    std::size_t exclusion = 1;
    std::vector<std::size_t> expected_bins{0, 25, 50, 75};
    unsigned threads = 1;

    OrderFindingConfig();
    static OrderFindingConfig from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;
};

struct SpectrumSummary {
    std::vector<double> magnitudes;
    std::vector<std::size_t> peak_bins;  // the expected-count largest peaks, ascending
    std::vector<std::size_t> spurious;
    double mean_error = 0;
};

struct OrderFindingResult {
    SpectrumSummary noiseless, bare, rc;
    QpeReport noiseless_report, bare_report, rc_report;
    std::string config_hash;

    bool noiseless_ok(const std::vector<std::size_t> &expected) const;
    bool pass(const std::vector<std::size_t> &expected) const;
    std::string csv() const;
    nlohmann::json summary() const;
};

OrderFindingResult run_order_finding(const OrderFindingConfig &cfg);

// ---------------------------------------------------------------- N_r sweep

struct NrSweepConfig {
    FloquetInstanceConfig instance;
    std::string noise_type = "coherent";
    double strength = 0.01;
    std::string axis = "random-per-location";
    std::vector<std::size_t> n_rs{1, 2, 5, 10, 20, 50, 100};
    /// Total shots per Hermitian component, split evenly over members.
    std::uint64_t shots = 100000000;
    std::size_t l_max = 50;
    std::size_t seeds = 20;
    std::uint64_t seed = 1;
    double slope_target = -0.5;
    double slope_tolerance = 0.2;
    unsigned threads = 1;

    static NrSweepConfig from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;
};

struct NrSweepResult {
    std::vector<std::size_t> n_rs;
    std::vector<std::vector<double>> errors;  // [seed][n_r index]
    std::vector<double> mean_errors;
    double slope = 0;
    bool pass = false;
    std::string config_hash;

    std::string csv() const;
    nlohmann::json summary() const;
};

NrSweepResult run_nr_sweep(const NrSweepConfig &cfg);

/// Writes `text` to `path` through a temporary file and rename.
void write_file_atomic(const std::string &path, const std::string &text);

}  // namespace rcphase
