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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcphase/circuit.hpp"
#include "rcphase/noise.hpp"
#include "rcphase/simulator.hpp"
#include "rcphase/spectral.hpp"

namespace rcphase {

enum class QpeMode { Bare, Rc };

enum class RcStrategy {
    /// Independent twirls for every (L, r).
    FreshPerL,
    /// Member r twirls repeat(U, L_max) once; shorter L reuse its prefix.
    SharedPrefix,
    /// Infinite-ensemble limit: every cycle followed by its twirled cycle noise.
    ExactTwirl,
};

struct SpamConfig {
    /// Single-qubit depolarizing strength applied to every qubit after preparation.
    double prep_depolarizing = 0.0;
    /// Readout confusion probability (see ShotConfig).
    double readout_error = 0.0;
};

struct FitConfig {
    /// 0 uses N_p.
    std::size_t model_order = 0;
    /// Select the order from singular values (at least N_p modes).
    bool auto_order = false;
    double sv_threshold = 1e-3;
    bool refine = true;
};

struct QpeConfig {
    Circuit circuit;  // one period U
    ComplexVector phi0;
    ComplexVector target;
    /// Optional orthonormal basis (columns) of a U-invariant subspace holding
    /// the target; ground truth is then computed in that block only.
    std::optional<ComplexMatrix> subspace;
    std::size_t l_min = 0;
    std::size_t l_max = 50;
    std::uint64_t shots = 0;  // N_s, per Hermitian component
    std::size_t n_r = 1;
    QpeMode mode = QpeMode::Bare;
    RcStrategy rc_strategy = RcStrategy::FreshPerL;
    NoiseConfig noise;
    /// Takes precedence over `noise` when set.
    std::optional<NoiseModel> custom_noise;
    SpamConfig spam;
    std::uint64_t seed = 0;
    /// 0 takes the number of ground-truth phases.
    std::size_t n_p = 0;
    FitConfig fit;
    bool identity_twirls = false;
    unsigned threads = 1;
};

/// Throws ShotSplit / BadParams.
void validate(const QpeConfig &cfg);
NoiseModel noise_model(const QpeConfig &cfg);

struct GroundTruth {
    std::vector<double> phases;  // lambda_n - lambda_0 on (-pi, pi], ascending
    std::vector<double> weights;  // |c_n|^2
    std::size_t n_p = 0;
    double lambda0 = 0.0;
};

/// Relative phases and weights of t in the eigenbasis of U (or of its block on
/// `subspace`). Phases within 1e-9 merge; weights below 1e-6 are dropped.
/// Throws ReferenceNotEigenstate.
GroundTruth ground_truth(const Circuit &c, const ComplexVector &phi0, const ComplexVector &target,
                         const ComplexMatrix *subspace = nullptr);

/// z_L = <H_re> + i <H_im> for L = l_min..l_max.
Signal acquire_signal(const QpeConfig &cfg);

/// Fresh-per-L RC signals for several ensemble sizes from one pass: member r is
/// shared by every ensemble with n_r > r, and each ensemble splits cfg.shots
/// evenly over its members. Entry k equals acquire_signal with n_r = n_rs[k].
std::vector<Signal> acquire_nested_signals(const QpeConfig &cfg, const std::vector<std::size_t> &n_rs);

struct QpeReport {
    GroundTruth truth;
    Signal signal;
    ModeEstimate fit;  // all fitted modes
    ModeEstimate selected;  // the N_p dominant modes
    PhaseErrorReport error;
    nlohmann::json config;
    std::string config_hash;

    nlohmann::json to_json() const;
};

/// Fit a signal and score it against `truth`.
QpeReport analyze_signal(const QpeConfig &cfg, const GroundTruth &truth, Signal signal);
QpeReport run_qpe(const QpeConfig &cfg);

nlohmann::json config_to_json(const QpeConfig &cfg);
/// 16 hex digits of 64-bit FNV-1a over the canonical JSON dump.
std::string config_hash(const nlohmann::json &config);

/// Runs fn(0..count-1) on up to `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &fn);

}  // namespace rcphase
