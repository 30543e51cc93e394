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
#include <string>
#include <vector>

#include "json.hpp"
#include "rcphase/linalg.hpp"

namespace rcphase {

/// Samples z_L for L = l_offset, l_offset + 1, ...
struct Signal {
    std::vector<cd> values;
    std::size_t l_offset = 0;
    std::uint64_t shots = 0;
    std::size_t n_r = 0;
    std::string mode = "bare";
    std::uint64_t seed = 0;

    std::size_t size() const {
        return values.size();
    }
    std::size_t l_max() const {
        return l_offset + values.size() - 1;
    }
};

struct Mode {
    cd amplitude;  // a_n
    double p = 0;  // |a_n|
    double g = 0;  // |z_n|
    double lambda = 0;  // arg z_n in (-pi, pi]
};

struct ModeEstimate {
    std::vector<Mode> modes;  // sorted by lambda
    double residual = 0;  // sum_L |z_L - model_L|^2
    bool converged = true;
    bool ill_conditioned = false;
};

struct Peak {
    std::size_t bin = 0;
    double magnitude = 0;
    double phase = 0;
};

/// |sum_L z_L exp(-2 pi i k L / N)| for k = 0..N-1, N = number of samples.
std::vector<double> dft_magnitudes(const Signal &s);

/// The n_p largest circular local maxima of the DFT magnitude; ties go to the
/// lower bin. Throws TooFewSamples when fewer than 2 n_p samples exist.
std::vector<Peak> dft_peaks(const Signal &s, std::size_t n_p);

/// Local maxima above tau_factor * median magnitude that are not within
/// `exclusion` bins of an expected bin.
std::vector<std::size_t> spurious_peaks(const std::vector<double> &magnitudes, const std::vector<std::size_t> &expected,
                                        double tau_factor = 3.0, std::size_t exclusion = 1);

struct PencilOptions {
    /// 0 selects the order from singular values above sv_threshold * sigma_max.
    std::size_t model_order = 0;
    double sv_threshold = 1e-3;
    /// Lower bound on an automatically selected order.
    std::size_t min_order = 1;
    /// 0 picks N / 3.
    std::size_t pencil = 0;
};

/// Matrix-pencil pole estimate with least-squares amplitudes. Throws
/// IllConditioned when the signal carries no usable rank or the Vandermonde
/// solve breaks down.
ModeEstimate matrix_pencil(const Signal &s, std::size_t model_order);
ModeEstimate matrix_pencil(const Signal &s, const PencilOptions &opts);

/// Starting estimate from DFT peaks: g = 1, phases at bin centres.
ModeEstimate modes_from_peaks(const Signal &s, const std::vector<Peak> &peaks);

struct RefineOptions {
    std::size_t max_iterations = 500;
    double g_max = 1.05;
};

/// Levenberg-Marquardt over complex amplitudes and log-poles. Never returns a
/// larger residual than `init`; on hitting max_iterations it returns `init`
/// with converged = false.
ModeEstimate refine_fit(const Signal &s, const ModeEstimate &init, const RefineOptions &opts = {});

double model_residual(const Signal &s, const ModeEstimate &est);

/// The `count` modes of largest p, re-sorted by phase.
ModeEstimate dominant_modes(const ModeEstimate &est, std::size_t count);

struct PhaseErrorReport {
    std::vector<double> errors;  // per true phase
    std::vector<std::size_t> assignment;  // index into est.modes per true phase
    double mean = 0;
};

/// Minimum-total-circular-distance matching of true phases to distinct
/// estimated modes. Throws TooFewModes.
PhaseErrorReport estimation_error(const ModeEstimate &est, const std::vector<double> &truth);

std::string signal_to_csv(const Signal &s);
Signal signal_from_csv(const std::string &text);
nlohmann::json to_json(const ModeEstimate &est);
ModeEstimate mode_estimate_from_json(const nlohmann::json &j);

}  // namespace rcphase
