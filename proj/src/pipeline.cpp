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

#include "rcphase/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "rcphase/error.hpp"
#include "rcphase/randomized_compiling.hpp"
#include "rcphase/superop.hpp"

namespace rcphase {

namespace {

constexpr std::uint64_t kTwirlStream = 1;
constexpr std::uint64_t kSampleStream = 2;

std::size_t state_dim(const Circuit &c) {
    return std::size_t{1} << c.n_qubits;
}

/// Shot-sampled or exact value of 2<t|rho|phi0>.
class Sampler {
   public:
    Sampler(const ObservablePair &obs, double readout)
        : obs_(obs),
          re_(MeasurementBasis::from_hermitian(obs.h_re())),
          im_(MeasurementBasis::from_hermitian(obs.h_im())),
          readout_(readout) {
    }

    template <typename State>
    cd value(const State &state, std::uint64_t shots, std::uint64_t seed_re, std::uint64_t seed_im) const {
        if (shots == 0) {
            return expect_complex(state, obs_);
        }
        double re = re_.sample(re_.probabilities(state), ShotConfig{shots, seed_re, readout_});
        double im = im_.sample(im_.probabilities(state), ShotConfig{shots, seed_im, readout_});
        return {re, im};
    }

   private:
    ObservablePair obs_;
    MeasurementBasis re_, im_;
    double readout_;
};

std::uint64_t sample_seed(std::uint64_t master, std::size_t l, std::size_t r, int component) {
    return derive_seed(derive_seed(master, kSampleStream), l, r, static_cast<std::uint64_t>(component));
}

std::uint64_t twirl_seed(std::uint64_t master, std::size_t l, std::size_t r) {
    return derive_seed(derive_seed(master, kTwirlStream), l, r);
}

DensityMatrix prepared_density(const QpeConfig &cfg, const ObservablePair &obs) {
    DensityMatrix rho = DensityMatrix::from_pure(obs.superposition());
    if (cfg.spam.prep_depolarizing > 0.0) {
        ComplexMatrix s = superoperator(make_depolarizing(cfg.spam.prep_depolarizing), 2);
        for (std::size_t q = 0; q < cfg.circuit.n_qubits; q++) {
            apply_local_superoperator(rho, {q}, s);
        }
    }
    return rho;
}

}  // namespace

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &fn) {
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; i++) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; w++) {
        pool.emplace_back([&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next.store(count);
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void validate(const QpeConfig &cfg) {
    validate(cfg.circuit);
    const auto d = static_cast<Eigen::Index>(state_dim(cfg.circuit));
    if (cfg.phi0.size() != d || cfg.target.size() != d) {
        throw Error(ErrorCode::DimensionMismatch, "reference and target must have length 2^n");
    }
    if (cfg.l_min > cfg.l_max) {
        throw Error(ErrorCode::BadParams, "l_min exceeds l_max");
    }
    if (cfg.spam.prep_depolarizing < 0 || cfg.spam.prep_depolarizing > 1 || cfg.spam.readout_error < 0 ||
        cfg.spam.readout_error > 1) {
        throw Error(ErrorCode::BadProbabilities, "SPAM probabilities must lie in [0, 1]");
    }
    if (cfg.mode == QpeMode::Rc) {
        if (cfg.n_r < 1) {
            throw Error(ErrorCode::BadParams, "rc mode needs n_r >= 1");
        }
        if (cfg.rc_strategy != RcStrategy::ExactTwirl && cfg.shots % cfg.n_r != 0) {
            throw Error(ErrorCode::ShotSplit, "N_s = " + std::to_string(cfg.shots) + " is not divisible by N_r = " +
                                                  std::to_string(cfg.n_r));
        }
    }
    if (cfg.custom_noise && cfg.custom_noise->n_qubits() != cfg.circuit.n_qubits) {
        throw Error(ErrorCode::DimensionMismatch, "noise model qubit count differs from circuit");
    }
}

NoiseModel noise_model(const QpeConfig &cfg) {
    if (cfg.custom_noise) {
        return *cfg.custom_noise;
    }
    return NoiseModel::from_config(cfg.noise, cfg.circuit.n_qubits);
}

GroundTruth ground_truth(const Circuit &c, const ComplexVector &phi0_in, const ComplexVector &target_in,
                         const ComplexMatrix *subspace) {
    validate(c);
    const auto d = static_cast<Eigen::Index>(state_dim(c));
    if (phi0_in.size() != d || target_in.size() != d) {
        throw Error(ErrorCode::DimensionMismatch, "reference and target must have length 2^n");
    }
    ComplexVector phi0 = phi0_in.normalized();
    ComplexVector target = target_in.normalized();
    NoisyEvolver evolver(c.n_qubits, nullptr);
    ComplexVector u_phi0 = phi0;
    evolver.run(u_phi0, c);
    cd overlap = phi0.dot(u_phi0);
    if (std::abs(overlap) < 1.0 - 1e-8) {
        throw Error(ErrorCode::ReferenceNotEigenstate,
                    "|<phi0|U|phi0>| = " + std::to_string(std::abs(overlap)) + " (must be 1)");
    }
    GroundTruth gt;
    gt.lambda0 = std::arg(overlap);
    UnitarySpectrum spec;
    ComplexVector coords;
    if (subspace != nullptr) {
        const ComplexMatrix &b = *subspace;
        if (b.rows() != d) {
            throw Error(ErrorCode::DimensionMismatch, "subspace basis has the wrong row count");
        }
        ComplexMatrix w(b.rows(), b.cols());
        for (Eigen::Index k = 0; k < b.cols(); k++) {
            ComplexVector v = b.col(k);
            evolver.run(v, c);
            w.col(k) = v;
        }
        ComplexMatrix block = b.adjoint() * w;
        if (max_abs(w - b * block) > 1e-8) {
            throw Error(ErrorCode::BadParams, "subspace is not invariant under the circuit");
        }
        coords = b.adjoint() * target;
        if ((b * coords - target).norm() > 1e-8) {
            throw Error(ErrorCode::BadParams, "target does not lie in the subspace");
        }
        spec = eig_unitary(block);
    } else {
        spec = eig_unitary(circuit_unitary(c));
        coords = target;
    }
    std::vector<std::pair<double, double>> pw;
    for (std::size_t k = 0; k < spec.phases.size(); k++) {
        double w = std::norm(spec.eigenvectors.col(static_cast<Eigen::Index>(k)).dot(coords));
        pw.emplace_back(wrap_phase(spec.phases[k] - gt.lambda0), w);
    }
    std::sort(pw.begin(), pw.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto &[ph, w] : pw) {
        if (!merged.empty() && ph - merged.back().first <= 1e-9) {
            merged.back().second += w;
        } else {
            merged.emplace_back(ph, w);
        }
    }
    if (merged.size() > 1 && circular_distance(merged.front().first, merged.back().first) <= 1e-9) {
        merged.back().second += merged.front().second;
        merged.erase(merged.begin());
    }
    for (const auto &[ph, w] : merged) {
        if (w >= 1e-6) {
            gt.phases.push_back(ph);
            gt.weights.push_back(w);
        }
    }
    gt.n_p = gt.phases.size();
    return gt;
}

std::vector<Signal> acquire_nested_signals(const QpeConfig &cfg, const std::vector<std::size_t> &n_rs) {
    if (n_rs.empty()) {
        throw Error(ErrorCode::BadParams, "no ensemble sizes requested");
    }
    std::vector<Signal> out;
    std::size_t n_max = 0;
    for (std::size_t nr : n_rs) {
        QpeConfig one = cfg;
        one.mode = QpeMode::Rc;
        one.rc_strategy = RcStrategy::FreshPerL;
        one.n_r = nr;
        validate(one);
        n_max = std::max(n_max, nr);
        Signal sig;
        sig.values.assign(cfg.l_max - cfg.l_min + 1, cd(0, 0));
        sig.l_offset = cfg.l_min;
        sig.shots = cfg.shots;
        sig.seed = cfg.seed;
        sig.mode = "rc";
        sig.n_r = nr;
        out.push_back(std::move(sig));
    }
    const Circuit &u = cfg.circuit;
    require_clifford_hard_layers(u);
    const std::size_t n = u.n_qubits;
    const NoiseModel noise = noise_model(cfg);
    const NoiseModel *np = noise.is_noiseless() ? nullptr : &noise;
    const ObservablePair obs = ObservablePair::make(cfg.phi0, cfg.target);
    const Sampler sampler(obs, cfg.spam.readout_error);
    const bool pure = cfg.spam.prep_depolarizing == 0.0 && (np == nullptr || noise.is_unitary());
    const DensityMatrix rho0 = prepared_density(cfg, obs);
    const ComplexVector psi0 = obs.superposition();
    const std::size_t count = cfg.l_max - cfg.l_min + 1;

    // Member r of every ensemble is the same circuit; only its shot budget differs.
    parallel_for(count, cfg.threads, [&](std::size_t idx) {
        const std::size_t l = cfg.l_min + idx;
        const Circuit bare = repeat(u, l);
        NoisyEvolver evolver(n, np);
        std::vector<cd> acc(n_rs.size(), cd(0, 0));
        for (std::size_t r = 0; r < n_max; r++) {
            std::vector<PauliString> tw = cfg.identity_twirls ? std::vector<PauliString>(bare.cycles.size(), PauliString(n))
                                                              : draw_twirls(n, bare.cycles.size(), twirl_seed(cfg.seed, l, r));
            Circuit member = randomize(bare, tw);
            const std::uint64_t s_re = sample_seed(cfg.seed, l, r, 0), s_im = sample_seed(cfg.seed, l, r, 1);
            auto record = [&](const auto &state) {
                for (std::size_t k = 0; k < n_rs.size(); k++) {
                    if (r < n_rs[k]) {
                        acc[k] += sampler.value(state, cfg.shots / n_rs[k], s_re, s_im);
                    }
                }
            };
            if (pure) {
                ComplexVector psi = psi0;
                evolver.run(psi, member);
                record(psi);
            } else {
                DensityMatrix rho = rho0;
                evolver.run(rho, member);
                record(rho);
            }
        }
        for (std::size_t k = 0; k < n_rs.size(); k++) {
            out[k].values[idx] = acc[k] / static_cast<double>(n_rs[k]);
        }
    });
    return out;
}

Signal acquire_signal(const QpeConfig &cfg) {
    validate(cfg);
    const Circuit &u = cfg.circuit;
    const std::size_t n = u.n_qubits;
    const NoiseModel noise = noise_model(cfg);
    const NoiseModel *np = noise.is_noiseless() ? nullptr : &noise;
    const ObservablePair obs = ObservablePair::make(cfg.phi0, cfg.target);
    const Sampler sampler(obs, cfg.spam.readout_error);
    const std::size_t count = cfg.l_max - cfg.l_min + 1;

    Signal sig;
    sig.values.assign(count, cd(0, 0));
    sig.l_offset = cfg.l_min;
    sig.shots = cfg.shots;
    sig.seed = cfg.seed;
    sig.mode = cfg.mode == QpeMode::Bare ? "bare" : "rc";
    sig.n_r = cfg.mode == QpeMode::Bare ? 0 : cfg.n_r;

    const bool pure = cfg.spam.prep_depolarizing == 0.0 && (np == nullptr || noise.is_unitary());
    const DensityMatrix rho0 = prepared_density(cfg, obs);
    const ComplexVector psi0 = obs.superposition();

    if (cfg.mode == QpeMode::Bare || (cfg.rc_strategy == RcStrategy::ExactTwirl && np == nullptr)) {
        NoisyEvolver evolver(n, np);
        auto sweep = [&](auto state) {
            for (std::size_t l = 0; l <= cfg.l_max; l++) {
                if (l >= cfg.l_min) {
                    sig.values[l - cfg.l_min] =
                        sampler.value(state, cfg.shots, sample_seed(cfg.seed, l, 0, 0), sample_seed(cfg.seed, l, 0, 1));
                }
                if (l < cfg.l_max) {
                    evolver.run(state, u);
                }
            }
        };
        if (pure) {
            sweep(psi0);
        } else {
            sweep(rho0);
        }
        return sig;
    }

    if (cfg.rc_strategy == RcStrategy::ExactTwirl) {
        std::vector<std::vector<double>> fidelities;
        for (const auto &cycle : u.cycles) {
            fidelities.push_back(twirled_cycle_fidelities(cycle, n, noise));
        }
        NoisyEvolver ideal(n, nullptr);
        DensityMatrix rho = rho0;
        for (std::size_t l = 0; l <= cfg.l_max; l++) {
            if (l >= cfg.l_min) {
                sig.values[l - cfg.l_min] =
                    sampler.value(rho, cfg.shots, sample_seed(cfg.seed, l, 0, 0), sample_seed(cfg.seed, l, 0, 1));
            }
            if (l < cfg.l_max) {
                for (std::size_t k = 0; k < u.cycles.size(); k++) {
                    ideal.run_cycle(rho, u.cycles[k]);
                    apply_pauli_diagonal(rho, fidelities[k]);
                }
            }
        }
        return sig;
    }

    if (cfg.rc_strategy == RcStrategy::FreshPerL) {
        return std::move(acquire_nested_signals(cfg, {cfg.n_r}).front());
    }

    require_clifford_hard_layers(u);
    const std::uint64_t member_shots = cfg.shots / cfg.n_r;
    const std::size_t k_cycles = u.cycles.size();
    auto twirls_for = [&](std::size_t l, std::size_t r, std::size_t cycles) {
        if (cfg.identity_twirls) {
            return std::vector<PauliString>(cycles, PauliString(n));
        }
        return draw_twirls(n, cycles, twirl_seed(cfg.seed, l, r));
    };

    // Shared prefix: one twirled repeat(U, l_max) per member, sampled after every period.
    std::vector<std::vector<cd>> per_member(cfg.n_r, std::vector<cd>(count));
    const Circuit longest = repeat(u, cfg.l_max);
    parallel_for(cfg.n_r, cfg.threads, [&](std::size_t r) {
        std::vector<PauliString> tw = twirls_for(cfg.l_max, r, longest.cycles.size());
        Circuit member = randomize(longest, tw);
        NoisyEvolver evolver(n, np);
        auto sweep = [&](auto state) {
            for (std::size_t l = 0; l <= cfg.l_max; l++) {
                if (l >= cfg.l_min) {
                    auto frame = state;
                    if (l > 0) {
                        std::size_t last = l * k_cycles - 1;
                        Circuit term{n, {}, terminal_frame(longest.cycles[last].hard, tw[last])};
                        evolver.run(frame, term);
                    }
                    per_member[r][l - cfg.l_min] = sampler.value(frame, member_shots, sample_seed(cfg.seed, l, r, 0),
                                                                 sample_seed(cfg.seed, l, r, 1));
                }
                if (l < cfg.l_max) {
                    for (std::size_t k = l * k_cycles; k < (l + 1) * k_cycles; k++) {
                        evolver.run_cycle(state, member.cycles[k]);
                    }
                }
            }
        };
        if (pure) {
            sweep(psi0);
        } else {
            sweep(rho0);
        }
    });
    for (std::size_t idx = 0; idx < count; idx++) {
        cd acc = 0;
        for (std::size_t r = 0; r < cfg.n_r; r++) {
            acc += per_member[r][idx];
        }
        sig.values[idx] = acc / static_cast<double>(cfg.n_r);
    }
    return sig;
}

QpeReport analyze_signal(const QpeConfig &cfg, const GroundTruth &truth, Signal signal) {
    QpeReport rep;
    rep.truth = truth;
    rep.config = config_to_json(cfg);
    rep.config_hash = config_hash(rep.config);
    const std::size_t n_p = cfg.n_p != 0 ? cfg.n_p : truth.n_p;
    PencilOptions po;
    po.sv_threshold = cfg.fit.sv_threshold;
    po.min_order = n_p;
    po.model_order = cfg.fit.auto_order ? 0 : (cfg.fit.model_order != 0 ? cfg.fit.model_order : n_p);
    ModeEstimate init;
    try {
        init = matrix_pencil(signal, po);
    } catch (const Error &e) {
        if (e.code() != ErrorCode::IllConditioned) {
            throw;
        }
        init = modes_from_peaks(signal, dft_peaks(signal, n_p));
        init.ill_conditioned = true;
    }
    rep.fit = cfg.fit.refine ? refine_fit(signal, init) : init;
    rep.selected = dominant_modes(rep.fit, n_p);
    rep.error = estimation_error(rep.selected, truth.phases);
    rep.signal = std::move(signal);
    return rep;
}

QpeReport run_qpe(const QpeConfig &cfg) {
    validate(cfg);
    GroundTruth truth =
        ground_truth(cfg.circuit, cfg.phi0, cfg.target, cfg.subspace ? &*cfg.subspace : nullptr);
    return analyze_signal(cfg, truth, acquire_signal(cfg));
}

namespace {

nlohmann::json vector_json(const ComplexVector &v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); i++) {
        out.push_back({v(i).real(), v(i).imag()});
    }
    return out;
}

const char *strategy_name(RcStrategy s) {
    switch (s) {
        case RcStrategy::FreshPerL:
            return "fresh_per_l";
        case RcStrategy::SharedPrefix:
            return "shared_prefix";
        case RcStrategy::ExactTwirl:
            return "exact_twirl";
    }
    return "?";
}

}  // namespace

nlohmann::json config_to_json(const QpeConfig &cfg) {
    nlohmann::json j;
    j["circuit"] = nlohmann::json::parse(serialize(cfg.circuit));
    j["phi0"] = vector_json(cfg.phi0);
    j["target"] = vector_json(cfg.target);
    j["subspace_dim"] = cfg.subspace ? cfg.subspace->cols() : 0;
    j["l_min"] = cfg.l_min;
    j["l_max"] = cfg.l_max;
    j["shots"] = cfg.shots;
    j["n_r"] = cfg.n_r;
    j["mode"] = cfg.mode == QpeMode::Bare ? "bare" : "rc";
    j["rc_strategy"] = strategy_name(cfg.rc_strategy);
    if (cfg.custom_noise) {
        j["noise"] = {{"type", cfg.custom_noise->kind}, {"strength", cfg.custom_noise->strength}};
    } else {
        nlohmann::json nz = {{"type", cfg.noise.type},
                             {"strength", cfg.noise.strength},
                             {"axis", cfg.noise.axis},
                             {"seed", cfg.noise.seed},
                             {"correlated_hard", cfg.noise.correlated_hard}};
        if (cfg.noise.px) {
            nz["px"] = *cfg.noise.px;
        }
        if (cfg.noise.py) {
            nz["py"] = *cfg.noise.py;
        }
        if (cfg.noise.pz) {
            nz["pz"] = *cfg.noise.pz;
        }
        j["noise"] = nz;
    }
    j["spam"] = {{"prep_depolarizing", cfg.spam.prep_depolarizing}, {"readout_error", cfg.spam.readout_error}};
    j["seed"] = cfg.seed;
    j["n_p"] = cfg.n_p;
    j["fit"] = {{"model_order", cfg.fit.model_order},
                {"auto_order", cfg.fit.auto_order},
                {"sv_threshold", cfg.fit.sv_threshold},
                {"refine", cfg.fit.refine}};
    j["identity_twirls"] = cfg.identity_twirls;
    return j;
}

std::string config_hash(const nlohmann::json &config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json QpeReport::to_json() const {
    nlohmann::json j;
    j["config"] = config;
    j["config_hash"] = config_hash;
    j["ground_truth"] = {{"phases", truth.phases}, {"weights", truth.weights}, {"n_p", truth.n_p},
                         {"lambda0", truth.lambda0}};
    j["modes"] = rcphase::to_json(selected);
    j["fit"] = rcphase::to_json(fit);
    j["mean_phase_error"] = error.mean;
    j["phase_errors"] = error.errors;
    j["signal"] = {{"l_min", signal.l_offset}, {"l_max", signal.l_max()}, {"mode", signal.mode},
                   {"shots", signal.shots}, {"n_r", signal.n_r}, {"seed", signal.seed}};
    return j;
}

}  // namespace rcphase
