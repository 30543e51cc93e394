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


#include "rcphase/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "rcphase/error.hpp"
#include "rcphase/noise.hpp"
#include "rcphase/superop.hpp"

namespace rcphase {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

double unit_draw(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string strategy_to_string(RcStrategy s) {
    switch (s) {
        case RcStrategy::FreshPerL:
            return "fresh";
        case RcStrategy::SharedPrefix:
            return "shared_prefix";
        case RcStrategy::ExactTwirl:
            return "exact";
    }
    return "fresh";
}

RcStrategy strategy_from_string(const std::string &s) {
    if (s == "fresh") {
        return RcStrategy::FreshPerL;
    }
    if (s == "shared_prefix") {
        return RcStrategy::SharedPrefix;
    }
    if (s == "exact") {
        return RcStrategy::ExactTwirl;
    }
    throw Error(ErrorCode::BadParams, "unknown rc_strategy '" + s + "' (fresh|shared_prefix|exact)");
}

nlohmann::json instance_json(const FloquetInstanceConfig &c) {
    return {{"n", c.n}, {"seed", c.seed}};
}

FloquetInstanceConfig instance_from_json(const nlohmann::json &j, FloquetInstanceConfig d) {
    if (j.is_object()) {
        d.n = j.value("n", d.n);
        d.seed = j.value("seed", d.seed);
    }
    return d;
}

nlohmann::json noise_json(const NoiseConfig &c) {
    nlohmann::json j = {{"type", c.type}, {"strength", c.strength}, {"axis", c.axis}, {"seed", c.seed},
                        {"correlated_hard", c.correlated_hard}};
    if (c.px) {
        j["px"] = *c.px;
    }
    if (c.py) {
        j["py"] = *c.py;
    }
    if (c.pz) {
        j["pz"] = *c.pz;
    }
    return j;
}

NoiseConfig noise_from_json(const nlohmann::json &j, NoiseConfig d) {
    if (!j.is_object()) {
        return d;
    }
    d.type = j.value("type", d.type);
    d.strength = j.value("strength", d.strength);
    d.axis = j.value("axis", d.axis);
    d.seed = j.value("seed", d.seed);
    d.correlated_hard = j.value("correlated_hard", d.correlated_hard);
    if (j.contains("px")) {
        d.px = j.at("px").get<double>();
    }
    if (j.contains("py")) {
        d.py = j.at("py").get<double>();
    }
    if (j.contains("pz")) {
        d.pz = j.at("pz").get<double>();
    }
    return d;
}

void require_grid(const std::vector<double> &grid, const char *what) {
    if (grid.empty()) {
        throw Error(ErrorCode::BadParams, std::string(what) + " grid is empty");
    }
    for (double x : grid) {
        if (!(x > 0.0)) {
            throw Error(ErrorCode::BadParams, std::string(what) + " grid needs positive entries");
        }
    }
}

double max_of(const std::vector<double> &v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, x);
    }
    return m;
}

std::size_t mid_index(const std::vector<double> &grid) {
    return grid.size() / 2;
}

}  // namespace

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); i++) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); i++) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(ly.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); i++) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return sxy / sxx;
}

void write_file_atomic(const std::string &path, const std::string &text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::BadParams, "cannot write " + tmp);
        }
        out << text;
        if (!out) {
            throw Error(ErrorCode::BadParams, "write failed for " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

QpeConfig QpeInstance::qpe_config() const {
    QpeConfig q;
    q.circuit = circuit;
    q.phi0 = phi0;
    q.target = target;
    q.subspace = subspace;
    return q;
}

QpeInstance make_floquet_instance(const FloquetInstanceConfig &cfg) {
    if (cfg.n < 2 || cfg.n > 10) {
        throw Error(ErrorCode::BadParams, "Floquet instance needs 2 <= n <= 10");
    }
    const std::size_t n = cfg.n;
    std::mt19937_64 rng(cfg.seed);
    std::vector<double> sites(n);
    for (auto &h : sites) {
        h = (2.0 * unit_draw(rng) - 1.0) * kPi;
    }
    std::vector<CouplerParams> couplers(n - 1);
    for (auto &c : couplers) {
        c.theta = kPi / 8 + unit_draw(rng) * kPi / 4;
        c.phi = unit_draw(rng) * kPi / 2;
    }
    QpeInstance inst;
    inst.name = "floquet-n" + std::to_string(n) + "-seed" + std::to_string(cfg.seed);
    inst.circuit = build_floquet_circuit(n, sites, couplers);
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    ComplexMatrix block = ComplexMatrix::Zero(d, static_cast<Eigen::Index>(n));
    for (std::size_t q = 0; q < n; q++) {
        block(static_cast<Eigen::Index>(std::size_t{1} << (n - 1 - q)), static_cast<Eigen::Index>(q)) = 1.0;
    }
    inst.phi0 = ComplexVector::Zero(d);
    inst.phi0(0) = 1.0;
    inst.target = block.rowwise().sum() / std::sqrt(static_cast<double>(n));
    inst.subspace = block;
    return inst;
}

QpeInstance make_order_finding_instance() {
    QpeInstance inst;
    inst.name = "order-finding-4-mod-255";
    inst.circuit = build_order_finding_circuit(4, 255);
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << inst.circuit.n_qubits);
    inst.phi0 = ComplexVector::Zero(d);
    inst.phi0(0) = 1.0;
    inst.target = ComplexVector::Zero(d);
    inst.target(1) = 1.0;
    return inst;
}

// ---------------------------------------------------------------- theorem check

ComplexMatrix TheoremCase::unitary_matrix() const {
    if (unitary == "rx") {
        return make_gate("rx", {0}, {angles.at(0)}).matrix;
    }
    if (unitary == "rz_rx") {
        return make_gate("rz", {0}, {angles.at(0)}).matrix * make_gate("rx", {0}, {angles.at(1)}).matrix;
    }
    if (unitary == "random") {
        return random_unitary(4, unitary_seed);
    }
    throw Error(ErrorCode::BadParams, "unknown test unitary '" + unitary + "'");
}

KrausChannel TheoremCase::channel_at(double s) const {
    KrausChannel one;
    if (channel == "pauli") {
        one = make_stochastic_pauli(0.2 * s, 0.3 * s, 0.5 * s);
    } else if (channel == "dephasing") {
        one = make_stochastic_pauli(0.0, 0.0, s);
    } else if (channel == "depolarizing") {
        one = make_depolarizing(s);
    } else if (channel == "amp_damp") {
        one = make_amplitude_damping(s);
    } else if (channel == "coherent") {
        one = make_coherent(PauliString::parse(axis), s);
    } else {
        throw Error(ErrorCode::BadParams, "unknown channel '" + channel + "'");
    }
    return n_qubits() == 2 ? tensor(one, one) : one;
}

TheoremCheckConfig TheoremCheckConfig::defaults() {
    TheoremCheckConfig c;
    for (int i = 0; i <= 8; i++) {
        c.strengths.push_back(std::pow(10.0, -4.0 + 0.25 * i));
    }
    auto add = [&](std::string name, std::string u, std::vector<double> angles, std::string ch, std::string axis,
                   double slope) {
        TheoremCase tc;
        tc.name = std::move(name);
        tc.unitary = std::move(u);
        tc.angles = std::move(angles);
        tc.channel = std::move(ch);
        tc.axis = std::move(axis);
        tc.expected_slope = slope;
        c.cases.push_back(tc);
    };
    add("pauli_rzrx", "rz_rx", {0.4, 0.7}, "pauli", "Z", 2.0);
    add("dephasing_rx", "rx", {0.7}, "dephasing", "Z", 2.0);
    add("depolarizing_random2q", "random", {}, "depolarizing", "Z", 2.0);
    add("amp_damp_random2q", "random", {}, "amp_damp", "Z", 1.0);
    // One-qubit damping is first-order silent for every one-qubit unitary.
    add("amp_damp_rx", "rx", {0.7}, "amp_damp", "Z", 2.0);
    add("coherent_z_rzrx", "rz_rx", {0.4, 0.7}, "coherent", "Z", 1.0);
    add("coherent_x_rx", "rx", {0.7}, "coherent", "X", 1.0);
    add("coherent_z_random2q", "random", {}, "coherent", "Z", 1.0);
    // Z rotations are orthogonal to the eigenbasis of Rx, so the shift starts at second order.
    add("coherent_z_rx", "rx", {0.7}, "coherent", "Z", 2.0);
    return c;
}

TheoremCheckConfig TheoremCheckConfig::from_json(const nlohmann::json &j) {
    TheoremCheckConfig c = defaults();
    if (!j.is_object()) {
        return c;
    }
    c.strengths = j.value("strengths", c.strengths);
    c.slope_tolerance = j.value("slope_tolerance", c.slope_tolerance);
    if (j.contains("cases")) {
        c.cases.clear();
        for (const auto &e : j.at("cases")) {
            TheoremCase tc;
            tc.name = e.at("name").get<std::string>();
            tc.unitary = e.value("unitary", tc.unitary);
            tc.angles = e.value("angles", tc.angles);
            tc.unitary_seed = e.value("unitary_seed", tc.unitary_seed);
            tc.channel = e.value("channel", tc.channel);
            tc.axis = e.value("axis", tc.axis);
            tc.expected_slope = e.value("expected_slope", tc.expected_slope);
            c.cases.push_back(tc);
        }
    }
    return c;
}

nlohmann::json TheoremCheckConfig::to_json() const {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto &tc : cases) {
        cs.push_back({{"name", tc.name},
                      {"unitary", tc.unitary},
                      {"angles", tc.angles},
                      {"unitary_seed", tc.unitary_seed},
                      {"channel", tc.channel},
                      {"axis", tc.axis},
                      {"expected_slope", tc.expected_slope}});
    }
    return {{"experiment", "theorem-check"}, {"strengths", strengths}, {"slope_tolerance", slope_tolerance},
            {"cases", cs}};
}

bool TheoremCheckResult::pass() const {
    return !cases.empty() && std::all_of(cases.begin(), cases.end(), [](const auto &c) { return c.pass; });
}

std::string TheoremCheckResult::csv() const {
    std::string out = "case,strength,noise_strength,max_phase_shift,config_hash\n";
    for (const auto &r : rows) {
        out += r.name + "," + num(r.strength) + "," + num(r.noise_strength) + "," + num(r.max_shift) + "," +
               config_hash + "\n";
    }
    return out;
}

nlohmann::json TheoremCheckResult::summary() const {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto &c : cases) {
        cs.push_back({{"case", c.name}, {"slope", c.slope}, {"expected_slope", c.expected_slope}, {"pass", c.pass}});
    }
    return {{"experiment", "theorem-check"}, {"config_hash", config_hash}, {"cases", cs}, {"pass", pass()}};
}

TheoremCheckResult run_theorem_check(const TheoremCheckConfig &cfg) {
    require_grid(cfg.strengths, "strength");
    TheoremCheckResult res;
    res.config_hash = config_hash(cfg.to_json());
    for (const auto &tc : cfg.cases) {
        const ComplexMatrix u = tc.unitary_matrix();
        std::vector<double> xs, ys;
        for (double s : cfg.strengths) {
            KrausChannel ch = tc.channel_at(s);
            TheoremRow row{tc.name, s, noise_strength(ch), max_of(superop_eigenphase_shift(u, ch))};
            xs.push_back(row.noise_strength);
            ys.push_back(row.max_shift);
            res.rows.push_back(row);
        }
        TheoremCaseResult cr{tc.name, loglog_slope(xs, ys), tc.expected_slope, false};
        cr.pass = std::abs(cr.slope - cr.expected_slope) <= cfg.slope_tolerance;
        res.cases.push_back(cr);
    }
    return res;
}

// ---------------------------------------------------------------- scaling

ScalingConfig ScalingConfig::from_json(const nlohmann::json &j) {
    ScalingConfig c;
    if (!j.is_object()) {
        return c;
    }
    c.instance = instance_from_json(j.value("instance", nlohmann::json()), c.instance);
    c.probabilities = j.value("probabilities", c.probabilities);
    c.curves = j.value("curves", c.curves);
    c.weak_max = j.value("weak_max", c.weak_max);
    c.strong_min = j.value("strong_min", c.strong_min);
    c.l_max = j.value("l_max", c.l_max);
    c.sv_threshold = j.value("sv_threshold", c.sv_threshold);
    c.seed = j.value("seed", c.seed);
    c.noise_seed = j.value("noise_seed", c.noise_seed);
    c.threads = j.value("threads", c.threads);
    c.bare_check_curve = j.value("bare_check_curve", c.bare_check_curve);
    c.rc_slope_min = j.value("rc_slope_min", c.rc_slope_min);
    c.rc_slope_max = j.value("rc_slope_max", c.rc_slope_max);
    c.bare_slope_target = j.value("bare_slope_target", c.bare_slope_target);
    c.bare_slope_tolerance = j.value("bare_slope_tolerance", c.bare_slope_tolerance);
    return c;
}

nlohmann::json ScalingConfig::to_json() const {
    return {{"experiment", "scaling"},
            {"instance", instance_json(instance)},
            {"probabilities", probabilities},
            {"curves", curves},
            {"weak_max", weak_max},
            {"strong_min", strong_min},
            {"l_max", l_max},
            {"sv_threshold", sv_threshold},
            {"seed", seed},
            {"noise_seed", noise_seed},
            {"bare_check_curve", bare_check_curve},
            {"rc_slope_min", rc_slope_min},
            {"rc_slope_max", rc_slope_max},
            {"bare_slope_target", bare_slope_target},
            {"bare_slope_tolerance", bare_slope_tolerance}};
}

std::string ScalingResult::csv() const {
    std::string out = "curve,p,mean_phase_error,config_hash\n";
    for (const auto &r : rows) {
        out += r.curve + "," + num(r.p) + "," + num(r.error) + "," + config_hash + "\n";
    }
    return out;
}

nlohmann::json ScalingResult::summary() const {
    nlohmann::json sl = nlohmann::json::array();
    for (const auto &s : slopes) {
        sl.push_back({{"curve", s.curve}, {"weak_slope", s.weak}, {"strong_slope", s.strong}});
    }
    return {{"experiment", "scaling"},
            {"config_hash", config_hash},
            {"slopes", sl},
            {"rc_weak_slope", rc_weak},
            {"rc_strong_slope", rc_strong},
            {"bare_slope", bare_slope},
            {"rc_weak_ok", rc_weak_ok},
            {"rc_strong_ok", rc_strong_ok},
            {"bare_ok", bare_ok},
            {"pass", pass()}};
}

ScalingResult run_scaling(const ScalingConfig &cfg) {
    require_grid(cfg.probabilities, "probability");
    const QpeInstance inst = make_floquet_instance(cfg.instance);
    const GroundTruth truth = ground_truth(inst.circuit, inst.phi0, inst.target, &*inst.subspace);
    for (const auto &name : cfg.curves) {
        static const std::set<std::string> known = {"rc_pauli",    "bare_pauli",    "rc_amp_damp",
                                                    "bare_amp_damp", "rc_coherent", "bare_coherent"};
        if (known.count(name) == 0) {
            throw Error(ErrorCode::BadParams, "unknown scaling curve '" + name + "'");
        }
    }
    ScalingResult res;
    res.config_hash = config_hash(cfg.to_json());
    const std::size_t np = cfg.probabilities.size();
    std::vector<ScalingRow> rows(cfg.curves.size() * np);
    parallel_for(rows.size(), cfg.threads, [&](std::size_t idx) {
        const std::string &curve = cfg.curves[idx / np];
        const double p = cfg.probabilities[idx % np];
        QpeConfig q = inst.qpe_config();
        q.l_max = cfg.l_max;
        q.shots = 0;
        q.seed = cfg.seed;
        q.fit.auto_order = true;
        q.fit.sv_threshold = cfg.sv_threshold;
        q.mode = curve.rfind("rc_", 0) == 0 ? QpeMode::Rc : QpeMode::Bare;
        q.rc_strategy = RcStrategy::ExactTwirl;
        if (curve.find("coherent") != std::string::npos) {
            q.noise.type = "coherent";
            q.noise.strength = 2 * std::asin(p);
            q.noise.axis = "random-per-location";
            q.noise.seed = cfg.noise_seed;
        } else {
            q.noise.type = curve.find("pauli") != std::string::npos ? "pauli" : "amp_damp";
            q.noise.strength = p;
        }
        QpeReport rep = analyze_signal(q, truth, acquire_signal(q));
        rows[idx] = ScalingRow{curve, p, rep.error.mean};
    });
    res.rows = rows;
    for (std::size_t c = 0; c < cfg.curves.size(); c++) {
        std::vector<double> wx, wy, sx, sy;
        for (std::size_t i = 0; i < np; i++) {
            const auto &r = rows[c * np + i];
            if (r.p <= cfg.weak_max) {
                wx.push_back(r.p);
                wy.push_back(r.error);
            }
            if (r.p >= cfg.strong_min) {
                sx.push_back(r.p);
                sy.push_back(r.error);
            }
        }
        res.slopes.push_back(CurveSlopes{cfg.curves[c], loglog_slope(wx, wy), loglog_slope(sx, sy)});
    }
    for (const auto &s : res.slopes) {
        if (s.curve == "rc_pauli") {
            res.rc_weak = s.weak;
            res.rc_strong = s.strong;
        }
        if (s.curve == cfg.bare_check_curve) {
            res.bare_slope = s.weak;
        }
    }
    res.rc_weak_ok = res.rc_weak >= cfg.rc_slope_min && res.rc_weak <= cfg.rc_slope_max;
    res.rc_strong_ok = res.rc_strong < res.rc_weak;
    res.bare_ok = std::abs(res.bare_slope - cfg.bare_slope_target) <= cfg.bare_slope_tolerance;
    return res;
}

// ---------------------------------------------------------------- floquet

FloquetConfig FloquetConfig::from_json(const nlohmann::json &j) {
    FloquetConfig c;
    if (!j.is_object()) {
        return c;
    }
    c.instance = instance_from_json(j.value("instance", nlohmann::json()), c.instance);
    c.coherent_grid = j.value("coherent_grid", c.coherent_grid);
    c.amp_damp_grid = j.value("amp_damp_grid", c.amp_damp_grid);
    c.coherent_axis = j.value("coherent_axis", c.coherent_axis);
    c.shots = j.value("shots", c.shots);
    c.n_r = j.value("n_r", c.n_r);
    c.l_max = j.value("l_max", c.l_max);
    c.seed = j.value("seed", c.seed);
    c.noise_seed = j.value("noise_seed", c.noise_seed);
    c.rc_strategy = strategy_from_string(j.value("rc_strategy", strategy_to_string(c.rc_strategy)));
    c.strong_points = j.value("strong_points", c.strong_points);
    c.coherent_factor = j.value("coherent_factor", c.coherent_factor);
    c.amp_damp_ratio = j.value("amp_damp_ratio", c.amp_damp_ratio);
    c.threads = j.value("threads", c.threads);
    c.mid_grid_only = j.value("mid_grid_only", c.mid_grid_only);
    return c;
}

nlohmann::json FloquetConfig::to_json() const {
    return {{"experiment", "floquet"},
            {"instance", instance_json(instance)},
            {"coherent_grid", coherent_grid},
            {"amp_damp_grid", amp_damp_grid},
            {"coherent_axis", coherent_axis},
            {"shots", shots},
            {"n_r", n_r},
            {"l_max", l_max},
            {"seed", seed},
            {"noise_seed", noise_seed},
            {"rc_strategy", strategy_to_string(rc_strategy)},
            {"strong_points", strong_points},
            {"coherent_factor", coherent_factor},
            {"amp_damp_ratio", amp_damp_ratio},
            {"mid_grid_only", mid_grid_only}};
}

std::string FloquetResult::csv() const {
    std::string out = "family,strength,mode,mean_phase_error,config_hash\n";
    for (const auto &p : points) {
        out += p.family + "," + num(p.strength) + ",bare," + num(p.bare.error.mean) + "," + config_hash + "\n";
        out += p.family + "," + num(p.strength) + ",rc," + num(p.rc.error.mean) + "," + config_hash + "\n";
    }
    return out;
}

nlohmann::json FloquetResult::summary() const {
    return {{"experiment", "floquet"},
            {"config_hash", config_hash},
            {"coherent_mid", {{"bare", coherent_mid_bare}, {"rc", coherent_mid_rc}}},
            {"amp_damp_mid", {{"bare", amp_damp_mid_bare}, {"rc", amp_damp_mid_rc}}},
            {"coherent_rc_strong_exponent", coherent_rc_exponent},
            {"amp_damp_rc_strong_exponent", amp_damp_rc_exponent},
            {"coherent_ok", coherent_ok},
            {"amp_damp_ok", amp_damp_ok},
            {"pass", pass()}};
}

FloquetResult run_floquet(const FloquetConfig &cfg) {
    require_grid(cfg.coherent_grid, "coherent");
    require_grid(cfg.amp_damp_grid, "amplitude-damping");
    const QpeInstance inst = make_floquet_instance(cfg.instance);
    const GroundTruth truth = ground_truth(inst.circuit, inst.phi0, inst.target, &*inst.subspace);

    struct Job {
        std::string family;
        double strength;
        bool rc;
    };
    std::vector<Job> jobs;
    auto add_family = [&](const std::string &family, const std::vector<double> &grid) {
        for (std::size_t i = 0; i < grid.size(); i++) {
            if (cfg.mid_grid_only && i != mid_index(grid)) {
                continue;
            }
            jobs.push_back({family, grid[i], false});
            jobs.push_back({family, grid[i], true});
        }
    };
    add_family("coherent", cfg.coherent_grid);
    add_family("amp_damp", cfg.amp_damp_grid);

    std::vector<QpeReport> reports(jobs.size());
    parallel_for(jobs.size(), cfg.threads, [&](std::size_t idx) {
        const Job &job = jobs[idx];
        QpeConfig q = inst.qpe_config();
        q.l_max = cfg.l_max;
        q.shots = cfg.shots;
        q.n_r = cfg.n_r;
        q.seed = cfg.seed;
        q.mode = job.rc ? QpeMode::Rc : QpeMode::Bare;
        q.rc_strategy = cfg.rc_strategy;
        q.noise.type = job.family;
        q.noise.strength = job.strength;
        q.noise.seed = cfg.noise_seed;
        if (job.family == "coherent") {
            q.noise.axis = cfg.coherent_axis;
        }
        reports[idx] = analyze_signal(q, truth, acquire_signal(q));
    });

    FloquetResult res;
    res.config_hash = config_hash(cfg.to_json());
    for (std::size_t i = 0; i < jobs.size(); i += 2) {
        res.points.push_back(FloquetPoint{jobs[i].family, jobs[i].strength, reports[i], reports[i + 1]});
    }
    auto family_stats = [&](const std::string &family, const std::vector<double> &grid, double &bare_mid,
                            double &rc_mid, double &exponent) {
        std::vector<double> xs, ys;
        for (const auto &p : res.points) {
            if (p.family != family) {
                continue;
            }
            if (p.strength == grid[mid_index(grid)]) {
                bare_mid = p.bare.error.mean;
                rc_mid = p.rc.error.mean;
            }
            xs.push_back(p.strength);
            ys.push_back(p.rc.error.mean);
        }
        const std::size_t k = std::min(cfg.strong_points, xs.size());
        exponent = loglog_slope(std::vector<double>(xs.end() - static_cast<std::ptrdiff_t>(k), xs.end()),
                                std::vector<double>(ys.end() - static_cast<std::ptrdiff_t>(k), ys.end()));
    };
    family_stats("coherent", cfg.coherent_grid, res.coherent_mid_bare, res.coherent_mid_rc, res.coherent_rc_exponent);
    family_stats("amp_damp", cfg.amp_damp_grid, res.amp_damp_mid_bare, res.amp_damp_mid_rc, res.amp_damp_rc_exponent);
    res.coherent_ok = res.coherent_mid_rc <= res.coherent_mid_bare / cfg.coherent_factor;
    res.amp_damp_ok = res.amp_damp_mid_rc <= cfg.amp_damp_ratio * res.amp_damp_mid_bare;
    return res;
}

// ---------------------------------------------------------------- order finding

OrderFindingConfig::OrderFindingConfig() {
    noise.type = "coherent";
    noise.strength = 0.05;
    noise.axis = "random-per-location";
    noise.seed = 7;
}

OrderFindingConfig OrderFindingConfig::from_json(const nlohmann::json &j) {
    OrderFindingConfig c;
    if (!j.is_object()) {
        return c;
    }
    c.shots = j.value("shots", c.shots);
    c.l_min = j.value("l_min", c.l_min);
    c.l_max = j.value("l_max", c.l_max);
    c.noise = noise_from_json(j.value("noise", nlohmann::json()), c.noise);
    c.n_r = j.value("n_r", c.n_r);
    c.seed = j.value("seed", c.seed);
    c.rc_strategy = strategy_from_string(j.value("rc_strategy", strategy_to_string(c.rc_strategy)));
    c.tau_factor = j.value("tau_factor", c.tau_factor);
    c.exclusion = j.value("exclusion", c.exclusion);
    c.expected_bins = j.value("expected_bins", c.expected_bins);
    c.threads = j.value("threads", c.threads);
    return c;
}

nlohmann::json OrderFindingConfig::to_json() const {
    return {{"experiment", "order-finding"},
            {"shots", shots},
            {"l_min", l_min},
            {"l_max", l_max},
            {"noise", noise_json(noise)},
            {"n_r", n_r},
            {"seed", seed},
            {"rc_strategy", strategy_to_string(rc_strategy)},
            {"tau_factor", tau_factor},
            {"exclusion", exclusion},
            {"expected_bins", expected_bins}};
}

bool OrderFindingResult::noiseless_ok(const std::vector<std::size_t> &expected) const {
    std::vector<std::size_t> e = expected;
    std::sort(e.begin(), e.end());
    return noiseless.peak_bins == e && noiseless.spurious.empty();
}

bool OrderFindingResult::pass(const std::vector<std::size_t> &expected) const {
    return noiseless_ok(expected) && !bare.spurious.empty() && rc.spurious.empty() && rc.mean_error < bare.mean_error;
}

std::string OrderFindingResult::csv() const {
    std::string out = "bin,noiseless,bare,rc,config_hash\n";
    for (std::size_t k = 0; k < noiseless.magnitudes.size(); k++) {
        out += std::to_string(k) + "," + num(noiseless.magnitudes[k]) + "," + num(bare.magnitudes.at(k)) + "," +
               num(rc.magnitudes.at(k)) + "," + config_hash + "\n";
    }
    return out;
}

nlohmann::json OrderFindingResult::summary() const {
    auto one = [](const SpectrumSummary &s) {
        return nlohmann::json{{"peak_bins", s.peak_bins}, {"spurious_bins", s.spurious},
                              {"spurious_count", s.spurious.size()}, {"mean_phase_error", s.mean_error}};
    };
    return {{"experiment", "order-finding"},
            {"config_hash", config_hash},
            {"noiseless", one(noiseless)},
            {"bare", one(bare)},
            {"rc", one(rc)}};
}

OrderFindingResult run_order_finding(const OrderFindingConfig &cfg) {
    const QpeInstance inst = make_order_finding_instance();
    const GroundTruth truth = ground_truth(inst.circuit, inst.phi0, inst.target);
    OrderFindingResult res;
    res.config_hash = config_hash(cfg.to_json());
    auto run = [&](bool noisy, bool rc, SpectrumSummary &spec, QpeReport &rep) {
        QpeConfig q = inst.qpe_config();
        q.l_min = cfg.l_min;
        q.l_max = cfg.l_max;
        q.shots = cfg.shots;
        q.n_r = cfg.n_r;
        q.seed = cfg.seed;
        q.threads = cfg.threads;
        q.mode = rc ? QpeMode::Rc : QpeMode::Bare;
        q.rc_strategy = cfg.rc_strategy;
        if (noisy) {
            q.noise = cfg.noise;
        }
        rep = analyze_signal(q, truth, acquire_signal(q));
        spec.magnitudes = dft_magnitudes(rep.signal);
        for (const auto &pk : dft_peaks(rep.signal, cfg.expected_bins.size())) {
            spec.peak_bins.push_back(pk.bin);
        }
        std::sort(spec.peak_bins.begin(), spec.peak_bins.end());
        spec.spurious = spurious_peaks(spec.magnitudes, cfg.expected_bins, cfg.tau_factor, cfg.exclusion);
        spec.mean_error = rep.error.mean;
    };
    run(false, false, res.noiseless, res.noiseless_report);
    run(true, false, res.bare, res.bare_report);
    run(true, true, res.rc, res.rc_report);
    return res;
}

// ---------------------------------------------------------------- N_r sweep

NrSweepConfig NrSweepConfig::from_json(const nlohmann::json &j) {
    NrSweepConfig c;
    if (!j.is_object()) {
        return c;
    }
    c.instance = instance_from_json(j.value("instance", nlohmann::json()), c.instance);
    c.noise_type = j.value("noise_type", c.noise_type);
    c.strength = j.value("strength", c.strength);
    c.axis = j.value("axis", c.axis);
    c.n_rs = j.value("n_rs", c.n_rs);
    c.shots = j.value("shots", c.shots);
    c.l_max = j.value("l_max", c.l_max);
    c.seeds = j.value("seeds", c.seeds);
    c.seed = j.value("seed", c.seed);
    c.slope_target = j.value("slope_target", c.slope_target);
    c.slope_tolerance = j.value("slope_tolerance", c.slope_tolerance);
    c.threads = j.value("threads", c.threads);
    return c;
}

nlohmann::json NrSweepConfig::to_json() const {
    return {{"experiment", "nr-sweep"},
            {"instance", instance_json(instance)},
            {"noise_type", noise_type},
            {"strength", strength},
            {"axis", axis},
            {"n_rs", n_rs},
            {"shots", shots},
            {"l_max", l_max},
            {"seeds", seeds},
            {"seed", seed},
            {"slope_target", slope_target},
            {"slope_tolerance", slope_tolerance}};
}

std::string NrSweepResult::csv() const {
    std::string out = "seed_index,n_r,mean_phase_error,config_hash\n";
    for (std::size_t s = 0; s < errors.size(); s++) {
        for (std::size_t k = 0; k < n_rs.size(); k++) {
            out += std::to_string(s) + "," + std::to_string(n_rs[k]) + "," + num(errors[s][k]) + "," + config_hash +
                   "\n";
        }
    }
    for (std::size_t k = 0; k < n_rs.size(); k++) {
        out += "mean," + std::to_string(n_rs[k]) + "," + num(mean_errors[k]) + "," + config_hash + "\n";
    }
    return out;
}

nlohmann::json NrSweepResult::summary() const {
    return {{"experiment", "nr-sweep"}, {"config_hash", config_hash}, {"n_rs", n_rs},
            {"mean_errors", mean_errors}, {"slope", slope},         {"pass", pass}};
}

NrSweepResult run_nr_sweep(const NrSweepConfig &cfg) {
    if (cfg.n_rs.size() < 2 || cfg.seeds == 0) {
        throw Error(ErrorCode::BadParams, "N_r sweep needs at least two ensemble sizes and one seed");
    }
    const QpeInstance inst = make_floquet_instance(cfg.instance);
    const GroundTruth truth = ground_truth(inst.circuit, inst.phi0, inst.target, &*inst.subspace);
    NrSweepResult res;
    res.n_rs = cfg.n_rs;
    res.config_hash = config_hash(cfg.to_json());
    for (std::size_t s = 0; s < cfg.seeds; s++) {
        QpeConfig q = inst.qpe_config();
        q.l_max = cfg.l_max;
        q.shots = cfg.shots;
        q.mode = QpeMode::Rc;
        q.rc_strategy = RcStrategy::FreshPerL;
        q.seed = derive_seed(cfg.seed, s);
        q.threads = cfg.threads;
        q.noise.type = cfg.noise_type;
        q.noise.strength = cfg.strength;
        q.noise.axis = cfg.axis;
        q.noise.seed = derive_seed(cfg.seed, s, 1);
        std::vector<Signal> sigs = acquire_nested_signals(q, cfg.n_rs);
        std::vector<double> row;
        for (std::size_t k = 0; k < cfg.n_rs.size(); k++) {
            q.n_r = cfg.n_rs[k];
            row.push_back(analyze_signal(q, truth, std::move(sigs[k])).error.mean);
        }
        res.errors.push_back(row);
    }
    std::vector<double> xs;
    for (std::size_t k = 0; k < cfg.n_rs.size(); k++) {
        double m = 0;
        for (const auto &row : res.errors) {
            m += row[k];
        }
        res.mean_errors.push_back(m / static_cast<double>(res.errors.size()));
        xs.push_back(static_cast<double>(cfg.n_rs[k]));
    }
    res.slope = loglog_slope(xs, res.mean_errors);
    res.pass = std::abs(res.slope - cfg.slope_target) <= cfg.slope_tolerance;
    return res;
}

}  // namespace rcphase
