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

#include "rcphase/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rcphase/error.hpp"

namespace rcphase {

namespace {

void sort_by_phase(std::vector<Mode> &modes) {
    std::stable_sort(modes.begin(), modes.end(), [](const Mode &a, const Mode &b) { return a.lambda < b.lambda; });
}

Mode mode_from(cd amplitude, cd pole) {
    Mode m;
    m.amplitude = amplitude;
    m.p = std::abs(amplitude);
    m.g = std::abs(pole);
    m.lambda = wrap_phase(std::arg(pole));
    return m;
}

}  // namespace

std::vector<double> dft_magnitudes(const Signal &s) {
    const std::size_t n = s.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; k++) {
        cd acc = 0;
        for (std::size_t m = 0; m < n; m++) {
            std::size_t l = s.l_offset + m;
            // Reduce k * L modulo N before scaling to keep the angle exact on-grid.
            double angle = -2.0 * kPi * static_cast<double>((k * l) % n) / static_cast<double>(n);
            acc += s.values[m] * std::polar(1.0, angle);
        }
        out[k] = std::abs(acc);
    }
    return out;
}

std::vector<Peak> dft_peaks(const Signal &s, std::size_t n_p) {
    if (n_p < 1) {
        throw Error(ErrorCode::BadParams, "n_p must be at least 1");
    }
    const std::size_t n = s.size();
    if (n < 2 * n_p) {
        throw Error(ErrorCode::TooFewSamples,
                    std::to_string(n) + " samples cannot resolve " + std::to_string(n_p) + " peaks");
    }
    std::vector<double> mag = dft_magnitudes(s);
    std::vector<Peak> peaks;
    for (std::size_t k = 0; k < n; k++) {
        double left = mag[(k + n - 1) % n];
        double right = mag[(k + 1) % n];
        if (mag[k] >= left && mag[k] >= right) {
            peaks.push_back(Peak{k, mag[k], wrap_phase(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n))});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak &a, const Peak &b) { return a.magnitude > b.magnitude; });
    if (peaks.size() > n_p) {
        peaks.resize(n_p);
    }
    return peaks;
}

std::vector<std::size_t> spurious_peaks(const std::vector<double> &magnitudes, const std::vector<std::size_t> &expected,
                                        double tau_factor, std::size_t exclusion) {
    const std::size_t n = magnitudes.size();
    if (n < 3) {
        return {};
    }
    std::vector<double> sorted = magnitudes;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
    double median = sorted[n / 2];
    if (n % 2 == 0) {
        median = (median + *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2))) / 2;
    }
    const double tau = tau_factor * median;
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < n; k++) {
        double left = magnitudes[(k + n - 1) % n];
        double right = magnitudes[(k + 1) % n];
        if (!(magnitudes[k] >= left && magnitudes[k] >= right && magnitudes[k] > tau)) {
            continue;
        }
        bool near_expected = false;
        for (std::size_t e : expected) {
            std::size_t d = k > e ? k - e : e - k;
            d = std::min(d, n - d);
            near_expected |= d <= exclusion;
        }
        if (!near_expected) {
            out.push_back(k);
        }
    }
    return out;
}

namespace {

/// Least-squares amplitudes for fixed poles; returns residual.
double fit_amplitudes(const Signal &s, const std::vector<cd> &poles, std::vector<cd> &amplitudes) {
    const auto n = static_cast<Eigen::Index>(s.size());
    const auto m = static_cast<Eigen::Index>(poles.size());
    ComplexMatrix v(n, m);
    ComplexVector z(n);
    for (Eigen::Index row = 0; row < n; row++) {
        z(row) = s.values[static_cast<std::size_t>(row)];
    }
    for (Eigen::Index col = 0; col < m; col++) {
        cd p = poles[static_cast<std::size_t>(col)];
        cd cur = std::pow(p, static_cast<double>(s.l_offset));
        for (Eigen::Index row = 0; row < n; row++) {
            v(row, col) = cur;
            cur *= p;
        }
    }
    if (!v.allFinite()) {
        throw Error(ErrorCode::IllConditioned, "Vandermonde matrix overflowed");
    }
    ComplexVector a = v.colPivHouseholderQr().solve(z);
    if (!a.allFinite()) {
        throw Error(ErrorCode::IllConditioned, "amplitude solve failed");
    }
    amplitudes.assign(a.data(), a.data() + a.size());
    return (z - v * a).squaredNorm();
}

}  // namespace

ModeEstimate matrix_pencil(const Signal &s, std::size_t model_order) {
    PencilOptions opts;
    opts.model_order = model_order;
    return matrix_pencil(s, opts);
}

ModeEstimate matrix_pencil(const Signal &s, const PencilOptions &opts) {
    const std::size_t n = s.size();
    if (n < 3) {
        throw Error(ErrorCode::TooFewSamples, "matrix pencil needs at least 3 samples");
    }
    const std::size_t pencil = opts.pencil != 0 ? opts.pencil : std::max<std::size_t>(1, n / 3);
    if (pencil >= n) {
        throw Error(ErrorCode::BadParams, "pencil parameter must be below the sample count");
    }
    if (opts.model_order > pencil || opts.model_order > n - pencil) {
        throw Error(ErrorCode::BadParams, "model order " + std::to_string(opts.model_order) +
                                              " exceeds pencil parameter " + std::to_string(pencil));
    }
    const auto rows = static_cast<Eigen::Index>(n - pencil);
    const auto cols = static_cast<Eigen::Index>(pencil + 1);
    ComplexMatrix y(rows, cols);
    for (Eigen::Index i = 0; i < rows; i++) {
        for (Eigen::Index j = 0; j < cols; j++) {
            y(i, j) = s.values[static_cast<std::size_t>(i + j)];
        }
    }
    Eigen::BDCSVD<ComplexMatrix> svd(y, Eigen::ComputeThinV);
    const auto &sv = svd.singularValues();
    if (!(sv(0) > 0.0) || !std::isfinite(sv(0))) {
        throw Error(ErrorCode::IllConditioned, "signal has no nonzero singular value");
    }
    std::size_t order = opts.model_order;
    if (order == 0) {
        while (order < static_cast<std::size_t>(sv.size()) && order < pencil &&
               sv(static_cast<Eigen::Index>(order)) > opts.sv_threshold * sv(0)) {
            order++;
        }
        order = std::min(std::max<std::size_t>({order, opts.min_order, 1}), std::min(pencil, n - pencil));
    }
    const auto m = static_cast<Eigen::Index>(order);
    ComplexMatrix vt = svd.matrixV().leftCols(m).adjoint();
    const auto p = static_cast<Eigen::Index>(pencil);
    ComplexMatrix vt1 = vt.leftCols(p);
    ComplexMatrix vt2 = vt.rightCols(p);
    // A = vt2 * pinv(vt1), solved as vt1^H A^H = vt2^H.
    ComplexMatrix a_h = vt1.adjoint().completeOrthogonalDecomposition().solve(vt2.adjoint());
    Eigen::ComplexEigenSolver<ComplexMatrix> eig(a_h.adjoint(), false);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorCode::IllConditioned, "pencil eigenproblem failed");
    }
    std::vector<cd> poles(eig.eigenvalues().data(), eig.eigenvalues().data() + m);
    std::vector<cd> amps;
    ModeEstimate est;
    est.residual = fit_amplitudes(s, poles, amps);
    for (std::size_t k = 0; k < poles.size(); k++) {
        est.modes.push_back(mode_from(amps[k], poles[k]));
    }
    sort_by_phase(est.modes);
    return est;
}

ModeEstimate modes_from_peaks(const Signal &s, const std::vector<Peak> &peaks) {
    std::vector<cd> poles;
    for (const auto &pk : peaks) {
        poles.push_back(std::polar(1.0, pk.phase));
    }
    std::vector<cd> amps;
    ModeEstimate est;
    est.residual = fit_amplitudes(s, poles, amps);
    for (std::size_t k = 0; k < poles.size(); k++) {
        est.modes.push_back(mode_from(amps[k], poles[k]));
    }
    sort_by_phase(est.modes);
    return est;
}

namespace {

double cost_of(const Signal &s, const std::vector<cd> &a, const std::vector<cd> &logz) {
    double cost = 0.0;
    for (std::size_t m = 0; m < s.size(); m++) {
        double l = static_cast<double>(s.l_offset + m);
        cd model = 0;
        for (std::size_t k = 0; k < a.size(); k++) {
            model += a[k] * std::exp(logz[k] * l);
        }
        cost += std::norm(s.values[m] - model);
    }
    return cost;
}

}  // namespace

double model_residual(const Signal &s, const ModeEstimate &est) {
    std::vector<cd> a, logz;
    for (const auto &m : est.modes) {
        a.push_back(m.amplitude);
        logz.push_back(cd(std::log(std::max(m.g, 1e-300)), m.lambda));
    }
    return cost_of(s, a, logz);
}

ModeEstimate refine_fit(const Signal &s, const ModeEstimate &init, const RefineOptions &opts) {
    if (init.modes.empty()) {
        throw Error(ErrorCode::BadParams, "refine_fit needs at least one initial mode");
    }
    const std::size_t m = init.modes.size();
    const std::size_t n = s.size();
    std::vector<cd> a, logz;
    for (const auto &md : init.modes) {
        a.push_back(md.amplitude);
        logz.push_back(cd(std::log(std::max(md.g, 1e-12)), md.lambda));
    }
    double scale = 0.0;
    for (const auto &z : s.values) {
        scale += std::norm(z);
    }
    double cost = cost_of(s, a, logz);
    const double init_cost = cost;
    double mu = 1e-3;
    bool converged = false;
    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(2 * m);
    for (std::size_t iter = 0; iter < opts.max_iterations; iter++) {
        if (cost <= 1e-28 * std::max(scale, 1e-300)) {
            converged = true;
            break;
        }
        ComplexMatrix jac(rows, cols);
        ComplexVector res(rows);
        for (Eigen::Index row = 0; row < rows; row++) {
            double l = static_cast<double>(s.l_offset + static_cast<std::size_t>(row));
            cd model = 0;
            for (std::size_t k = 0; k < m; k++) {
                cd e = std::exp(logz[k] * l);
                model += a[k] * e;
                jac(row, static_cast<Eigen::Index>(k)) = e;
                jac(row, static_cast<Eigen::Index>(m + k)) = a[k] * l * e;
            }
            res(row) = s.values[static_cast<std::size_t>(row)] - model;
        }
        ComplexMatrix jtj = jac.adjoint() * jac;
        ComplexVector jtr = jac.adjoint() * res;
        bool accepted = false;
        while (mu < 1e16) {
            ComplexMatrix lhs = jtj;
            for (Eigen::Index k = 0; k < cols; k++) {
                lhs(k, k) += mu * std::max(jtj(k, k).real(), 1e-30);
            }
            ComplexVector delta = lhs.ldlt().solve(jtr);
            if (!delta.allFinite()) {
                mu *= 4;
                continue;
            }
            std::vector<cd> a_new = a, logz_new = logz;
            for (std::size_t k = 0; k < m; k++) {
                a_new[k] += delta(static_cast<Eigen::Index>(k));
                logz_new[k] += delta(static_cast<Eigen::Index>(m + k));
            }
            double new_cost = cost_of(s, a_new, logz_new);
            if (std::isfinite(new_cost) && new_cost < cost) {
                double gain = cost - new_cost;
                a = std::move(a_new);
                logz = std::move(logz_new);
                cost = new_cost;
                mu = std::max(mu / 3, 1e-12);
                accepted = true;
                if (gain <= 1e-13 * cost) {
                    converged = true;
                }
                break;
            }
            mu *= 4;
        }
        if (!accepted || converged) {
            // No step lowers the cost: a stationary point within working precision.
            converged = true;
            break;
        }
    }
    if (!converged) {
        ModeEstimate out = init;
        out.residual = init_cost;
        out.converged = false;
        return out;
    }
    ModeEstimate out;
    out.residual = cost;
    for (std::size_t k = 0; k < m; k++) {
        Mode md = mode_from(a[k], std::exp(logz[k]));
        md.g = std::clamp(md.g, std::numeric_limits<double>::min(), opts.g_max);
        out.modes.push_back(md);
    }
    sort_by_phase(out.modes);
    return out;
}

ModeEstimate dominant_modes(const ModeEstimate &est, std::size_t count) {
    ModeEstimate out = est;
    std::stable_sort(out.modes.begin(), out.modes.end(), [](const Mode &a, const Mode &b) { return a.p > b.p; });
    if (out.modes.size() > count) {
        out.modes.resize(count);
    }
    sort_by_phase(out.modes);
    return out;
}

PhaseErrorReport estimation_error(const ModeEstimate &est, const std::vector<double> &truth) {
    const std::size_t n = truth.size();
    const std::size_t m = est.modes.size();
    if (m < n) {
        throw Error(ErrorCode::TooFewModes,
                    std::to_string(m) + " estimated modes for " + std::to_string(n) + " true phases");
    }
    if (n > 16) {
        throw Error(ErrorCode::BadParams, "assignment limited to 16 true phases");
    }
    PhaseErrorReport rep;
    if (n == 0) {
        return rep;
    }
    const std::size_t full = std::size_t{1} << n;
    const double inf = std::numeric_limits<double>::infinity();
    // best[i][mask]: minimal cost using estimated modes < i to cover `mask`.
    std::vector<std::vector<double>> best(m + 1, std::vector<double>(full, inf));
    std::vector<std::vector<int>> choice(m + 1, std::vector<int>(full, -1));
    best[0][0] = 0.0;
    for (std::size_t i = 0; i < m; i++) {
        for (std::size_t mask = 0; mask < full; mask++) {
            if (best[i][mask] == inf) {
                continue;
            }
            if (best[i][mask] < best[i + 1][mask]) {
                best[i + 1][mask] = best[i][mask];
                choice[i + 1][mask] = -1;
            }
            for (std::size_t j = 0; j < n; j++) {
                if (mask & (std::size_t{1} << j)) {
                    continue;
                }
                std::size_t next = mask | (std::size_t{1} << j);
                double c = best[i][mask] + circular_distance(est.modes[i].lambda, truth[j]);
                if (c < best[i + 1][next]) {
                    best[i + 1][next] = c;
                    choice[i + 1][next] = static_cast<int>(j);
                }
            }
        }
    }
    rep.errors.assign(n, 0.0);
    rep.assignment.assign(n, 0);
    std::size_t mask = full - 1;
    for (std::size_t i = m; i > 0; i--) {
        int j = choice[i][mask];
        if (j >= 0) {
            rep.assignment[static_cast<std::size_t>(j)] = i - 1;
            rep.errors[static_cast<std::size_t>(j)] = circular_distance(est.modes[i - 1].lambda, truth[static_cast<std::size_t>(j)]);
            mask &= ~(std::size_t{1} << j);
        }
    }
    double sum = 0.0;
    for (double e : rep.errors) {
        sum += e;
    }
    rep.mean = sum / static_cast<double>(n);
    return rep;
}

std::string signal_to_csv(const Signal &s) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "L,re,im\n";
    for (std::size_t m = 0; m < s.size(); m++) {
        out << s.l_offset + m << ',' << s.values[m].real() << ',' << s.values[m].imag() << '\n';
    }
    return out.str();
}

Signal signal_from_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("L,re,im", 0) != 0) {
        throw Error(ErrorCode::ParseError, "line 1: expected header 'L,re,im'");
    }
    Signal s;
    std::size_t line_no = 1;
    bool first = true;
    std::size_t expect_l = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string f_l, f_re, f_im;
        if (!std::getline(row, f_l, ',') || !std::getline(row, f_re, ',') || !std::getline(row, f_im, ',')) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected three fields");
        }
        try {
            std::size_t l = std::stoul(f_l);
            if (first) {
                s.l_offset = l;
                expect_l = l;
                first = false;
            }
            if (l != expect_l) {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": L values must be consecutive");
            }
            expect_l++;
            s.values.emplace_back(std::stod(f_re), std::stod(f_im));
        } catch (const std::logic_error &) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return s;
}

nlohmann::json to_json(const ModeEstimate &est) {
    nlohmann::json modes = nlohmann::json::array();
    for (const auto &m : est.modes) {
        modes.push_back({{"p", m.p},
                         {"g", m.g},
                         {"lambda", m.lambda},
                         {"amplitude_re", m.amplitude.real()},
                         {"amplitude_im", m.amplitude.imag()}});
    }
    return {{"modes", modes}, {"residual", est.residual}, {"converged", est.converged}};
}

ModeEstimate mode_estimate_from_json(const nlohmann::json &j) {
    ModeEstimate est;
    try {
        for (const auto &m : j.at("modes")) {
            Mode md;
            md.p = m.at("p").get<double>();
            md.g = m.at("g").get<double>();
            md.lambda = m.at("lambda").get<double>();
            md.amplitude = m.contains("amplitude_re")
                               ? cd(m.at("amplitude_re").get<double>(), m.value("amplitude_im", 0.0))
                               : cd(md.p, 0.0);
            est.modes.push_back(md);
        }
        est.residual = j.value("residual", 0.0);
        est.converged = j.value("converged", true);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::ParseError, std::string("mode estimate: ") + e.what());
    }
    return est;
}

}  // namespace rcphase
