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


// rc-phase: command-line driver for the experiment harness.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcphase/error.hpp"
#include "rcphase/experiments.hpp"
#include "rcphase/randomized_compiling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rcphase;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitCheckFailed = 3;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    bool paper_scale = false;
    bool check = false;
    unsigned threads = 0;
};

std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::BadParams, "cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_config(const Common &c) {
    if (c.config.empty()) {
        return json::object();
    }
    try {
        return json::parse(read_text(c.config));
    } catch (const json::exception &e) {
        throw Error(ErrorCode::ParseError, c.config + ": " + e.what());
    }
}

unsigned thread_count(const Common &c) {
    if (c.threads != 0) {
        return c.threads;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

fs::path prepare_out(const Common &c) {
    fs::path dir(c.out);
    fs::create_directories(dir);
    return dir;
}

void emit(const fs::path &dir, const std::string &stem, const std::string &csv, const json &summary) {
    write_file_atomic((dir / (stem + ".csv")).string(), csv);
    write_file_atomic((dir / (stem + "_summary.json")).string(), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
}

int finish(const Common &c, bool pass) {
    if (c.check && !pass) {
        std::cerr << "acceptance thresholds not met\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_theorem(const Common &c) {
    TheoremCheckConfig cfg = TheoremCheckConfig::from_json(load_config(c));
    auto res = run_theorem_check(cfg);
    emit(prepare_out(c), "theorem_check", res.csv(), res.summary());
    return finish(c, res.pass());
}

int cmd_scaling(const Common &c) {
    ScalingConfig cfg = ScalingConfig::from_json(load_config(c));
    if (c.seed) {
        cfg.seed = *c.seed;
    }
    cfg.threads = thread_count(c);
    auto res = run_scaling(cfg);
    emit(prepare_out(c), "scaling", res.csv(), res.summary());
    return finish(c, res.pass());
}

int cmd_floquet(const Common &c) {
    FloquetConfig cfg = FloquetConfig::from_json(load_config(c));
    if (c.seed) {
        cfg.seed = *c.seed;
    }
    if (c.paper_scale) {
        cfg.instance.n = 10;
        cfg.shots = 10000000;
    }
    cfg.threads = thread_count(c);
    auto res = run_floquet(cfg);
    fs::path dir = prepare_out(c);
    for (std::size_t i = 0; i < res.points.size(); i++) {
        const auto &p = res.points[i];
        std::string stem = "floquet_" + p.family + "_" + std::to_string(i);
        write_file_atomic((dir / (stem + "_bare.json")).string(), p.bare.to_json().dump(2) + "\n");
        write_file_atomic((dir / (stem + "_rc.json")).string(), p.rc.to_json().dump(2) + "\n");
    }
    emit(dir, "floquet", res.csv(), res.summary());
    return finish(c, res.pass());
}

int cmd_order_finding(const Common &c) {
    OrderFindingConfig cfg = OrderFindingConfig::from_json(load_config(c));
    if (c.seed) {
        cfg.seed = *c.seed;
    }
    if (c.paper_scale) {
        cfg.shots = 10000000;
    }
    cfg.threads = thread_count(c);
    auto res = run_order_finding(cfg);
    fs::path dir = prepare_out(c);
    write_file_atomic((dir / "order_finding_bare.json").string(), res.bare_report.to_json().dump(2) + "\n");
    write_file_atomic((dir / "order_finding_rc.json").string(), res.rc_report.to_json().dump(2) + "\n");
    emit(dir, "order_finding", res.csv(), res.summary());
    return finish(c, res.pass(cfg.expected_bins));
}

int cmd_nr_sweep(const Common &c) {
    NrSweepConfig cfg = NrSweepConfig::from_json(load_config(c));
    if (c.seed) {
        cfg.seed = *c.seed;
    }
    if (c.paper_scale) {
        cfg.instance.n = 10;
    }
    cfg.threads = thread_count(c);
    auto res = run_nr_sweep(cfg);
    emit(prepare_out(c), "nr_sweep", res.csv(), res.summary());
    return finish(c, res.pass);
}

int cmd_rc_compile(const Common &c, const std::string &in, std::size_t n_r) {
    Circuit bare = deserialize(read_text(in));
    const std::uint64_t seed = c.seed.value_or(1);
    RcEnsemble e = compile(bare, n_r, seed);
    fs::path dir = prepare_out(c);
    json manifest = {{"input", in}, {"n_r", n_r}, {"seed", seed}, {"members", json::array()}};
    for (std::size_t r = 0; r < e.randomized.size(); r++) {
        char name[32];
        std::snprintf(name, sizeof name, "member_%04zu.json", r);
        write_file_atomic((dir / name).string(), serialize(e.randomized[r]) + "\n");
        json tw = json::array();
        for (const auto &t : e.twirls[r]) {
            tw.push_back(t.str());
        }
        manifest["members"].push_back({{"file", name}, {"seed", e.seeds[r]}, {"twirls", tw}});
    }
    bool ok = true;
    if (bare.n_qubits <= 8) {
        EquivalenceReport rep = verify_equivalence(e);
        manifest["max_deviation"] = rep.max_deviation;
        ok = rep.max_deviation <= 1e-8;
    }
    write_file_atomic((dir / "manifest.json").string(), manifest.dump(2) + "\n");
    std::cout << "wrote " << e.randomized.size() << " members to " << dir.string() << "\n";
    return finish(c, ok);
}

void add_common(CLI::App *sub, Common &c) {
    sub->add_option("--config", c.config, "JSON config file (defaults when omitted)");
    sub->add_option("--seed", c.seed, "master seed override");
    sub->add_option("--out", c.out, "output directory");
    sub->add_flag("--paper-scale", c.paper_scale, "full-size parameters (10 qubits, 1e7 shots) where defaults are smaller");
    sub->add_flag("--check", c.check, "exit 3 when acceptance thresholds fail");
    sub->add_option("--threads", c.threads, "worker threads (0 = hardware concurrency)");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Control-free phase estimation with randomized compiling"};
    app.require_subcommand(1);
    Common common;
    std::string in;
    std::size_t n_r = 20;

    auto *theorem = app.add_subcommand("theorem-check", "eigenphase-shift scaling of noisy superoperators");
    auto *scaling = app.add_subcommand("scaling", "exact-expectation phase error vs noise probability");
    auto *floquet = app.add_subcommand("floquet", "Floquet quasi-energies, bare vs randomized compiling");
    auto *order = app.add_subcommand("order-finding", "order finding x=4, N=255 spectra and spurious peaks");
    auto *sweep = app.add_subcommand("nr-sweep", "phase error vs number of randomized circuits");
    auto *rcc = app.add_subcommand("rc-compile", "write randomized-compiling members of a circuit file");
    for (auto *sub : {theorem, scaling, floquet, order, sweep, rcc}) {
        add_common(sub, common);
    }
    rcc->add_option("--in", in, "circuit JSON")->required();
    rcc->add_option("--nr", n_r, "number of randomized circuits");
    rcc->add_option("--out-dir", common.out, "output directory (alias of --out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*theorem) {
            return cmd_theorem(common);
        }
        if (*scaling) {
            return cmd_scaling(common);
        }
        if (*floquet) {
            return cmd_floquet(common);
        }
        if (*order) {
            return cmd_order_finding(common);
        }
        if (*sweep) {
            return cmd_nr_sweep(common);
        }
        return cmd_rc_compile(common, in, n_r);
    } catch (const Error &e) {
        std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
        return kExitValidation;
    } catch (const json::exception &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const fs::filesystem_error &e) {
        std::cerr << "filesystem error: " << e.what() << "\n";
        return kExitValidation;
    }
}
