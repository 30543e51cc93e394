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


#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rcphase/error.hpp"
#include "rcphase/experiments.hpp"

using namespace rcphase;

namespace {

/// Every non-header CSV row must end with the hash column.
void check_hash_column(const std::string &csv, const std::string &hash) {
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.substr(line.rfind(',') + 1) == "config_hash");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        CHECK(line.substr(line.rfind(',') + 1) == hash);
        rows++;
    }
    CHECK(rows > 0);
}

}  // namespace

TEST_CASE("loglog_slope") {
    CHECK(loglog_slope({1, 10, 100}, {2, 200, 20000}) == doctest::Approx(2.0));
    CHECK(loglog_slope({1e-4, 1e-3}, {5e-3, 5e-2}) == doctest::Approx(1.0));
    CHECK(std::isnan(loglog_slope({1}, {1})));
    CHECK(std::isnan(loglog_slope({1, 2}, {0, 0})));
}

TEST_CASE("instances are deterministic") {
    FloquetInstanceConfig fc;
    QpeInstance a = make_floquet_instance(fc), b = make_floquet_instance(fc);
    CHECK(a.circuit == b.circuit);
    CHECK(a.circuit.n_qubits == 6);
    CHECK(a.subspace->cols() == 6);
    fc.seed = 78;
    CHECK_FALSE(make_floquet_instance(fc).circuit == a.circuit);
    fc.n = 1;
    CHECK_THROWS_AS(make_floquet_instance(fc), Error);
    QpeInstance of = make_order_finding_instance();
    CHECK(of.circuit.n_qubits == 8);
    CHECK(std::abs(of.target(1) - cd(1, 0)) < 1e-15);
}

TEST_CASE("theorem check reproduces the expected orders") {
    TheoremCheckConfig cfg = TheoremCheckConfig::defaults();
    TheoremCheckResult r = run_theorem_check(cfg);
    CHECK(r.pass());
    REQUIRE(r.cases.size() == cfg.cases.size());
    for (const auto &c : r.cases) {
        CAPTURE(c.name);
        CHECK(std::abs(c.slope - c.expected_slope) <= cfg.slope_tolerance);
    }
    check_hash_column(r.csv(), r.config_hash);
    CHECK(run_theorem_check(cfg).csv() == r.csv());
    CHECK(r.summary()["pass"] == true);
}

TEST_CASE("configuration JSON round trips") {
    TheoremCheckConfig t = TheoremCheckConfig::defaults();
    CHECK(TheoremCheckConfig::from_json(t.to_json()).to_json() == t.to_json());
    ScalingConfig s;
    CHECK(ScalingConfig::from_json(s.to_json()).to_json() == s.to_json());
    FloquetConfig f;
    CHECK(FloquetConfig::from_json(f.to_json()).to_json() == f.to_json());
    OrderFindingConfig o;
    CHECK(OrderFindingConfig::from_json(o.to_json()).to_json() == o.to_json());
    NrSweepConfig n;
    CHECK(NrSweepConfig::from_json(n.to_json()).to_json() == n.to_json());

    nlohmann::json partial = {{"shots", 500}};
    CHECK(OrderFindingConfig::from_json(partial).shots == 500);
    CHECK_THROWS(NrSweepConfig::from_json(nlohmann::json{{"seeds", "many"}}));
}

TEST_CASE("small N_r sweep writes hashed rows") {
    NrSweepConfig cfg;
    cfg.instance.n = 3;
    cfg.n_rs = {1, 4};
    cfg.shots = 4000;
    cfg.l_max = 12;
    cfg.seeds = 2;
    NrSweepResult r = run_nr_sweep(cfg);
    CHECK(r.errors.size() == 2);
    CHECK(r.mean_errors.size() == 2);
    check_hash_column(r.csv(), r.config_hash);
    CHECK(run_nr_sweep(cfg).csv() == r.csv());
}
