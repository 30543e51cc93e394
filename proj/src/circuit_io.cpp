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

#include <string>

#include "json.hpp"
#include "rcphase/circuit.hpp"
#include "rcphase/error.hpp"

namespace rcphase {

namespace {

using nlohmann::json;

json gate_to_json(const Gate &g) {
    return json{{"name", g.name}, {"qubits", g.qubits}, {"params", g.params}};
}

json layer_to_json(const std::vector<Gate> &layer) {
    json arr = json::array();
    for (const auto &g : layer) {
        arr.push_back(gate_to_json(g));
    }
    return arr;
}

[[noreturn]] void field_error(const std::string &path, const std::string &what) {
    throw Error(ErrorCode::ParseError, "field " + path + ": " + what);
}

Gate gate_from_json(const json &j, const std::string &path) {
    if (!j.is_object()) {
        field_error(path, "expected object");
    }
    if (!j.contains("name") || !j["name"].is_string()) {
        field_error(path + ".name", "missing or not a string");
    }
    if (!j.contains("qubits") || !j["qubits"].is_array()) {
        field_error(path + ".qubits", "missing or not an array");
    }
    std::vector<std::size_t> qubits;
    for (std::size_t k = 0; k < j["qubits"].size(); k++) {
        const auto &q = j["qubits"][k];
        if (!q.is_number_integer() || q.get<long long>() < 0) {
            field_error(path + ".qubits[" + std::to_string(k) + "]", "expected nonnegative integer");
        }
        qubits.push_back(q.get<std::size_t>());
    }
    std::vector<double> params;
    if (j.contains("params")) {
        if (!j["params"].is_array()) {
            field_error(path + ".params", "expected array");
        }
        for (std::size_t k = 0; k < j["params"].size(); k++) {
            if (!j["params"][k].is_number()) {
                field_error(path + ".params[" + std::to_string(k) + "]", "expected number");
            }
            params.push_back(j["params"][k].get<double>());
        }
    }
    try {
        return make_gate(j["name"].get<std::string>(), std::move(qubits), std::move(params));
    } catch (const Error &e) {
        field_error(path, e.what());
    }
}

std::vector<Gate> layer_from_json(const json &j, const std::string &path) {
    if (!j.is_array()) {
        field_error(path, "expected array");
    }
    std::vector<Gate> layer;
    for (std::size_t k = 0; k < j.size(); k++) {
        layer.push_back(gate_from_json(j[k], path + "[" + std::to_string(k) + "]"));
    }
    return layer;
}

}  // namespace

std::string serialize(const Circuit &c) {
    json cycles = json::array();
    for (const auto &cy : c.cycles) {
        cycles.push_back(json{{"easy", layer_to_json(cy.easy)}, {"hard", layer_to_json(cy.hard)}});
    }
    json j{{"n_qubits", c.n_qubits}, {"cycles", cycles}};
    if (!c.terminal.empty()) {
        j["terminal"] = layer_to_json(c.terminal);
    }
    return j.dump(1) + "\n";
}

Circuit deserialize(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); i++) {
            line += text[i] == '\n';
        }
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what());
    }
    if (!j.is_object()) {
        field_error("<root>", "expected object");
    }
    if (!j.contains("n_qubits") || !j["n_qubits"].is_number_integer() || j["n_qubits"].get<long long>() < 0) {
        field_error("n_qubits", "missing or not a nonnegative integer");
    }
    if (!j.contains("cycles") || !j["cycles"].is_array()) {
        field_error("cycles", "missing or not an array");
    }
    Circuit c;
    c.n_qubits = j["n_qubits"].get<std::size_t>();
    for (std::size_t k = 0; k < j["cycles"].size(); k++) {
        const auto &cy = j["cycles"][k];
        std::string path = "cycles[" + std::to_string(k) + "]";
        if (!cy.is_object()) {
            field_error(path, "expected object");
        }
        Cycle cycle;
        if (cy.contains("easy")) {
            cycle.easy = layer_from_json(cy["easy"], path + ".easy");
        }
        if (cy.contains("hard")) {
            cycle.hard = layer_from_json(cy["hard"], path + ".hard");
        }
        c.cycles.push_back(std::move(cycle));
    }
    if (j.contains("terminal")) {
        c.terminal = layer_from_json(j["terminal"], "terminal");
    }
    try {
        validate(c);
    } catch (const Error &e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return c;
}

}  // namespace rcphase
