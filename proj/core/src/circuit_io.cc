// Copyright 2026 The QFE Authors
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

#include "qfe/circuit_io.h"

#include <string>

#include "qfe/error.h"

namespace qfe {

using nlohmann::json;

json circuit_to_json(const LatticeCircuit &circuit) {
    json moments = json::array();
    for (int m = 0; m < circuit.depth(); ++m) {
        json entries = json::array();
        for (int q = 0; q < circuit.num_qubits(); ++q) {
            const Site s = circuit.site(q);
            const Gate &g = circuit.at(m, s);
            if (g.is_identity()) {
                continue;
            }
            json e = {{"x", s.x}, {"y", s.y}, {"gate", std::string(gate_name(g.kind))}};
            if (g.dir) {
                e["dir"] = std::string(1, direction_name(*g.dir));
            }
            entries.push_back(std::move(e));
        }
        moments.push_back(std::move(entries));
    }
    return json{{"rows", circuit.rows()}, {"cols", circuit.cols()}, {"moments", std::move(moments)}};
}

LatticeCircuit circuit_from_json(const json &j) {
    try {
        const int rows = j.at("rows").get<int>();
        const int cols = j.at("cols").get<int>();
        const json &moments = j.at("moments");
        if (!moments.is_array()) {
            throw FormatError("'moments' must be an array");
        }
        LatticeCircuit c(rows, cols, static_cast<int>(moments.size()));
        for (int m = 0; m < c.depth(); ++m) {
            for (const json &e : moments[m]) {
                const Site s{e.at("x").get<int>(), e.at("y").get<int>()};
                if (!c.contains(s)) {
                    throw FormatError("gate site off the lattice in moment " + std::to_string(m));
                }
                const GateKind kind = parse_gate_name(e.at("gate").get<std::string>());
                if (kind == GateKind::I) {
                    continue;
                }
                if (!c.at(m, s).is_identity()) {
                    throw ValidationError("two entries for one site in moment " + std::to_string(m));
                }
                if (is_two_qubit(kind)) {
                    c.set(m, s, Gate::two(kind, parse_direction(e.at("dir").get<std::string>())));
                } else {
                    if (e.contains("dir")) {
                        throw FormatError("single-qubit gate carries a direction in moment " + std::to_string(m));
                    }
                    c.set(m, s, Gate::single(kind));
                }
            }
        }
        c.validate();
        return c;
    } catch (const json::exception &e) {
        throw FormatError(std::string("malformed circuit: ") + e.what());
    }
}

json tiling_to_json(const Tiling &tiling) {
    json out = json::array();
    for (const Rect &r : tiling.tiles) {
        out.push_back({r.x0, r.y0, r.x_extent, r.y_extent});
    }
    return out;
}

Tiling tiling_from_json(const json &j) {
    try {
        Tiling t;
        for (const json &r : j) {
            if (r.size() != 4) {
                throw FormatError("tile must be [x0, y0, x_extent, y_extent]");
            }
            t.tiles.push_back(Rect{r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()});
        }
        return t;
    } catch (const json::exception &e) {
        throw FormatError(std::string("malformed tiling: ") + e.what());
    }
}

}  // namespace qfe
