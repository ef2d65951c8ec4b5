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

#include "qfe/noise.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qfe/error.h"

namespace qfe {

using nlohmann::json;

StochasticModel StochasticModel::uniform() { return StochasticModel{}; }

StochasticModel StochasticModel::per_gate_model() {
    StochasticModel m;
    m.variant = StochasticVariant::PerGate;
    return m;
}

StochasticModel StochasticModel::edge_inner() {
    StochasticModel m;
    m.variant = StochasticVariant::EdgeInner;
    return m;
}

StochasticModel StochasticModel::per_gate_crosstalk() {
    StochasticModel m;
    m.variant = StochasticVariant::PerGateCrosstalk;
    return m;
}

StochasticModel StochasticModel::numbered(int index) {
    switch (index) {
        case 1:
            return uniform();
        case 2:
            return per_gate_model();
        case 3:
            return edge_inner();
        case 4:
            return per_gate_crosstalk();
        default:
            throw ParameterError("stochastic models are numbered 1 to 4, got " + std::to_string(index));
    }
}

void StochasticModel::validate() const {
    auto check = [](double p, const char *what) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw ParameterError(std::string(what) + " must lie in (0, 1]");
        }
    };
    check(single_qubit, "single_qubit");
    check(two_qubit, "two_qubit");
    for (double p : per_gate) {
        check(p, "per_gate entry");
    }
    check(edge_single, "edge_single");
    check(edge_two, "edge_two");
    check(inner_single, "inner_single");
    check(inner_two, "inner_two");
    check(neighbor_penalty, "neighbor_penalty");
}

namespace {

bool on_edge(const LatticeCircuit &c, Site s) {
    return s.x == 0 || s.y == 0 || s.x == c.rows() - 1 || s.y == c.cols() - 1;
}

int occupied_neighbors(const LatticeCircuit &c, const std::vector<bool> &occupied, Site s, Site exclude) {
    int k = 0;
    for (Direction d : kAllDirections) {
        const Site n = step(s, d);
        if (n != exclude && c.contains(n) && occupied[c.qubit(n)]) {
            ++k;
        }
    }
    return k;
}

}  // namespace

double product_fidelity(const LatticeCircuit &circuit, const StochasticModel &model) {
    model.validate();
    // Multiplied in sorted order so circuits with the same factors get
    // bit-identical labels.
    std::vector<double> factors;
    const Site nowhere{-1, -1};
    for (int m = 0; m < circuit.depth(); ++m) {
        std::vector<bool> occupied;
        if (model.variant == StochasticVariant::PerGateCrosstalk) {
            occupied = circuit.occupancy(m);
        }
        for (int q = 0; q < circuit.num_qubits(); ++q) {
            const Site s = circuit.site(q);
            const Gate &g = circuit.at(m, s);
            if (g.is_identity()) {
                continue;
            }
            const bool two = is_two_qubit(g.kind);
            const Site partner = two ? step(s, *g.dir) : nowhere;
            double p = 1.0;
            int penalties = 0;
            switch (model.variant) {
                case StochasticVariant::Uniform:
                    p = two ? model.two_qubit : model.single_qubit;
                    break;
                case StochasticVariant::PerGate:
                    p = model.per_gate[static_cast<int>(g.kind)];
                    break;
                case StochasticVariant::EdgeInner: {
                    if (two) {
                        p = std::min(on_edge(circuit, s) ? model.edge_two : model.inner_two,
                                     on_edge(circuit, partner) ? model.edge_two : model.inner_two);
                    } else {
                        p = on_edge(circuit, s) ? model.edge_single : model.inner_single;
                    }
                    break;
                }
                case StochasticVariant::PerGateCrosstalk:
                    p = model.per_gate[static_cast<int>(g.kind)];
                    penalties = occupied_neighbors(circuit, occupied, s, partner);
                    if (two) {
                        penalties += occupied_neighbors(circuit, occupied, partner, s);
                    }
                    break;
            }
            factors.push_back(p);
            factors.insert(factors.end(), penalties, model.neighbor_penalty);
        }
    }
    std::sort(factors.begin(), factors.end());
    double f = 1.0;
    for (double x : factors) {
        f *= x;
    }
    return f;
}

void SimNoiseModel::validate() const {
    if (!(eps1 >= 0.0 && eps1 <= 1.0) || !(eps2 >= 0.0 && eps2 <= 1.0)) {
        throw ParameterError("depolarizing probabilities must lie in [0, 1]");
    }
    if (!std::isfinite(zeta) || !std::isfinite(t_time)) {
        throw ParameterError("crosstalk parameters must be finite");
    }
}

Channel depolarizing_kraus(int qubits, double eps) {
    if (qubits != 1 && qubits != 2) {
        throw ParameterError("depolarizing channel supports 1 or 2 qubits, got " + std::to_string(qubits));
    }
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw ParameterError("depolarizing probability must lie in [0, 1]");
    }
    const int paulis = qubits == 1 ? 4 : 16;
    const double other = eps / paulis;
    const double id = 1.0 - eps * (paulis - 1) / paulis;
    Channel ch;
    ch.qubits = qubits;
    for (int i = 0; i < paulis; ++i) {
        GateMatrix k = pauli_string(qubits, i);
        const double scale = std::sqrt(i == 0 ? id : other);
        for (auto &e : k.elems) {
            e *= scale;
        }
        ch.kraus.push_back(k);
    }
    return ch;
}

GateMatrix crosstalk_unitary(double zeta, double t_time) {
    GateMatrix u = GateMatrix::identity(2);
    u(3, 3) = std::polar(1.0, -2.0 * std::numbers::pi * zeta * t_time);
    return u;
}

NoisyProgram compile_noisy_program(const LatticeCircuit &circuit, const SimNoiseModel &model) {
    model.validate();
    NoisyProgram prog;
    prog.num_qubits = circuit.num_qubits();
    const GateMatrix zz = crosstalk_unitary(model.zeta, model.t_time);

    auto crosstalk = [&](int a, int b) {
        NoisyOp op;
        op.kind = NoisyOp::Kind::Crosstalk;
        op.arity = 2;
        op.qubits = {a, b};
        op.unitary = zz;
        prog.ops.push_back(op);
    };

    for (int m = 0; m < circuit.depth(); ++m) {
        for (int q = 0; q < circuit.num_qubits(); ++q) {
            const Site s = circuit.site(q);
            const Gate &g = circuit.at(m, s);
            if (g.is_identity()) {
                continue;
            }
            NoisyOp gate;
            gate.kind = NoisyOp::Kind::Gate;
            gate.unitary = gate_unitary(g.kind);
            NoisyOp noise;
            noise.kind = NoisyOp::Kind::Depolarize;
            if (!is_two_qubit(g.kind)) {
                gate.arity = noise.arity = 1;
                gate.qubits = noise.qubits = {q, q};
                noise.eps = model.eps1;
                prog.ops.push_back(gate);
                prog.ops.push_back(noise);
                continue;
            }
            const Site ps = step(s, *g.dir);
            const int p = circuit.qubit(ps);
            gate.arity = noise.arity = 2;
            gate.qubits = noise.qubits = {q, p};
            noise.eps = model.eps2;
            prog.ops.push_back(gate);
            prog.ops.push_back(noise);
            crosstalk(q, p);
            if (model.scope == CrosstalkScope::IncludeNeighbors) {
                for (const auto &[self, other] : {std::pair{s, ps}, std::pair{ps, s}}) {
                    for (Direction d : kAllDirections) {
                        const Site n = step(self, d);
                        if (n != other && circuit.contains(n)) {
                            crosstalk(circuit.qubit(self), circuit.qubit(n));
                        }
                    }
                }
            }
        }
    }
    return prog;
}

namespace {

const char *variant_name(StochasticVariant v) {
    switch (v) {
        case StochasticVariant::Uniform:
            return "uniform";
        case StochasticVariant::PerGate:
            return "per-gate";
        case StochasticVariant::EdgeInner:
            return "edge-inner";
        case StochasticVariant::PerGateCrosstalk:
            return "per-gate-crosstalk";
    }
    return "?";
}

StochasticVariant parse_variant(const std::string &s) {
    for (auto v : {StochasticVariant::Uniform, StochasticVariant::PerGate, StochasticVariant::EdgeInner,
                   StochasticVariant::PerGateCrosstalk}) {
        if (s == variant_name(v)) {
            return v;
        }
    }
    throw ConfigError("unknown stochastic model variant '" + s + "'");
}

template <typename T>
void read_if(const json &j, const char *key, T &out) {
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

}  // namespace

json to_json(const StochasticModel &m) {
    json per_gate = json::object();
    for (int k = 0; k < 9; ++k) {
        per_gate[std::string(gate_name(static_cast<GateKind>(k)))] = m.per_gate[k];
    }
    return json{{"kind", "stochastic"},
                {"variant", variant_name(m.variant)},
                {"single_qubit", m.single_qubit},
                {"two_qubit", m.two_qubit},
                {"per_gate", per_gate},
                {"edge_single", m.edge_single},
                {"edge_two", m.edge_two},
                {"inner_single", m.inner_single},
                {"inner_two", m.inner_two},
                {"neighbor_penalty", m.neighbor_penalty}};
}

StochasticModel stochastic_model_from_json(const json &j) {
    try {
        StochasticModel m;
        if (j.contains("variant")) {
            m.variant = parse_variant(j.at("variant").get<std::string>());
        }
        read_if(j, "single_qubit", m.single_qubit);
        read_if(j, "two_qubit", m.two_qubit);
        if (j.contains("per_gate")) {
            for (const auto &[name, value] : j.at("per_gate").items()) {
                m.per_gate[static_cast<int>(parse_gate_name(name))] = value.get<double>();
            }
        }
        read_if(j, "edge_single", m.edge_single);
        read_if(j, "edge_two", m.edge_two);
        read_if(j, "inner_single", m.inner_single);
        read_if(j, "inner_two", m.inner_two);
        read_if(j, "neighbor_penalty", m.neighbor_penalty);
        m.validate();
        return m;
    } catch (const json::exception &e) {
        throw ConfigError(std::string("malformed stochastic model: ") + e.what());
    } catch (const FormatError &e) {
        throw ConfigError(e.what());
    } catch (const ParameterError &e) {
        throw ConfigError(e.what());
    }
}

json to_json(const SimNoiseModel &m) {
    return json{{"kind", "sim"},
                {"eps1", m.eps1},
                {"eps2", m.eps2},
                {"zeta", m.zeta},
                {"t_time", m.t_time},
                {"crosstalk_scope",
                 m.scope == CrosstalkScope::GatePairOnly ? "gate-pair-only" : "include-neighbors"}};
}

SimNoiseModel sim_noise_model_from_json(const json &j) {
    try {
        SimNoiseModel m;
        read_if(j, "eps1", m.eps1);
        // eps2 follows eps1 by the 10x rule unless given explicitly.
        m.eps2 = j.contains("eps1") ? 10.0 * m.eps1 : m.eps2;
        read_if(j, "eps2", m.eps2);
        read_if(j, "zeta", m.zeta);
        read_if(j, "t_time", m.t_time);
        if (j.contains("crosstalk_scope")) {
            const auto scope = j.at("crosstalk_scope").get<std::string>();
            if (scope == "gate-pair-only") {
                m.scope = CrosstalkScope::GatePairOnly;
            } else if (scope == "include-neighbors") {
                m.scope = CrosstalkScope::IncludeNeighbors;
            } else {
                throw ConfigError("unknown crosstalk_scope '" + scope + "'");
            }
        }
        m.validate();
        return m;
    } catch (const json::exception &e) {
        throw ConfigError(std::string("malformed noise model: ") + e.what());
    } catch (const ParameterError &e) {
        throw ConfigError(e.what());
    }
}

}  // namespace qfe
