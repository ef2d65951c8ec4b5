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

#pragma once

#include <array>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfe/lattice.h"
#include "qfe/operators.h"

namespace qfe {

// ---------------------------------------------------------------------------
// Stochastic product models
// ---------------------------------------------------------------------------

enum class StochasticVariant { Uniform, PerGate, EdgeInner, PerGateCrosstalk };

/// Fidelity proxy equal to the product of per-gate success probabilities.
///
///  * Uniform: every single-qubit gate succeeds with `single_qubit`, every
///    two-qubit gate with `two_qubit`.
///  * PerGate: probability looked up per gate kind.
///  * EdgeInner: boundary sites use the edge pair, interior sites the inner
///    pair; a two-qubit gate touching both classes takes the smaller value.
///  * PerGateCrosstalk: PerGate, times `neighbor_penalty` for every occupied
///    lattice neighbor (4 sites around a single-qubit gate, the 6 sites
///    around a two-qubit pair).
///
/// Identity slots always contribute 1 and never count as occupied.
struct StochasticModel {
    StochasticVariant variant = StochasticVariant::Uniform;
    double single_qubit = 0.99;
    double two_qubit = 0.95;
    /// Indexed by GateKind.
    std::array<double, 9> per_gate{1.0, 0.99, 0.98, 0.97, 0.96, 0.99, 0.99, 0.95, 0.94};
    double edge_single = 0.99;
    double edge_two = 0.95;
    double inner_single = 0.97;
    double inner_two = 0.93;
    double neighbor_penalty = 0.94;

    static StochasticModel uniform();
    static StochasticModel per_gate_model();
    static StochasticModel edge_inner();
    static StochasticModel per_gate_crosstalk();
    /// Model 1..4 in the order listed above.
    static StochasticModel numbered(int index);

    /// Throws ParameterError unless every probability lies in (0, 1].
    void validate() const;
};

/// Product over all gates, moment-major then row-major over anchor sites.
/// Each gate contributes p * penalty^k, accumulated by repeated
/// multiplication, so labels are bit-reproducible.
double product_fidelity(const LatticeCircuit &circuit, const StochasticModel &model);

// ---------------------------------------------------------------------------
// Simulated depolarizing + crosstalk noise
// ---------------------------------------------------------------------------

enum class CrosstalkScope { GatePairOnly, IncludeNeighbors };

struct SimNoiseModel {
    double eps1 = 0.001;
    double eps2 = 0.01;
    double zeta = 150000.0;
    double t_time = 1e-8;
    CrosstalkScope scope = CrosstalkScope::GatePairOnly;

    void validate() const;
};

/// D_n(rho, eps) = (1 - eps) rho + eps I / 2^n as a Pauli-twirl Kraus set:
/// identity with weight 1 - eps (4^n - 1) / 4^n and every other n-qubit Pauli
/// with weight eps / 4^n.
Channel depolarizing_kraus(int qubits, double eps);

/// diag(1, 1, 1, exp(-i 2 pi zeta t)).
GateMatrix crosstalk_unitary(double zeta, double t_time);

struct NoisyOp {
    enum class Kind {
        /// Gate of the ideal circuit.
        Gate,
        /// Coherent error (U_ZZ); not part of the ideal circuit.
        Crosstalk,
        Depolarize,
    };
    Kind kind = Kind::Gate;
    int arity = 1;
    std::array<int, 2> qubits{0, 0};
    GateMatrix unitary;
    double eps = 0.0;

    bool operator==(const NoisyOp &) const = default;
};

struct NoisyProgram {
    int num_qubits = 0;
    std::vector<NoisyOp> ops;
};

/// Per non-identity gate, moment-major and row-major: the gate, then
/// D_1(eps1) or D_2(eps2) on its qubits, then for two-qubit gates U_ZZ on the
/// pair and, under IncludeNeighbors, U_ZZ between each gate qubit and each
/// of its other lattice neighbors.
NoisyProgram compile_noisy_program(const LatticeCircuit &circuit, const SimNoiseModel &model);

nlohmann::json to_json(const StochasticModel &m);
StochasticModel stochastic_model_from_json(const nlohmann::json &j);
nlohmann::json to_json(const SimNoiseModel &m);
SimNoiseModel sim_noise_model_from_json(const nlohmann::json &j);

}  // namespace qfe
