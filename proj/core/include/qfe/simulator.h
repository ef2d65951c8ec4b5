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

#include <cstdint>
#include <span>
#include <vector>

#include "qfe/lattice.h"
#include "qfe/noise.h"
#include "qfe/operators.h"

namespace qfe {

/// Size limits, in qubits, for the two state representations.
struct SimulatorLimits {
    int statevector_qubits = 26;
    int density_qubits = 10;
};

/// Pure state of n qubits. Qubit q is bit (n - 1 - q) of the basis index, so
/// the basis label reads qubit 0 first; with row-major qubit numbering the
/// lattice state is the Kronecker product of the sites in row-major order.
class StateVector {
   public:
    /// |0...0>.
    explicit StateVector(int num_qubits);

    int num_qubits() const { return n_; }
    std::span<const Complex> amplitudes() const { return amps_; }
    std::span<Complex> amplitudes() { return amps_; }

    void apply(const GateMatrix &u, std::span<const int> qubits);
    double norm_squared() const;

   private:
    int n_;
    std::vector<Complex> amps_;
};

/// Dense 2^n x 2^n density matrix stored row-major.
class DensityMatrix {
   public:
    /// |0...0><0...0|.
    explicit DensityMatrix(int num_qubits);
    static DensityMatrix from_pure(const StateVector &psi);
    /// Takes a row-major matrix of dimension 2^num_qubits.
    static DensityMatrix from_elements(int num_qubits, std::vector<Complex> elements);

    int num_qubits() const { return n_; }
    std::size_t dim() const { return std::size_t{1} << n_; }
    Complex operator()(std::size_t r, std::size_t c) const { return rho_[r * dim() + c]; }
    std::span<const Complex> elements() const { return rho_; }

    /// rho -> U rho U^dagger.
    void apply_unitary(const GateMatrix &u, std::span<const int> qubits);
    /// rho -> sum_k K rho K^dagger, applied on the affected subsystem only.
    void apply_channel(const Channel &channel, std::span<const int> qubits);

    Complex trace() const;
    double purity() const;

   private:
    int n_;
    std::vector<Complex> rho_;
};

/// Value with a standard error; zero shots marks an exact value.
struct FidelityEstimate {
    double value = 1.0;
    double standard_error = 0.0;
    int shots = 0;
};

/// Noise-free output state of the circuit from |0...0>.
StateVector simulate_ideal(const LatticeCircuit &circuit, const SimulatorLimits &limits = {});

/// Noise-free output of a program: only its Gate operations are applied.
StateVector ideal_state(const NoisyProgram &program, const SimulatorLimits &limits = {});

DensityMatrix simulate_density(const NoisyProgram &program, const SimulatorLimits &limits = {});

/// Monte Carlo unraveling of the program: each depolarizing channel becomes
/// either nothing (with the Kraus identity weight) or a uniformly chosen
/// non-identity Pauli. Returns the mean overlap with the ideal state and its
/// standard error (sample std / sqrt(shots)).
FidelityEstimate simulate_trajectories(const NoisyProgram &program, int shots, std::uint64_t seed,
                                       const SimulatorLimits &limits = {});

/// <psi|rho|psi>, clamped to [0, 1] after a 1e-9 tolerance check.
double fidelity_pure(const StateVector &psi, const DensityMatrix &rho);

/// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 through Hermitian
/// eigendecompositions. Throws ValidationError when an argument is not a
/// density matrix within tolerance.
double fidelity_uhlmann(const DensityMatrix &rho, const DensityMatrix &sigma);

/// Sub-circuit on one tile, with coordinates relative to the tile corner.
/// Throws ValidationError if a two-qubit gate crosses the tile boundary.
LatticeCircuit restrict_to_tile(const LatticeCircuit &circuit, const Rect &tile);

/// Exact fidelity of the noisy circuit against its ideal output.
double exact_fidelity(const LatticeCircuit &circuit, const SimNoiseModel &model, const SimulatorLimits &limits = {});

/// Product over tiles of each tile's exact fidelity. Requires GatePairOnly
/// crosstalk and a circuit that respects the tiling.
FidelityEstimate tiled_fidelity(const LatticeCircuit &circuit, const Tiling &tiling, const SimNoiseModel &model,
                                const SimulatorLimits &limits = {});

}  // namespace qfe
