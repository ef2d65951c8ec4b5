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
#include <complex>
#include <vector>

#include "qfe/lattice.h"

namespace qfe {

using Complex = std::complex<double>;

/// Row-major 2x2 or 4x4 complex matrix. For two-qubit operators the first
/// listed qubit is the more significant bit of the local basis index.
struct GateMatrix {
    int qubits = 1;
    std::array<Complex, 16> elems{};

    int dim() const { return 1 << qubits; }
    Complex &operator()(int r, int c) { return elems[r * dim() + c]; }
    const Complex &operator()(int r, int c) const { return elems[r * dim() + c]; }

    static GateMatrix identity(int qubits);
    GateMatrix adjoint() const;
    bool operator==(const GateMatrix &) const = default;
};

GateMatrix operator*(const GateMatrix &a, const GateMatrix &b);
GateMatrix kron(const GateMatrix &a, const GateMatrix &b);

/// Unitary of a lattice gate. Two-qubit matrices act on (anchor, partner);
/// for CX the anchor is the control.
GateMatrix gate_unitary(GateKind kind);

/// Pauli by index 0..3 = I, X, Y, Z.
GateMatrix pauli(int index);

/// n-qubit Pauli string by base-4 index; the first qubit's Pauli is the most
/// significant digit.
GateMatrix pauli_string(int qubits, int index);

/// Kraus representation of a channel on one or two qubits.
struct Channel {
    int qubits = 1;
    std::vector<GateMatrix> kraus;
};

}  // namespace qfe
