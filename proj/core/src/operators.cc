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

#include "qfe/operators.h"

#include <cmath>
#include <numbers>

namespace qfe {

GateMatrix GateMatrix::identity(int qubits) {
    GateMatrix m;
    m.qubits = qubits;
    for (int i = 0; i < m.dim(); ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

GateMatrix GateMatrix::adjoint() const {
    GateMatrix out;
    out.qubits = qubits;
    for (int r = 0; r < dim(); ++r) {
        for (int c = 0; c < dim(); ++c) {
            out(r, c) = std::conj((*this)(c, r));
        }
    }
    return out;
}

GateMatrix operator*(const GateMatrix &a, const GateMatrix &b) {
    GateMatrix out;
    out.qubits = a.qubits;
    const int d = a.dim();
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            Complex acc = 0.0;
            for (int k = 0; k < d; ++k) {
                acc += a(r, k) * b(k, c);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

GateMatrix kron(const GateMatrix &a, const GateMatrix &b) {
    GateMatrix out;
    out.qubits = a.qubits + b.qubits;
    const int db = b.dim();
    for (int ra = 0; ra < a.dim(); ++ra) {
        for (int ca = 0; ca < a.dim(); ++ca) {
            for (int rb = 0; rb < db; ++rb) {
                for (int cb = 0; cb < db; ++cb) {
                    out(ra * db + rb, ca * db + cb) = a(ra, ca) * b(rb, cb);
                }
            }
        }
    }
    return out;
}

GateMatrix pauli(int index) {
    GateMatrix m;
    const Complex i(0.0, 1.0);
    switch (index) {
        case 0:
            return GateMatrix::identity(1);
        case 1:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case 2:
            m(0, 1) = -i;
            m(1, 0) = i;
            break;
        default:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
    }
    return m;
}

GateMatrix pauli_string(int qubits, int index) {
    if (qubits == 1) {
        return pauli(index);
    }
    return kron(pauli(index / 4), pauli(index % 4));
}

GateMatrix gate_unitary(GateKind kind) {
    const double r = 1.0 / std::numbers::sqrt2;
    GateMatrix m;
    switch (kind) {
        case GateKind::I:
            return GateMatrix::identity(1);
        case GateKind::X:
            return pauli(1);
        case GateKind::Y:
            return pauli(2);
        case GateKind::Z:
            return pauli(3);
        case GateKind::H:
            m(0, 0) = r;
            m(0, 1) = r;
            m(1, 0) = r;
            m(1, 1) = -r;
            return m;
        case GateKind::T:
        case GateKind::Tdag: {
            const double sign = kind == GateKind::T ? 1.0 : -1.0;
            m(0, 0) = 1.0;
            m(1, 1) = Complex(r, sign * r);
            return m;
        }
        case GateKind::CX:
            m = GateMatrix::identity(2);
            m(2, 2) = 0.0;
            m(3, 3) = 0.0;
            m(2, 3) = 1.0;
            m(3, 2) = 1.0;
            return m;
        case GateKind::CZ:
            m = GateMatrix::identity(2);
            m(3, 3) = -1.0;
            return m;
    }
    return GateMatrix::identity(1);
}

}  // namespace qfe
