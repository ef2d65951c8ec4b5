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
#include <vector>

#include "qfe/lattice.h"

namespace qfe {

/// Channel layout of the one-hot encoding:
///
///   0 I, 1 X, 2 Y, 3 Z, 4 H, [5 T, 6 Tdag,] then CX-N CX-E CX-S CX-W,
///   CZ-N CZ-E CZ-S CZ-W.
///
/// The T channels exist only in the 15-channel layout. A two-qubit gate
/// lights its gate-and-direction channel at the anchor site; the partner
/// site reads Identity.
int channel_of(const Gate &gate, bool t_channels);
Gate gate_of_channel(int channel, bool t_channels);

/// Dense one-hot array of shape [depth][rows][cols][channels].
struct CircuitTensor {
    int depth = 0;
    int rows = 0;
    int cols = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    std::size_t offset(int m, int x, int y, int c) const {
        return ((static_cast<std::size_t>(m) * rows + x) * cols + y) * channels + c;
    }
    std::uint8_t at(int m, int x, int y, int c) const { return data[offset(m, x, y, c)]; }
    std::vector<double> as_doubles() const { return {data.begin(), data.end()}; }
    bool operator==(const CircuitTensor &) const = default;
};

/// Throws EncodingError when a gate is outside the palette.
CircuitTensor encode_one_hot(const LatticeCircuit &circuit, const Palette &palette);

/// Inverse of encode_one_hot. Throws DecodeError on non one-hot cells, an
/// anchor pointing off-lattice, or a partner slot that is not Identity or is
/// claimed twice.
LatticeCircuit decode_one_hot(const CircuitTensor &tensor);

}  // namespace qfe
