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

#include "qfe/encoding.h"

#include <string>

#include "qfe/error.h"

namespace qfe {

namespace {

int two_qubit_base(bool t_channels) { return t_channels ? 7 : 5; }

}  // namespace

int channel_of(const Gate &gate, bool t_channels) {
    switch (gate.kind) {
        case GateKind::I:
            return 0;
        case GateKind::X:
            return 1;
        case GateKind::Y:
            return 2;
        case GateKind::Z:
            return 3;
        case GateKind::H:
            return 4;
        case GateKind::T:
        case GateKind::Tdag:
            if (!t_channels) {
                throw EncodingError("T/Tdag has no channel in the 13-channel layout");
            }
            return gate.kind == GateKind::T ? 5 : 6;
        case GateKind::CX:
        case GateKind::CZ: {
            const int family = gate.kind == GateKind::CX ? 0 : 4;
            return two_qubit_base(t_channels) + family + static_cast<int>(*gate.dir);
        }
    }
    throw EncodingError("unknown gate kind");
}

Gate gate_of_channel(int channel, bool t_channels) {
    static constexpr GateKind kSingles[] = {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z,
                                            GateKind::H, GateKind::T, GateKind::Tdag};
    const int base = two_qubit_base(t_channels);
    if (channel < 0 || channel >= base + 8) {
        throw DecodeError("channel " + std::to_string(channel) + " is out of range");
    }
    if (channel < base) {
        return Gate::single(kSingles[channel]);
    }
    const int rel = channel - base;
    return Gate::two(rel < 4 ? GateKind::CX : GateKind::CZ, static_cast<Direction>(rel % 4));
}

CircuitTensor encode_one_hot(const LatticeCircuit &circuit, const Palette &palette) {
    CircuitTensor t;
    t.depth = circuit.depth();
    t.rows = circuit.rows();
    t.cols = circuit.cols();
    t.channels = palette.channels();
    t.data.assign(static_cast<std::size_t>(t.depth) * t.rows * t.cols * t.channels, 0);
    for (int m = 0; m < t.depth; ++m) {
        for (int x = 0; x < t.rows; ++x) {
            for (int y = 0; y < t.cols; ++y) {
                const Gate &g = circuit.at(m, {x, y});
                if (!palette.allows(g.kind)) {
                    throw EncodingError("gate " + std::string(gate_name(g.kind)) + " at (" + std::to_string(x) +
                                        ", " + std::to_string(y) + ") in moment " + std::to_string(m) +
                                        " is outside the palette");
                }
                t.data[t.offset(m, x, y, channel_of(g, palette.t_channels))] = 1;
            }
        }
    }
    return t;
}

LatticeCircuit decode_one_hot(const CircuitTensor &tensor) {
    if (tensor.channels != 13 && tensor.channels != 15) {
        throw DecodeError("tensor has " + std::to_string(tensor.channels) + " channels; expected 13 or 15");
    }
    if (tensor.data.size() != static_cast<std::size_t>(tensor.depth) * tensor.rows * tensor.cols * tensor.channels) {
        throw DecodeError("tensor storage does not match its shape");
    }
    const bool t_channels = tensor.channels == 15;
    LatticeCircuit c(tensor.rows, tensor.cols, tensor.depth);
    for (int m = 0; m < tensor.depth; ++m) {
        std::vector<int> claimed(c.num_qubits(), 0);
        for (int x = 0; x < tensor.rows; ++x) {
            for (int y = 0; y < tensor.cols; ++y) {
                int hot = -1;
                for (int ch = 0; ch < tensor.channels; ++ch) {
                    const std::uint8_t v = tensor.at(m, x, y, ch);
                    if (v > 1 || (v == 1 && hot >= 0)) {
                        throw DecodeError("cell (" + std::to_string(x) + ", " + std::to_string(y) + ") in moment " +
                                          std::to_string(m) + " is not one-hot");
                    }
                    if (v == 1) {
                        hot = ch;
                    }
                }
                if (hot < 0) {
                    throw DecodeError("cell (" + std::to_string(x) + ", " + std::to_string(y) + ") in moment " +
                                      std::to_string(m) + " has no channel set");
                }
                const Gate g = gate_of_channel(hot, t_channels);
                c.set(m, {x, y}, g);
                if (is_two_qubit(g.kind)) {
                    const Site p = step({x, y}, *g.dir);
                    if (!c.contains(p)) {
                        throw DecodeError("anchor at (" + std::to_string(x) + ", " + std::to_string(y) +
                                          ") in moment " + std::to_string(m) + " points off the lattice");
                    }
                    ++claimed[c.qubit(p)];
                }
            }
        }
        for (int q = 0; q < c.num_qubits(); ++q) {
            const Site s = c.site(q);
            if (claimed[q] > 1) {
                throw DecodeError("partner site (" + std::to_string(s.x) + ", " + std::to_string(s.y) +
                                  ") in moment " + std::to_string(m) + " is claimed by two anchors");
            }
            if (claimed[q] == 1 && !c.at(m, s).is_identity()) {
                throw DecodeError("partner site (" + std::to_string(s.x) + ", " + std::to_string(s.y) +
                                  ") in moment " + std::to_string(m) + " is not Identity");
            }
        }
    }
    return c;
}

}  // namespace qfe
