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

#include <nlohmann/json.hpp>

#include "qfe/lattice.h"

namespace qfe {

/// Circuit text form:
///
///   {"rows": R, "cols": C,
///    "moments": [[{"x": 0, "y": 1, "gate": "CX", "dir": "E"}, ...], ...]}
///
/// Identity slots are omitted on output and ignored on input.
nlohmann::json circuit_to_json(const LatticeCircuit &circuit);
/// Throws FormatError on malformed input, ValidationError on an illegal circuit.
LatticeCircuit circuit_from_json(const nlohmann::json &j);

/// Tiling as [[x0, y0, x_extent, y_extent], ...].
nlohmann::json tiling_to_json(const Tiling &tiling);
Tiling tiling_from_json(const nlohmann::json &j);

}  // namespace qfe
