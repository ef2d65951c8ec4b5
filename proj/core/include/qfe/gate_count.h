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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfe/lattice.h"

namespace qfe {

/// Log-linear fidelity baseline on gate_count_features:
///   log F ~ intercept + sum_k coefficient_k * feature_k.
struct GateCountRegressor {
    int rows = 0;
    int cols = 0;
    std::vector<double> coefficients;
    double intercept = 0.0;
    /// Set when the design matrix was rank deficient and ridge was used.
    bool ridge = false;
    std::string warning;
};

inline constexpr double kGateCountRidge = 1e-8;
inline constexpr double kGateCountLabelFloor = 1e-12;

/// Least squares on log(max(label, 1e-12)) with an intercept. A rank
/// deficient design falls back to ridge regression (lambda = 1e-8 on the
/// coefficients, intercept unpenalized) and records a warning.
GateCountRegressor fit_gate_count_regressor(const std::vector<LatticeCircuit> &circuits,
                                            const std::vector<double> &labels);

/// exp(intercept + w . features), clamped to (0, 1].
double predict_gate_count(const GateCountRegressor &r, const std::vector<double> &features);
double predict_gate_count(const GateCountRegressor &r, const LatticeCircuit &circuit);

nlohmann::json to_json(const GateCountRegressor &r);
GateCountRegressor gate_count_regressor_from_json(const nlohmann::json &j);

}  // namespace qfe
