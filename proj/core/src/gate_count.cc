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

#include "qfe/gate_count.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "qfe/error.h"

namespace qfe {

using nlohmann::json;

GateCountRegressor fit_gate_count_regressor(const std::vector<LatticeCircuit> &circuits,
                                            const std::vector<double> &labels) {
    if (circuits.size() != labels.size()) {
        throw ParameterError("circuit and label counts differ");
    }
    if (circuits.empty()) {
        throw ParameterError("cannot fit the gate-count regressor on an empty dataset");
    }
    GateCountRegressor r;
    r.rows = circuits.front().rows();
    r.cols = circuits.front().cols();
    const auto n = static_cast<Eigen::Index>(circuits.size());
    const auto k = static_cast<Eigen::Index>(gate_count_features(circuits.front()).size());
    Eigen::MatrixXd x(n, k + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const LatticeCircuit &c = circuits[i];
        if (c.rows() != r.rows || c.cols() != r.cols) {
            throw ParameterError("all circuits must share one lattice");
        }
        const auto f = gate_count_features(c);
        x(i, 0) = 1.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            x(i, j + 1) = f[j];
        }
        y(i) = std::log(std::max(labels[i], kGateCountLabelFloor));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    Eigen::VectorXd w;
    if (qr.rank() == k + 1) {
        w = qr.solve(y);
    } else {
        Eigen::MatrixXd gram = x.transpose() * x;
        gram.diagonal().tail(k).array() += kGateCountRidge;
        w = gram.ldlt().solve(x.transpose() * y);
        r.ridge = true;
        r.warning = "gate-count design matrix has rank " + std::to_string(qr.rank()) + " < " +
                    std::to_string(k + 1) + "; used ridge regression with lambda 1e-8";
    }
    r.intercept = w(0);
    r.coefficients.assign(w.data() + 1, w.data() + w.size());
    return r;
}

double predict_gate_count(const GateCountRegressor &r, const std::vector<double> &features) {
    if (features.size() != r.coefficients.size()) {
        throw ParameterError("feature vector has " + std::to_string(features.size()) + " entries, regressor expects " +
                             std::to_string(r.coefficients.size()));
    }
    double s = r.intercept;
    for (std::size_t i = 0; i < features.size(); ++i) {
        s += r.coefficients[i] * features[i];
    }
    return std::clamp(std::exp(s), std::numeric_limits<double>::min(), 1.0);
}

double predict_gate_count(const GateCountRegressor &r, const LatticeCircuit &circuit) {
    if (circuit.rows() != r.rows || circuit.cols() != r.cols) {
        throw ParameterError("circuit lattice differs from the fitted lattice");
    }
    return predict_gate_count(r, gate_count_features(circuit));
}

json to_json(const GateCountRegressor &r) {
    json j{{"kind", "gate-count"},
           {"rows", r.rows},
           {"cols", r.cols},
           {"intercept", r.intercept},
           {"coefficients", r.coefficients},
           {"ridge", r.ridge}};
    if (!r.warning.empty()) {
        j["warning"] = r.warning;
    }
    return j;
}

GateCountRegressor gate_count_regressor_from_json(const json &j) {
    try {
        if (j.at("kind").get<std::string>() != "gate-count") {
            throw FormatError("not a gate-count regressor");
        }
        GateCountRegressor r;
        r.rows = j.at("rows").get<int>();
        r.cols = j.at("cols").get<int>();
        r.intercept = j.at("intercept").get<double>();
        r.coefficients = j.at("coefficients").get<std::vector<double>>();
        r.ridge = j.value("ridge", false);
        r.warning = j.value("warning", std::string());
        if (r.coefficients.size() != static_cast<std::size_t>(r.rows * r.cols) + lattice_couplers(r.rows, r.cols).size()) {
            throw FormatError("coefficient count does not match the lattice");
        }
        return r;
    } catch (const json::exception &e) {
        throw FormatError(std::string("malformed gate-count regressor: ") + e.what());
    }
}

}  // namespace qfe
