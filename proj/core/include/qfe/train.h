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
#include <functional>
#include <vector>

#include "qfe/encoding.h"
#include "qfe/network.h"

namespace qfe {

/// Samples stored back to back, one target per sample.
struct TrainingData {
    std::size_t sample_size = 0;
    std::vector<double> inputs;
    std::vector<double> targets;

    std::size_t count() const { return targets.size(); }
    const double *sample(std::size_t i) const { return inputs.data() + i * sample_size; }
};

TrainingData make_training_data(const std::vector<CircuitTensor> &tensors, const std::vector<double> &targets);

struct SgdConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    bool nesterov = true;
    int batch_size = 32;
    int epochs = 100;
    std::uint64_t seed = 0;
    /// Set the network's output scale to the training-label mean and standard
    /// deviation before the first step. Otherwise the current scale is kept.
    bool standardize_targets = true;

    void validate() const;
};

struct TrainingReport {
    /// Mean of the per-batch losses seen during each epoch.
    std::vector<double> train_loss;
    /// Full validation MSE after each epoch; empty without validation data.
    std::vector<double> validation_loss;
};

/// Called after every epoch with (epoch, train loss, validation loss or NaN).
using EpochCallback = std::function<void(int, double, double)>;

/// Minibatch SGD on the mean squared error of the raw network output against
/// the targets mapped through the inverse output scale. Reported losses are in
/// target units. Each epoch visits the samples in
/// a permutation drawn from derive_seed(seed, epoch). With momentum mu and
/// velocity v the step is
///   v <- mu v - lr grad L(theta + mu v),  theta <- theta + v   (Nesterov)
///   v <- mu v - lr grad L(theta),         theta <- theta + v   (classical)
/// Throws TrainingError on a non-finite loss.
TrainingReport train_sgd(Network &network, const TrainingData &train, const SgdConfig &config,
                         const TrainingData *validation = nullptr, const EpochCallback &on_epoch = {});

double mean_squared_error(const Network &network, const TrainingData &data);

struct GradientCheckResult {
    double max_relative_error = 0.0;
    std::size_t coordinates = 0;
    /// Worst error per layer; zero for layers without parameters.
    std::vector<double> per_layer;
};

/// Central differences with step h on at least `coordinates` parameters,
/// spread evenly over every layer that has parameters, against backprop on
/// the batch loss. Relative error is |a - n| / max(|a|, |n|, 1e-6).
GradientCheckResult gradient_check(const Network &network, const TrainingData &batch, double h,
                                   std::size_t coordinates = 200, std::uint64_t seed = 0);

}  // namespace qfe
