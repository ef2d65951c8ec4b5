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

#include "qfe/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qfe/error.h"
#include "qfe/rng.h"

namespace qfe {

TrainingData make_training_data(const std::vector<CircuitTensor> &tensors, const std::vector<double> &targets) {
    if (tensors.size() != targets.size()) {
        throw ParameterError("got " + std::to_string(tensors.size()) + " tensors but " +
                             std::to_string(targets.size()) + " targets");
    }
    TrainingData d;
    d.sample_size = tensors.empty() ? 0 : tensors.front().data.size();
    d.inputs.reserve(d.sample_size * tensors.size());
    for (const CircuitTensor &t : tensors) {
        if (t.data.size() != d.sample_size) {
            throw ParameterError("tensors have different shapes");
        }
        d.inputs.insert(d.inputs.end(), t.data.begin(), t.data.end());
    }
    d.targets = targets;
    return d;
}

void SgdConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ParameterError("learning rate must be a non-negative number");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw ParameterError("momentum must lie in [0, 1)");
    }
    if (batch_size < 1 || epochs < 0) {
        throw ParameterError("batch size must be positive and epochs non-negative");
    }
}

double mean_squared_error(const Network &network, const TrainingData &data) {
    if (data.count() == 0) {
        return 0.0;
    }
    const auto pred = network.predict(data.inputs, data.count());
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred[i] - data.targets[i];
        sum += r * r;
    }
    return sum / static_cast<double>(pred.size());
}

TrainingReport train_sgd(Network &network, const TrainingData &train, const SgdConfig &config,
                         const TrainingData *validation, const EpochCallback &on_epoch) {
    config.validate();
    if (train.count() == 0) {
        throw ParameterError("training set is empty");
    }
    if (train.sample_size != network.input_size()) {
        throw ParameterError("training samples have " + std::to_string(train.sample_size) +
                             " values but the network expects " + std::to_string(network.input_size()));
    }
    const std::size_t n = train.count();
    const std::size_t p = network.param_count();
    if (config.standardize_targets) {
        const double mean = std::accumulate(train.targets.begin(), train.targets.end(), 0.0) / n;
        double var = 0.0;
        for (double t : train.targets) {
            var += (t - mean) * (t - mean);
        }
        const double sd = std::sqrt(var / n);
        network.set_output_scale({mean, sd > 1e-12 ? sd : 1.0});
    }
    const Network::OutputScale scale = network.output_scale();
    const double loss_unit = scale.scale * scale.scale;
    AlignedVector velocity(p, 0.0);
    AlignedVector lookahead(p);
    AlignedVector grad(p);
    AlignedVector batch_in;
    AlignedVector batch_target;
    std::vector<std::size_t> order(n);
    Workspace ws;
    TrainingReport report;
    const std::uint64_t shuffle_seed = derive_seed(config.seed, kStreamShuffle);
    auto theta = network.params();

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        Rng rng(derive_seed(shuffle_seed, static_cast<std::uint64_t>(epoch)));
        rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const int b = static_cast<int>(std::min<std::size_t>(config.batch_size, n - start));
            batch_in.resize(static_cast<std::size_t>(b) * train.sample_size);
            batch_target.resize(b);
            for (int k = 0; k < b; ++k) {
                const std::size_t idx = order[start + k];
                std::copy(train.sample(idx), train.sample(idx) + train.sample_size,
                          batch_in.begin() + static_cast<std::ptrdiff_t>(k * train.sample_size));
                batch_target[k] = (train.targets[idx] - scale.offset) / scale.scale;
            }
            std::span<const double> eval_at = theta;
            if (config.nesterov) {
                for (std::size_t i = 0; i < p; ++i) {
                    lookahead[i] = theta[i] + config.momentum * velocity[i];
                }
                eval_at = lookahead;
            }
            const double loss =
                network.loss_and_gradient(eval_at, batch_in.data(), batch_target.data(), b, grad, ws);
            if (!std::isfinite(loss)) {
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(batches) + "; lower the learning rate");
            }
            for (std::size_t i = 0; i < p; ++i) {
                velocity[i] = config.momentum * velocity[i] - config.learning_rate * grad[i];
                theta[i] += velocity[i];
            }
            loss_sum += loss * loss_unit;
            ++batches;
        }
        report.train_loss.push_back(loss_sum / static_cast<double>(batches));
        double val = std::nan("");
        if (validation && validation->count() > 0) {
            val = mean_squared_error(network, *validation);
            if (!std::isfinite(val)) {
                throw TrainingError("non-finite validation loss at epoch " + std::to_string(epoch));
            }
            report.validation_loss.push_back(val);
        }
        if (on_epoch) {
            on_epoch(epoch, report.train_loss.back(), val);
        }
    }
    return report;
}

GradientCheckResult gradient_check(const Network &network, const TrainingData &batch, double h,
                                   std::size_t coordinates, std::uint64_t seed) {
    if (!(h >= 1e-7 && h <= 1e-3)) {
        throw ParameterError("finite-difference step must lie in [1e-7, 1e-3]");
    }
    if (batch.count() == 0) {
        throw ParameterError("gradient check needs at least one sample");
    }
    const auto counts = network.layer_param_counts();
    const auto offsets = network.layer_param_offsets();
    std::size_t param_layers = 0;
    for (std::size_t c : counts) {
        param_layers += c > 0;
    }
    const std::size_t per_layer = (coordinates + param_layers - 1) / std::max<std::size_t>(param_layers, 1);

    const int b = static_cast<int>(batch.count());
    AlignedVector params(network.params().begin(), network.params().end());
    AlignedVector grad(params.size());
    Workspace ws;
    network.loss_and_gradient(params, batch.inputs.data(), batch.targets.data(), b, grad, ws);

    auto loss_at = [&](const AlignedVector &theta) {
        const auto out = network.forward(theta, batch.inputs.data(), b, ws);
        double sum = 0.0;
        for (int i = 0; i < b; ++i) {
            const double r = out[i] - batch.targets[i];
            sum += r * r;
        }
        return sum / b;
    };

    GradientCheckResult result;
    result.per_layer.assign(counts.size(), 0.0);
    Rng rng(seed);
    for (std::size_t layer = 0; layer < counts.size(); ++layer) {
        if (counts[layer] == 0) {
            continue;
        }
        std::vector<std::size_t> picks;
        if (counts[layer] <= per_layer) {
            picks.resize(counts[layer]);
            std::iota(picks.begin(), picks.end(), 0);
        } else {
            // Always include the last coordinate (a bias) and sample the rest.
            picks.push_back(counts[layer] - 1);
            while (picks.size() < per_layer) {
                const std::size_t k = rng.below(counts[layer]);
                if (std::find(picks.begin(), picks.end(), k) == picks.end()) {
                    picks.push_back(k);
                }
            }
        }
        for (std::size_t k : picks) {
            const std::size_t idx = offsets[layer] + k;
            const double saved = params[idx];
            params[idx] = saved + h;
            const double up = loss_at(params);
            params[idx] = saved - h;
            const double down = loss_at(params);
            params[idx] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double analytic = grad[idx];
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
            const double err = std::abs(analytic - numeric) / denom;
            result.per_layer[layer] = std::max(result.per_layer[layer], err);
            result.max_relative_error = std::max(result.max_relative_error, err);
            ++result.coordinates;
        }
    }
    return result;
}

}  // namespace qfe
