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

#include "qfe/network.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "layers.h"
#include "qfe/error.h"
#include "qfe/rng.h"

namespace qfe {

using nlohmann::json;

Tensor::Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    if (shape_size(shape) != data.size()) {
        throw ParameterError("tensor shape " + shape_string(shape) + " does not match " +
                             std::to_string(data.size()) + " values");
    }
}

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)), data(shape_size(shape), 0.0) {}

std::size_t shape_size(const std::vector<int> &shape) {
    std::size_t n = 1;
    for (int d : shape) {
        n *= static_cast<std::size_t>(std::max(d, 0));
    }
    return n;
}

std::string shape_string(const std::vector<int> &shape) {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        out << (i ? ", " : "") << shape[i];
    }
    out << ')';
    return out.str();
}

LayerSpec LayerSpec::zero_pad_2d(int padding) {
    LayerSpec s;
    s.kind = LayerKind::ZeroPad2D;
    s.padding = padding;
    return s;
}

LayerSpec LayerSpec::locally_connected_2d(int kh, int kw, int filters, Activation a) {
    LayerSpec s;
    s.kind = LayerKind::LocallyConnected2D;
    s.kernel = {kh, kw};
    s.filters = filters;
    s.activation = a;
    return s;
}

LayerSpec LayerSpec::conv3d(int kd, int kh, int kw, int filters, Activation a) {
    LayerSpec s;
    s.kind = LayerKind::Conv3D;
    s.kernel = {kd, kh, kw};
    s.filters = filters;
    s.activation = a;
    return s;
}

LayerSpec LayerSpec::flatten() {
    LayerSpec s;
    s.kind = LayerKind::Flatten;
    return s;
}

LayerSpec LayerSpec::dense(int units, Activation a) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.units = units;
    s.activation = a;
    return s;
}

std::string layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::ZeroPad2D:
            return "zero_pad_2d";
        case LayerKind::LocallyConnected2D:
            return "locally_connected_2d";
        case LayerKind::Conv3D:
            return "conv3d";
        case LayerKind::Flatten:
            return "flatten";
        case LayerKind::Dense:
            return "dense";
    }
    return "unknown";
}

json to_json(const NetworkSpec &spec) {
    json layers = json::array();
    for (const LayerSpec &l : spec.layers) {
        json j{{"kind", layer_kind_name(l.kind)}};
        switch (l.kind) {
            case LayerKind::ZeroPad2D:
                j["padding"] = l.padding;
                break;
            case LayerKind::LocallyConnected2D:
            case LayerKind::Conv3D:
                j["kernel"] = l.kernel;
                j["filters"] = l.filters;
                break;
            case LayerKind::Dense:
                j["units"] = l.units;
                break;
            case LayerKind::Flatten:
                break;
        }
        if (l.kind != LayerKind::ZeroPad2D && l.kind != LayerKind::Flatten) {
            j["activation"] = l.activation == Activation::Relu ? "relu" : "linear";
        }
        layers.push_back(std::move(j));
    }
    return json{{"input_shape", spec.input_shape}, {"layers", layers}};
}

NetworkSpec network_spec_from_json(const json &j) {
    try {
        NetworkSpec spec;
        spec.input_shape = j.at("input_shape").get<std::vector<int>>();
        for (const json &l : j.at("layers")) {
            LayerSpec s;
            const auto kind = l.at("kind").get<std::string>();
            bool found = false;
            for (LayerKind k : {LayerKind::ZeroPad2D, LayerKind::LocallyConnected2D, LayerKind::Conv3D,
                                LayerKind::Flatten, LayerKind::Dense}) {
                if (layer_kind_name(k) == kind) {
                    s.kind = k;
                    found = true;
                }
            }
            if (!found) {
                throw SpecError("unknown layer kind '" + kind + "'");
            }
            s.padding = l.value("padding", 0);
            s.kernel = l.value("kernel", std::vector<int>{});
            s.filters = l.value("filters", 0);
            s.units = l.value("units", 0);
            const auto act = l.value("activation", std::string("linear"));
            if (act != "relu" && act != "linear") {
                throw SpecError("unknown activation '" + act + "'");
            }
            s.activation = act == "relu" ? Activation::Relu : Activation::Linear;
            spec.layers.push_back(std::move(s));
        }
        return spec;
    } catch (const json::exception &e) {
        throw SpecError(std::string("malformed network spec: ") + e.what());
    }
}

NetworkSpec preset_lc2d(int rows, int cols, int channels) {
    NetworkSpec s;
    s.input_shape = {rows, cols, channels};
    s.layers = {LayerSpec::zero_pad_2d(1),
                LayerSpec::locally_connected_2d(2, 2, 16),
                LayerSpec::locally_connected_2d(1, 1, 16),
                LayerSpec::locally_connected_2d(1, 1, 16),
                LayerSpec::locally_connected_2d(1, 1, 1),
                LayerSpec::flatten(),
                LayerSpec::dense(64),
                LayerSpec::dense(64),
                LayerSpec::dense(1, Activation::Linear)};
    return s;
}

NetworkSpec preset_cnn3d(std::vector<int> input_shape, int conv_filters, int dense_width, int dense_layers,
                         int tail_width) {
    NetworkSpec s;
    s.input_shape = std::move(input_shape);
    for (int i = 0; i < 3; ++i) {
        s.layers.push_back(LayerSpec::conv3d(4, 4, 4, conv_filters));
    }
    s.layers.push_back(LayerSpec::flatten());
    for (int i = 0; i < dense_layers; ++i) {
        s.layers.push_back(LayerSpec::dense(dense_width));
    }
    s.layers.push_back(LayerSpec::dense(tail_width));
    s.layers.push_back(LayerSpec::dense(1, Activation::Linear));
    s.layers.push_back(LayerSpec::dense(1, Activation::Linear));
    return s;
}

NetworkSpec preset_by_name(const std::string &name, const std::vector<int> &input_shape) {
    if (name == "lc2d-3x3" || name == "lc2d") {
        // A single-moment tensor (1, H, W, C) feeds the 2D stack as (H, W, C).
        if (input_shape.size() == 4 && input_shape[0] == 1) {
            return preset_lc2d(input_shape[1], input_shape[2], input_shape[3]);
        }
        if (input_shape.size() == 3) {
            return preset_lc2d(input_shape[0], input_shape[1], input_shape[2]);
        }
        throw SpecError("lc2d needs single-moment input, got " + shape_string(input_shape));
    }
    if (name == "cnn3d") {
        if (input_shape.size() != 4) {
            throw SpecError("cnn3d needs (D, H, W, C) input, got " + shape_string(input_shape));
        }
        return preset_cnn3d(input_shape);
    }
    throw SpecError("unknown network preset '" + name + "' (expected lc2d-3x3 or cnn3d)");
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
    if (spec_.layers.empty()) {
        throw SpecError("network has no layers");
    }
    std::vector<int> shape = spec_.input_shape;
    std::size_t total = 0;
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        auto layer = make_layer(spec_.layers[i], shape, static_cast<int>(i));
        offsets_.push_back(total);
        total += layer->param_count();
        shape = layer->output_shape();
        layers_.push_back(std::move(layer));
    }
    if (shape != std::vector<int>{1}) {
        throw SpecError("network output must be a single value, got " + shape_string(shape));
    }
    params_.assign(total, 0.0);
}

Network::~Network() = default;
Network::Network(const Network &) = default;
Network &Network::operator=(const Network &) = default;
Network::Network(Network &&) noexcept = default;
Network &Network::operator=(Network &&) noexcept = default;

std::size_t Network::input_size() const { return shape_size(spec_.input_shape); }

std::vector<std::size_t> Network::layer_param_counts() const {
    std::vector<std::size_t> out;
    for (const auto &l : layers_) {
        out.push_back(l->param_count());
    }
    return out;
}

std::vector<std::vector<int>> Network::layer_output_shapes() const {
    std::vector<std::vector<int>> out;
    for (const auto &l : layers_) {
        out.push_back(l->output_shape());
    }
    return out;
}

std::vector<std::size_t> Network::layer_param_offsets() const { return offsets_; }

void Network::initialize(std::uint64_t seed) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer &l = *layers_[i];
        if (l.param_count() == 0) {
            continue;
        }
        Rng rng(derive_seed(derive_seed(seed, kStreamInit), i));
        const double gain = spec_.layers[i].activation == Activation::Relu ? 6.0 : 3.0;
        const double limit = std::sqrt(gain / static_cast<double>(l.fan_in()));
        double *p = params_.data() + offsets_[i];
        const std::size_t weights = l.param_count() - l.bias_count();
        for (std::size_t k = 0; k < weights; ++k) {
            p[k] = rng.uniform(-limit, limit);
        }
        std::fill(p + weights, p + l.param_count(), 0.0);
    }
}

void Network::set_output_scale(OutputScale s) {
    if (!std::isfinite(s.offset) || !std::isfinite(s.scale) || !(s.scale > 0.0)) {
        throw ParameterError("output scale must be finite and positive");
    }
    output_scale_ = s;
}

std::span<const double> Network::forward(std::span<const double> params, const double *inputs, int batch,
                                         Workspace &ws) const {
    if (params.size() != params_.size()) {
        throw ParameterError("parameter vector has " + std::to_string(params.size()) + " entries, network needs " +
                             std::to_string(params_.size()));
    }
    ws.batch = batch;
    ws.activations.resize(layers_.size());
    ws.input.assign(inputs, inputs + input_size() * batch);
    const double *in = ws.input.data();
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer &l = *layers_[i];
        auto &out = ws.activations[i];
        out.resize(l.out_size() * batch);
        l.forward(params.data() + offsets_[i], in, out.data(), batch);
        if (spec_.layers[i].activation == Activation::Relu) {
            for (double &v : out) {
                v = v > 0.0 ? v : 0.0;
            }
        }
        in = out.data();
    }
    return ws.activations.back();
}

double Network::loss_and_gradient(std::span<const double> params, const double *inputs, const double *targets,
                                  int batch, std::span<double> grad, Workspace &ws) const {
    if (grad.size() != params_.size()) {
        throw ParameterError("gradient buffer size does not match the network");
    }
    const auto out = forward(params, inputs, batch, ws);
    ws.gradients.resize(layers_.size());
    auto &top = ws.gradients.back();
    top.resize(batch);
    double loss = 0.0;
    for (int b = 0; b < batch; ++b) {
        const double r = out[b] - targets[b];
        loss += r * r;
        top[b] = 2.0 * r / batch;
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = layers_.size(); i-- > 0;) {
        const Layer &l = *layers_[i];
        auto &g = ws.gradients[i];
        if (spec_.layers[i].activation == Activation::Relu) {
            const auto &act = ws.activations[i];
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (act[k] <= 0.0) {
                    g[k] = 0.0;
                }
            }
        }
        const double *in = i == 0 ? ws.input.data() : ws.activations[i - 1].data();
        double *in_grad = nullptr;
        if (i > 0) {
            ws.gradients[i - 1].resize(l.in_size() * batch);
            in_grad = ws.gradients[i - 1].data();
        }
        l.backward(params.data() + offsets_[i], in, g.data(), in_grad, grad.data() + offsets_[i], batch);
    }
    return loss / batch;
}

std::vector<double> Network::predict(std::span<const double> inputs, std::size_t count, int batch) const {
    if (inputs.size() != count * input_size()) {
        throw ParameterError("prediction input has " + std::to_string(inputs.size()) + " values, expected " +
                             std::to_string(count) + " samples of " + shape_string(spec_.input_shape));
    }
    std::vector<double> out(count);
    Workspace ws;
    for (std::size_t start = 0; start < count; start += batch) {
        const int n = static_cast<int>(std::min<std::size_t>(batch, count - start));
        const auto y = forward(params_, inputs.data() + start * input_size(), n, ws);
        for (int k = 0; k < n; ++k) {
            out[start + k] = output_scale_.offset + output_scale_.scale * y[k];
        }
    }
    return out;
}

double Network::predict_one(const Tensor &input) const {
    if (input.size() != input_size()) {
        throw ParameterError("input shape " + shape_string(input.shape) + " does not match network input " +
                             shape_string(spec_.input_shape));
    }
    return predict(input.data, 1, 1)[0];
}

}  // namespace qfe
