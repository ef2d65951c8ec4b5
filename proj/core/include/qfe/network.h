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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfe/aligned.h"

namespace qfe {

/// Dense row-major array with a shape.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<int> shape, std::vector<double> data);
    explicit Tensor(std::vector<int> shape);

    std::size_t size() const { return data.size(); }
    bool operator==(const Tensor &) const = default;
};

std::size_t shape_size(const std::vector<int> &shape);
std::string shape_string(const std::vector<int> &shape);

enum class LayerKind { ZeroPad2D, LocallyConnected2D, Conv3D, Flatten, Dense };
enum class Activation { Linear, Relu };

/// One layer descriptor. Field use by kind:
///   ZeroPad2D           padding
///   LocallyConnected2D  kernel (kh, kw), filters; stride 1, no padding
///   Conv3D              kernel (kd, kh, kw), filters; stride 1, zero "same"
///                       padding with (k - 1) / 2 before and the rest after
///   Dense               units
struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    std::vector<int> kernel;
    int filters = 0;
    int units = 0;
    int padding = 0;
    Activation activation = Activation::Linear;

    static LayerSpec zero_pad_2d(int padding);
    static LayerSpec locally_connected_2d(int kh, int kw, int filters, Activation a = Activation::Relu);
    static LayerSpec conv3d(int kd, int kh, int kw, int filters, Activation a = Activation::Relu);
    static LayerSpec flatten();
    static LayerSpec dense(int units, Activation a = Activation::Relu);

    bool operator==(const LayerSpec &) const = default;
};

struct NetworkSpec {
    /// Per-sample input shape: (H, W, C) for 2D stacks, (D, H, W, C) for 3D.
    std::vector<int> input_shape;
    std::vector<LayerSpec> layers;

    bool operator==(const NetworkSpec &) const = default;
};

std::string layer_kind_name(LayerKind k);
nlohmann::json to_json(const NetworkSpec &spec);
/// Throws SpecError on unknown kinds or malformed fields.
NetworkSpec network_spec_from_json(const nlohmann::json &j);

/// ZP2D(1), LC2D 2x2x16, LC2D 1x1x16 twice, LC2D 1x1x1, Flatten, Dense 64,
/// Dense 64, Dense 1. For a 3x3x13 input this has 27,857 parameters.
NetworkSpec preset_lc2d(int rows = 3, int cols = 3, int channels = 13);

/// Three 4x4x4 same-padded Conv3D layers, Flatten, `dense_layers` Dense
/// layers of `dense_width`, Dense(tail_width), Dense(1), Dense(1). With the
/// defaults on a 12x5x5x15 input this has 8,645,253 parameters. The two
/// final single-unit layers are both linear.
NetworkSpec preset_cnn3d(std::vector<int> input_shape = {12, 5, 5, 15}, int conv_filters = 50,
                         int dense_width = 500, int dense_layers = 4, int tail_width = 50);

/// "lc2d-3x3" or "cnn3d" for the given per-sample input shape.
NetworkSpec preset_by_name(const std::string &name, const std::vector<int> &input_shape);

class Layer;

/// Scratch buffers for one batch; reuse across calls to avoid reallocation.
struct Workspace {
    int batch = 0;
    AlignedVector input;
    std::vector<AlignedVector> activations;
    std::vector<AlignedVector> gradients;
};

/// Feed-forward stack with a flat parameter vector. Layers are immutable and
/// the parameters are passed explicitly to the evaluation routines, so a
/// frozen network can be shared by concurrent predictors.
class Network {
   public:
    /// Throws SpecError naming the first incompatible layer.
    explicit Network(NetworkSpec spec);
    ~Network();
    Network(const Network &);
    Network &operator=(const Network &);
    Network(Network &&) noexcept;
    Network &operator=(Network &&) noexcept;

    const NetworkSpec &spec() const { return spec_; }
    std::size_t param_count() const { return params_.size(); }
    std::size_t input_size() const;
    std::vector<std::size_t> layer_param_counts() const;
    std::vector<std::vector<int>> layer_output_shapes() const;
    /// Offset of each layer's block inside the flat parameter vector.
    std::vector<std::size_t> layer_param_offsets() const;

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    /// Uniform fan-in initialization: limit sqrt(6 / fan_in) for layers
    /// followed by ReLU, sqrt(3 / fan_in) for linear ones; biases zero.
    /// Fans are per output unit, so a locally connected layer uses its patch
    /// size. The output scale is left alone.
    void initialize(std::uint64_t seed);

    /// Fixed affine map applied by predict(): offset + scale * raw output.
    /// forward() and loss_and_gradient() work on the raw output.
    struct OutputScale {
        double offset = 0.0;
        double scale = 1.0;

        bool operator==(const OutputScale &) const = default;
    };
    const OutputScale &output_scale() const { return output_scale_; }
    /// Throws ParameterError unless scale is finite and positive.
    void set_output_scale(OutputScale s);

    /// Predictions for `count` samples stored back to back in `inputs`.
    std::vector<double> predict(std::span<const double> inputs, std::size_t count, int batch = 64) const;
    double predict_one(const Tensor &input) const;

    /// Outputs for one batch with explicit parameters; the result is the
    /// last activation buffer of `ws`.
    std::span<const double> forward(std::span<const double> params, const double *inputs, int batch,
                                    Workspace &ws) const;
    /// Mean squared error of one batch and its gradient with respect to the
    /// parameters (overwritten, not accumulated).
    double loss_and_gradient(std::span<const double> params, const double *inputs, const double *targets, int batch,
                             std::span<double> grad, Workspace &ws) const;

   private:
    NetworkSpec spec_;
    std::vector<std::shared_ptr<const Layer>> layers_;
    std::vector<std::size_t> offsets_;
    AlignedVector params_;
    OutputScale output_scale_;
};

}  // namespace qfe
