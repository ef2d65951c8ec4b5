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

#include <cstddef>
#include <memory>
#include <vector>

#include "qfe/network.h"

namespace qfe {

/// Shape-resolved layer. Parameters are laid out weights first, then biases,
/// and are passed in by the caller. Batches are stored sample-major.
class Layer {
   public:
    virtual ~Layer() = default;

    const std::vector<int> &input_shape() const { return in_shape_; }
    const std::vector<int> &output_shape() const { return out_shape_; }
    std::size_t in_size() const { return in_size_; }
    std::size_t out_size() const { return out_size_; }

    virtual std::size_t param_count() const { return 0; }
    virtual std::size_t bias_count() const { return 0; }
    /// Inputs feeding one output unit.
    virtual std::size_t fan_in() const { return 1; }

    virtual void forward(const double *params, const double *in, double *out, int batch) const = 0;
    /// Accumulates into `param_grad`; writes `in_grad` unless it is null.
    virtual void backward(const double *params, const double *in, const double *out_grad, double *in_grad,
                          double *param_grad, int batch) const = 0;

   protected:
    void set_shapes(std::vector<int> in, std::vector<int> out);

   private:
    std::vector<int> in_shape_;
    std::vector<int> out_shape_;
    std::size_t in_size_ = 0;
    std::size_t out_size_ = 0;
};

/// Throws SpecError when `spec` cannot follow a layer producing `input`.
std::shared_ptr<const Layer> make_layer(const LayerSpec &spec, const std::vector<int> &input, int index);

}  // namespace qfe
