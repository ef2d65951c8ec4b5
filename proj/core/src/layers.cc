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

#include "layers.h"

#include <algorithm>
#include <cstring>
#include <string>

#include <Eigen/Dense>

#include "qfe/error.h"

namespace qfe {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;
using ConstMapRow = Eigen::Map<const Eigen::RowVectorXd>;
using MapRow = Eigen::Map<Eigen::RowVectorXd>;

// Per-thread scratch that only grows. The im2col matrices run to tens of
// megabytes; allocating them per call costs a fresh mmap and page faults.
double *scratch(int slot, std::size_t n) {
    thread_local AlignedVector buffers[2];
    AlignedVector &b = buffers[slot];
    if (b.size() < n) {
        b.resize(n);
    }
    return b.data();
}

class ZeroPad2D final : public Layer {
   public:
    ZeroPad2D(int pad, const std::vector<int> &in) : pad_(pad) {
        set_shapes(in, {in[0] + 2 * pad, in[1] + 2 * pad, in[2]});
    }

    void forward(const double *, const double *in, double *out, int batch) const override {
        const int h = input_shape()[0], w = input_shape()[1], c = input_shape()[2];
        const int ow = output_shape()[1];
        std::fill(out, out + out_size() * batch, 0.0);
        for (int b = 0; b < batch; ++b) {
            const double *src = in + in_size() * b;
            double *dst = out + out_size() * b;
            for (int i = 0; i < h; ++i) {
                std::memcpy(dst + ((i + pad_) * ow + pad_) * c, src + i * w * c, sizeof(double) * w * c);
            }
        }
    }

    void backward(const double *, const double *, const double *out_grad, double *in_grad, double *,
                  int batch) const override {
        if (!in_grad) {
            return;
        }
        const int h = input_shape()[0], w = input_shape()[1], c = input_shape()[2];
        const int ow = output_shape()[1];
        for (int b = 0; b < batch; ++b) {
            const double *src = out_grad + out_size() * b;
            double *dst = in_grad + in_size() * b;
            for (int i = 0; i < h; ++i) {
                std::memcpy(dst + i * w * c, src + ((i + pad_) * ow + pad_) * c, sizeof(double) * w * c);
            }
        }
    }

   private:
    int pad_;
};

class Flatten final : public Layer {
   public:
    explicit Flatten(const std::vector<int> &in) { set_shapes(in, {static_cast<int>(shape_size(in))}); }

    void forward(const double *, const double *in, double *out, int batch) const override {
        std::memcpy(out, in, sizeof(double) * in_size() * batch);
    }

    void backward(const double *, const double *, const double *out_grad, double *in_grad, double *,
                  int batch) const override {
        if (in_grad) {
            std::memcpy(in_grad, out_grad, sizeof(double) * in_size() * batch);
        }
    }
};

class Dense final : public Layer {
   public:
    Dense(int units, const std::vector<int> &in) : n_(static_cast<int>(shape_size(in))), m_(units) {
        set_shapes(in, {units});
    }

    std::size_t param_count() const override { return static_cast<std::size_t>(n_) * m_ + m_; }
    std::size_t bias_count() const override { return m_; }
    std::size_t fan_in() const override { return n_; }

    void forward(const double *p, const double *in, double *out, int batch) const override {
        ConstMapMat x(in, batch, n_);
        ConstMapMat w(p, n_, m_);
        ConstMapRow bias(p + static_cast<std::size_t>(n_) * m_, m_);
        MapMat y(out, batch, m_);
        y.noalias() = x * w;
        y.rowwise() += bias;
    }

    void backward(const double *p, const double *in, const double *out_grad, double *in_grad, double *g,
                  int batch) const override {
        ConstMapMat x(in, batch, n_);
        ConstMapMat w(p, n_, m_);
        ConstMapMat dy(out_grad, batch, m_);
        MapMat dw(g, n_, m_);
        MapRow db(g + static_cast<std::size_t>(n_) * m_, m_);
        dw.noalias() += x.transpose() * dy;
        db += dy.colwise().sum();
        if (in_grad) {
            MapMat dx(in_grad, batch, n_);
            dx.noalias() = dy * w.transpose();
        }
    }

   private:
    int n_;
    int m_;
};

class LocallyConnected2D final : public Layer {
   public:
    LocallyConnected2D(int kh, int kw, int filters, const std::vector<int> &in)
        : kh_(kh), kw_(kw), f_(filters), c_(in[2]) {
        set_shapes(in, {in[0] - kh + 1, in[1] - kw + 1, filters});
        k_ = kh_ * kw_ * c_;
        locations_ = output_shape()[0] * output_shape()[1];
    }

    std::size_t param_count() const override { return weight_count() + bias_count(); }
    std::size_t bias_count() const override { return static_cast<std::size_t>(locations_) * f_; }
    std::size_t fan_in() const override { return k_; }

    void forward(const double *p, const double *in, double *out, int batch) const override {
        RowMat patch(batch, k_);
        RowMat y(batch, f_);
        const int ow = output_shape()[1];
        for (int loc = 0; loc < locations_; ++loc) {
            gather(in, loc / ow, loc % ow, batch, patch);
            ConstMapMat w(p + static_cast<std::size_t>(loc) * k_ * f_, k_, f_);
            ConstMapRow bias(p + weight_count() + static_cast<std::size_t>(loc) * f_, f_);
            y.noalias() = patch * w;
            y.rowwise() += bias;
            for (int b = 0; b < batch; ++b) {
                std::memcpy(out + out_size() * b + static_cast<std::size_t>(loc) * f_, y.row(b).data(),
                            sizeof(double) * f_);
            }
        }
    }

    void backward(const double *p, const double *in, const double *out_grad, double *in_grad, double *g,
                  int batch) const override {
        RowMat patch(batch, k_);
        RowMat dy(batch, f_);
        RowMat dpatch(batch, k_);
        const int ow = output_shape()[1];
        if (in_grad) {
            std::fill(in_grad, in_grad + in_size() * batch, 0.0);
        }
        for (int loc = 0; loc < locations_; ++loc) {
            const int i = loc / ow;
            const int j = loc % ow;
            gather(in, i, j, batch, patch);
            for (int b = 0; b < batch; ++b) {
                std::memcpy(dy.row(b).data(), out_grad + out_size() * b + static_cast<std::size_t>(loc) * f_,
                            sizeof(double) * f_);
            }
            MapMat dw(g + static_cast<std::size_t>(loc) * k_ * f_, k_, f_);
            MapRow db(g + weight_count() + static_cast<std::size_t>(loc) * f_, f_);
            dw.noalias() += patch.transpose() * dy;
            db += dy.colwise().sum();
            if (!in_grad) {
                continue;
            }
            ConstMapMat w(p + static_cast<std::size_t>(loc) * k_ * f_, k_, f_);
            dpatch.noalias() = dy * w.transpose();
            const int width = input_shape()[1];
            for (int b = 0; b < batch; ++b) {
                double *dst = in_grad + in_size() * b;
                const double *src = dpatch.row(b).data();
                for (int di = 0; di < kh_; ++di) {
                    for (int dj = 0; dj < kw_; ++dj) {
                        double *cell = dst + ((i + di) * width + (j + dj)) * c_;
                        const double *from = src + (di * kw_ + dj) * c_;
                        for (int ch = 0; ch < c_; ++ch) {
                            cell[ch] += from[ch];
                        }
                    }
                }
            }
        }
    }

   private:
    std::size_t weight_count() const { return static_cast<std::size_t>(locations_) * k_ * f_; }

    void gather(const double *in, int i, int j, int batch, RowMat &patch) const {
        const int width = input_shape()[1];
        for (int b = 0; b < batch; ++b) {
            const double *src = in + in_size() * b;
            double *dst = patch.row(b).data();
            for (int di = 0; di < kh_; ++di) {
                std::memcpy(dst + di * kw_ * c_, src + ((i + di) * width + j) * c_, sizeof(double) * kw_ * c_);
            }
        }
    }

    int kh_, kw_, f_, c_;
    int k_ = 0;
    int locations_ = 0;
};

class Conv3D final : public Layer {
   public:
    Conv3D(int kd, int kh, int kw, int filters, const std::vector<int> &in)
        : k_{kd, kh, kw}, f_(filters), c_(in[3]) {
        set_shapes(in, {in[0], in[1], in[2], filters});
        kvol_ = kd * kh * kw * c_;
        positions_ = in[0] * in[1] * in[2];
        // Bounded im2col buffer: at most ~2048 rows per chunk.
        chunk_ = std::max(1, 2048 / positions_);
    }

    std::size_t param_count() const override { return weight_count() + f_; }
    std::size_t bias_count() const override { return f_; }
    std::size_t fan_in() const override { return kvol_; }

    void forward(const double *p, const double *in, double *out, int batch) const override {
        ConstMapMat w(p, kvol_, f_);
        ConstMapRow bias(p + weight_count(), f_);
        for (int b0 = 0; b0 < batch; b0 += chunk_) {
            const int nb = std::min(chunk_, batch - b0);
            const MapMat cols = im2col(in + in_size() * b0, nb);
            MapMat y(out + out_size() * b0, static_cast<Eigen::Index>(nb) * positions_, f_);
            y.noalias() = cols * w;
            y.rowwise() += bias;
        }
    }

    void backward(const double *p, const double *in, const double *out_grad, double *in_grad, double *g,
                  int batch) const override {
        ConstMapMat w(p, kvol_, f_);
        MapMat dw(g, kvol_, f_);
        MapRow db(g + weight_count(), f_);
        for (int b0 = 0; b0 < batch; b0 += chunk_) {
            const int nb = std::min(chunk_, batch - b0);
            const MapMat cols = im2col(in + in_size() * b0, nb);
            ConstMapMat dy(out_grad + out_size() * b0, static_cast<Eigen::Index>(nb) * positions_, f_);
            dw.noalias() += cols.transpose() * dy;
            db += dy.colwise().sum();
            if (in_grad) {
                MapMat dcols(scratch(1, cols.size()), cols.rows(), cols.cols());
                dcols.noalias() = dy * w.transpose();
                col2im(dcols, nb, in_grad + in_size() * b0);
            }
        }
    }

   private:
    std::size_t weight_count() const { return static_cast<std::size_t>(kvol_) * f_; }

    template <typename Visit>
    void for_each_tap(Visit &&visit) const {
        const int d = input_shape()[0], h = input_shape()[1], wd = input_shape()[2];
        const int pd = (k_[0] - 1) / 2, ph = (k_[1] - 1) / 2, pw = (k_[2] - 1) / 2;
        int row = 0;
        for (int z = 0; z < d; ++z) {
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < wd; ++x, ++row) {
                    int tap = 0;
                    for (int a = 0; a < k_[0]; ++a) {
                        const int iz = z + a - pd;
                        for (int b = 0; b < k_[1]; ++b) {
                            const int iy = y + b - ph;
                            for (int c = 0; c < k_[2]; ++c, ++tap) {
                                const int ix = x + c - pw;
                                if (iz < 0 || iz >= d || iy < 0 || iy >= h || ix < 0 || ix >= wd) {
                                    visit(row, tap, -1);
                                } else {
                                    visit(row, tap, ((iz * h + iy) * wd + ix) * c_);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    MapMat im2col(const double *in, int nb) const {
        const Eigen::Index rows = static_cast<Eigen::Index>(nb) * positions_;
        MapMat cols(scratch(0, static_cast<std::size_t>(rows) * kvol_), rows, kvol_);
        for (int s = 0; s < nb; ++s) {
            const double *src = in + in_size() * s;
            const Eigen::Index base = static_cast<Eigen::Index>(s) * positions_;
            for_each_tap([&](int row, int tap, int offset) {
                double *dst = cols.row(base + row).data() + tap * c_;
                if (offset < 0) {
                    std::fill(dst, dst + c_, 0.0);
                } else {
                    std::memcpy(dst, src + offset, sizeof(double) * c_);
                }
            });
        }
        return cols;
    }

    void col2im(const MapMat &dcols, int nb, double *in_grad) const {
        std::fill(in_grad, in_grad + in_size() * nb, 0.0);
        for (int s = 0; s < nb; ++s) {
            double *dst = in_grad + in_size() * s;
            const Eigen::Index base = static_cast<Eigen::Index>(s) * positions_;
            for_each_tap([&](int row, int tap, int offset) {
                if (offset < 0) {
                    return;
                }
                const double *src = dcols.row(base + row).data() + tap * c_;
                for (int ch = 0; ch < c_; ++ch) {
                    dst[offset + ch] += src[ch];
                }
            });
        }
    }

    int k_[3];
    int f_, c_;
    int kvol_ = 0;
    int positions_ = 0;
    int chunk_ = 1;
};

[[noreturn]] void bad_layer(int index, const LayerSpec &spec, const std::vector<int> &input, const std::string &why) {
    throw SpecError("layer " + std::to_string(index) + " (" + layer_kind_name(spec.kind) + ") cannot take input " +
                    shape_string(input) + ": " + why);
}

}  // namespace

void Layer::set_shapes(std::vector<int> in, std::vector<int> out) {
    in_size_ = shape_size(in);
    out_size_ = shape_size(out);
    in_shape_ = std::move(in);
    out_shape_ = std::move(out);
}

std::shared_ptr<const Layer> make_layer(const LayerSpec &spec, const std::vector<int> &input, int index) {
    for (int d : input) {
        if (d < 1) {
            bad_layer(index, spec, input, "non-positive dimension");
        }
    }
    switch (spec.kind) {
        case LayerKind::ZeroPad2D:
            if (input.size() != 3) {
                bad_layer(index, spec, input, "expects (H, W, C)");
            }
            if (spec.padding < 0) {
                bad_layer(index, spec, input, "negative padding");
            }
            return std::make_shared<ZeroPad2D>(spec.padding, input);
        case LayerKind::LocallyConnected2D:
            if (input.size() != 3) {
                bad_layer(index, spec, input, "expects (H, W, C)");
            }
            if (spec.kernel.size() != 2 || spec.filters < 1) {
                bad_layer(index, spec, input, "needs a 2D kernel and at least one filter");
            }
            if (spec.kernel[0] < 1 || spec.kernel[1] < 1 || spec.kernel[0] > input[0] || spec.kernel[1] > input[1]) {
                bad_layer(index, spec, input, "kernel does not fit");
            }
            return std::make_shared<LocallyConnected2D>(spec.kernel[0], spec.kernel[1], spec.filters, input);
        case LayerKind::Conv3D:
            if (input.size() != 4) {
                bad_layer(index, spec, input, "expects (D, H, W, C)");
            }
            if (spec.kernel.size() != 3 || spec.filters < 1 || spec.kernel[0] < 1 || spec.kernel[1] < 1 ||
                spec.kernel[2] < 1) {
                bad_layer(index, spec, input, "needs a positive 3D kernel and at least one filter");
            }
            return std::make_shared<Conv3D>(spec.kernel[0], spec.kernel[1], spec.kernel[2], spec.filters, input);
        case LayerKind::Flatten:
            return std::make_shared<Flatten>(input);
        case LayerKind::Dense:
            if (input.size() != 1) {
                bad_layer(index, spec, input, "expects a flat input; add a Flatten layer");
            }
            if (spec.units < 1) {
                bad_layer(index, spec, input, "needs at least one unit");
            }
            return std::make_shared<Dense>(spec.units, input);
    }
    bad_layer(index, spec, input, "unknown layer kind");
}

}  // namespace qfe
