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
#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"

#include "ml_fixtures.h"
#include "qfe/checkpoint.h"
#include "qfe/error.h"
#include "qfe/train.h"

using namespace qfe;

TEST(network, lc2d_parameter_rows) {
    const Network net(preset_lc2d());
    const std::vector<std::size_t> rows{0, 13568, 4352, 4352, 272, 0, 1088, 4160, 65};
    EXPECT_EQ(net.layer_param_counts(), rows);
    EXPECT_EQ(net.param_count(), 27857u);
    const auto shapes = net.layer_output_shapes();
    EXPECT_EQ(shapes[0], (std::vector<int>{5, 5, 13}));
    EXPECT_EQ(shapes[1], (std::vector<int>{4, 4, 16}));
    EXPECT_EQ(shapes[4], (std::vector<int>{4, 4, 1}));
    EXPECT_EQ(shapes[5], (std::vector<int>{16}));
}

TEST(network, cnn3d_parameter_rows) {
    const Network net(preset_cnn3d({12, 5, 5, 15}));
    const std::vector<std::size_t> rows{48050, 160050, 160050, 0,     7500500, 250500,
                                        250500, 250500, 25050, 51, 2};
    EXPECT_EQ(net.layer_param_counts(), rows);
    EXPECT_EQ(net.param_count(), 8645253u);
    const auto shapes = net.layer_output_shapes();
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(shapes[i], (std::vector<int>{12, 5, 5, 50}));
    }
    EXPECT_EQ(shapes[3], (std::vector<int>{15000}));
}

TEST(network, single_dense_row) {
    NetworkSpec s{{16}, {LayerSpec::dense(64), LayerSpec::dense(1, Activation::Linear)}};
    EXPECT_EQ(Network(s).layer_param_counts()[0], 1088u);
}

TEST(network, shape_errors_name_the_layer) {
    NetworkSpec s{{3, 3, 13}, {LayerSpec::locally_connected_2d(4, 4, 8), LayerSpec::flatten(), LayerSpec::dense(1)}};
    try {
        Network n(s);
        FAIL() << "expected SpecError";
    } catch (const SpecError &e) {
        EXPECT_NE(std::string(e.what()).find("layer 0"), std::string::npos) << e.what();
    }
    EXPECT_THROW(Network(NetworkSpec{{3, 3, 13}, {LayerSpec::dense(1)}}), SpecError);
    EXPECT_THROW(Network(NetworkSpec{{4}, {LayerSpec::dense(2)}}), SpecError);
    EXPECT_THROW(preset_by_name("resnet", {3, 3, 13}), SpecError);
}

TEST(network, zero_head_outputs_zero) {
    Network net(preset_lc2d());
    net.initialize(1);
    const auto offsets = net.layer_param_offsets();
    std::fill(net.params().begin() + static_cast<std::ptrdiff_t>(offsets.back()), net.params().end(), 0.0);
    const auto data = test::random_one_hot_batch({3, 3, 13}, 10, 2);
    for (double y : net.predict(data.inputs, 10)) {
        EXPECT_EQ(y, 0.0);
    }
}

TEST(network, deterministic_forward) {
    Network net(preset_lc2d());
    net.initialize(7);
    const auto data = test::random_one_hot_batch({3, 3, 13}, 1, 3);
    Tensor t({3, 3, 13}, data.inputs);
    EXPECT_EQ(net.predict_one(t), net.predict_one(t));
    // Batched and single evaluation agree.
    const auto batch = test::random_one_hot_batch({3, 3, 13}, 5, 4);
    const auto together = net.predict(batch.inputs, 5, 5);
    for (int i = 0; i < 5; ++i) {
        Tensor one({3, 3, 13}, {batch.sample(i), batch.sample(i) + batch.sample_size});
        EXPECT_NEAR(net.predict_one(one), together[i], 1e-14);
    }
}

TEST(network, initialization_is_seeded) {
    Network a(preset_lc2d());
    Network b(preset_lc2d());
    a.initialize(5);
    b.initialize(5);
    EXPECT_TRUE(std::equal(a.params().begin(), a.params().end(), b.params().begin()));
    b.initialize(6);
    EXPECT_FALSE(std::equal(a.params().begin(), a.params().end(), b.params().begin()));
}

TEST(network, initialization_uses_per_unit_fan_in) {
    // lc2d on 3x3x13: patch sizes 52, 16, 16, 16, then dense fans 16, 64, 64.
    Network net(preset_lc2d());
    net.initialize(9);
    const auto counts = net.layer_param_counts();
    const auto offsets = net.layer_param_offsets();
    const std::vector<std::pair<std::size_t, double>> expected = {
        {1, std::sqrt(6.0 / 52)}, {2, std::sqrt(6.0 / 16)}, {3, std::sqrt(6.0 / 16)}, {4, std::sqrt(6.0 / 16)},
        {6, std::sqrt(6.0 / 16)}, {7, std::sqrt(6.0 / 64)}, {8, std::sqrt(3.0 / 64)}};
    const std::vector<std::size_t> biases = {0, 16 * 16, 16 * 16, 16 * 16, 16, 0, 64, 64, 1};
    for (const auto &[layer, limit] : expected) {
        const std::size_t weights = counts[layer] - biases[layer];
        double widest = 0.0;
        for (std::size_t k = 0; k < weights; ++k) {
            widest = std::max(widest, std::abs(net.params()[offsets[layer] + k]));
        }
        EXPECT_LE(widest, limit) << layer;
        EXPECT_GT(widest, 0.8 * limit) << layer;
        for (std::size_t k = weights; k < counts[layer]; ++k) {
            ASSERT_EQ(net.params()[offsets[layer] + k], 0.0);
        }
    }
}

TEST(network, output_scale_applies_to_predictions) {
    Network net(preset_lc2d());
    net.initialize(2);
    const auto data = test::random_one_hot_batch({3, 3, 13}, 6, 5);
    const auto raw = net.predict(data.inputs, 6);
    net.set_output_scale({0.5, 0.25});
    const auto scaled = net.predict(data.inputs, 6);
    for (int i = 0; i < 6; ++i) {
        EXPECT_EQ(scaled[i], 0.5 + 0.25 * raw[i]);
    }
    EXPECT_THROW(net.set_output_scale({0.0, 0.0}), ParameterError);
    EXPECT_THROW(net.set_output_scale({std::nan(""), 1.0}), ParameterError);
}

TEST(locally_connected, tied_weights_equal_shared_convolution) {
    // 5x5x3 input, 2x2 kernel, 4 filters. Oracle: direct valid convolution.
    const int h = 5, w = 5, c = 3, f = 4, k = 2;
    NetworkSpec s{{h, w, c},
                  {LayerSpec::locally_connected_2d(k, k, f, Activation::Linear), LayerSpec::flatten(),
                   LayerSpec::dense(1, Activation::Linear)}};
    Network net(s);
    Rng rng(9);
    std::vector<double> kernel(k * k * c * f);
    std::vector<double> bias(f);
    for (double &v : kernel) {
        v = rng.uniform(-1, 1);
    }
    for (double &v : bias) {
        v = rng.uniform(-1, 1);
    }
    const int oh = h - k + 1, ow = w - k + 1;
    auto p = net.params();
    for (int loc = 0; loc < oh * ow; ++loc) {
        std::copy(kernel.begin(), kernel.end(), p.begin() + loc * k * k * c * f);
        std::copy(bias.begin(), bias.end(), p.begin() + oh * ow * k * k * c * f + loc * f);
    }
    std::vector<double> input(h * w * c);
    for (double &v : input) {
        v = rng.uniform(-1, 1);
    }
    Workspace ws;
    net.forward(net.params(), input.data(), 1, ws);
    const auto &lc = ws.activations[0];
    for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j) {
            for (int o = 0; o < f; ++o) {
                double acc = bias[o];
                for (int di = 0; di < k; ++di) {
                    for (int dj = 0; dj < k; ++dj) {
                        for (int ch = 0; ch < c; ++ch) {
                            acc += input[((i + di) * w + (j + dj)) * c + ch] * kernel[((di * k + dj) * c + ch) * f + o];
                        }
                    }
                }
                EXPECT_NEAR(lc[(i * ow + j) * f + o], acc, 1e-10);
            }
        }
    }
}

TEST(conv3d, same_padding_matches_direct_sum) {
    // Oracle: explicit zero-padded 3D correlation with pad (k-1)/2 before.
    const int d = 3, h = 2, w = 3, c = 2, f = 3;
    NetworkSpec s{{d, h, w, c},
                  {LayerSpec::conv3d(4, 4, 4, f, Activation::Linear), LayerSpec::flatten(),
                   LayerSpec::dense(1, Activation::Linear)}};
    Network net(s);
    test::jitter(net, 3, 0.5);
    Rng rng(4);
    std::vector<double> input(d * h * w * c);
    for (double &v : input) {
        v = rng.uniform(-1, 1);
    }
    Workspace ws;
    net.forward(net.params(), input.data(), 1, ws);
    const auto p = net.params();
    const int kv = 64 * c;
    for (int z = 0; z < d; ++z) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                for (int o = 0; o < f; ++o) {
                    double acc = p[kv * f + o];
                    for (int a = 0; a < 4; ++a) {
                        for (int b = 0; b < 4; ++b) {
                            for (int e = 0; e < 4; ++e) {
                                const int iz = z + a - 1, iy = y + b - 1, ix = x + e - 1;
                                if (iz < 0 || iz >= d || iy < 0 || iy >= h || ix < 0 || ix >= w) {
                                    continue;
                                }
                                for (int ch = 0; ch < c; ++ch) {
                                    acc += input[((iz * h + iy) * w + ix) * c + ch] *
                                           p[(((a * 4 + b) * 4 + e) * c + ch) * f + o];
                                }
                            }
                        }
                    }
                    EXPECT_NEAR(ws.activations[0][((z * h + y) * w + x) * f + o], acc, 1e-12);
                }
            }
        }
    }
}

TEST(network, spec_json_roundtrip) {
    const NetworkSpec s = preset_cnn3d({12, 3, 3, 15});
    EXPECT_EQ(network_spec_from_json(to_json(s)), s);
    EXPECT_THROW(network_spec_from_json(nlohmann::json::parse(R"({"input_shape":[2],"layers":[{"kind":"lstm"}]})")),
                 SpecError);
}

TEST(checkpoint, roundtrip_is_bit_exact) {
    Network net(preset_lc2d());
    test::jitter(net, 12);
    net.set_output_scale({0.8791, 0.029067});
    const std::string path = (std::filesystem::temp_directory_path() / "qfe_ckpt_test.bin").string();
    save_checkpoint(net, {{"note", "unit"}}, path);
    EXPECT_TRUE(is_network_checkpoint(path));
    const Checkpoint back = load_checkpoint(path);
    EXPECT_EQ(back.network.spec(), net.spec());
    EXPECT_EQ(back.network.output_scale(), net.output_scale());
    EXPECT_EQ(back.metadata.at("note"), "unit");
    const auto data = test::random_one_hot_batch({3, 3, 13}, 20, 1);
    const auto a = net.predict(data.inputs, 20);
    const auto b = back.network.predict(data.inputs, 20);
    for (int i = 0; i < 20; ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i]));
    }

    // Truncate the payload.
    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 8);
    EXPECT_THROW(load_checkpoint(path), FormatError);
    {
        std::ofstream junk(path, std::ios::binary | std::ios::trunc);
        junk << "not a checkpoint";
    }
    EXPECT_FALSE(is_network_checkpoint(path));
    EXPECT_THROW(load_checkpoint(path), FormatError);
    std::filesystem::remove(path);
}
