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


#include <vector>

#include <benchmark/benchmark.h>

#include "qfe/encoding.h"
#include "qfe/evaluation.h"
#include "qfe/lattice.h"
#include "qfe/network.h"
#include "qfe/noise.h"
#include "qfe/rng.h"
#include "qfe/simulator.h"
#include "qfe/train.h"

namespace {

using namespace qfe;

void BM_ExactFidelitySingleMoment(benchmark::State &state) {
    const auto c = random_circuit(3, 3, 1, Palette::single_moment(), 0.3, 1);
    const SimNoiseModel model;
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_fidelity(c, model));
    }
}
BENCHMARK(BM_ExactFidelitySingleMoment)->Unit(benchmark::kMillisecond);

void BM_ExactFidelity(benchmark::State &state) {
    const int depth = static_cast<int>(state.range(0));
    const auto c = random_circuit(3, 3, depth, Palette::full(), 0.3, 2);
    const SimNoiseModel model;
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_fidelity(c, model));
    }
}
BENCHMARK(BM_ExactFidelity)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_TiledFidelity(benchmark::State &state) {
    const auto tilings = band_tilings(3, 3, {1, 2});
    const auto c = tiled_circuit(3, 3, tilings.front(), 12, Palette::full(), 0.3, 3);
    const SimNoiseModel model;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tiled_fidelity(c, tilings.front(), model).value);
    }
}
BENCHMARK(BM_TiledFidelity)->Unit(benchmark::kMillisecond);

void BM_Trajectories(benchmark::State &state) {
    const auto c = random_circuit(3, 3, 12, Palette::full(), 0.3, 4);
    const NoisyProgram p = compile_noisy_program(c, SimNoiseModel{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_trajectories(p, static_cast<int>(state.range(0)), 5).value);
    }
}
BENCHMARK(BM_Trajectories)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_EncodeOneHot(benchmark::State &state) {
    const auto c = random_circuit(5, 5, 12, Palette::full(), 0.3, 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode_one_hot(c, Palette::full()).data.data());
    }
}
BENCHMARK(BM_EncodeOneHot);

TrainingData random_batch(const std::vector<int> &shape, int count) {
    Rng rng(7);
    TrainingData d;
    d.sample_size = shape_size(shape);
    d.inputs.assign(d.sample_size * count, 0.0);
    const int channels = shape.back();
    for (std::size_t cell = 0; cell < d.inputs.size() / channels; ++cell) {
        d.inputs[cell * channels + rng.below(channels)] = 1.0;
    }
    for (int i = 0; i < count; ++i) {
        d.targets.push_back(rng.uniform());
    }
    return d;
}

void BM_LossAndGradient(benchmark::State &state, NetworkSpec spec) {
    Network net(spec);
    net.initialize(1);
    const auto batch = random_batch(spec.input_shape, 32);
    AlignedVector grad(net.param_count());
    Workspace ws;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            net.loss_and_gradient(net.params(), batch.inputs.data(), batch.targets.data(), 32, grad, ws));
    }
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK_CAPTURE(BM_LossAndGradient, lc2d, preset_lc2d())->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LossAndGradient, cnn3d_3x3, preset_cnn3d({12, 3, 3, 15}))->Unit(benchmark::kMillisecond);

void BM_KendallTau(benchmark::State &state) {
    Rng rng(8);
    std::vector<double> x(state.range(0)), y(state.range(0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform();
        y[i] = x[i] + 0.1 * rng.uniform();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(kendall_tau(x, y));
    }
}
BENCHMARK(BM_KendallTau)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
