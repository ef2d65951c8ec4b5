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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
//   qfe_acceptance [--out DIR] [--config FILE] [N ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qfe/dataset.h"
#include "qfe/encoding.h"
#include "qfe/error.h"
#include "qfe/evaluation.h"
#include "qfe/gate_count.h"
#include "qfe/lattice.h"
#include "qfe/network.h"
#include "qfe/noise.h"
#include "qfe/pipeline.h"
#include "qfe/rng.h"
#include "qfe/simulator.h"
#include "qfe/train.h"

namespace fs = std::filesystem;
using namespace qfe;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
        }
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += what + (ok ? "" : " [miss]");
    }
};

std::string num(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

struct Context {
    fs::path out;
    std::string report_config;
    std::optional<double> report_seconds;
};

void log_line(const std::string &s) { std::fprintf(stderr, "  %s\n", s.c_str()); }

// ---------------------------------------------------------------------------

Outcome architecture_parity(Context &) {
    Outcome o;
    const Network lc(preset_lc2d());
    const std::vector<std::size_t> lc_rows = {0, 13568, 4352, 4352, 272, 0, 1088, 4160, 65};
    o.require(lc.param_count() == 27857, "lc2d-3x3 " + std::to_string(lc.param_count()) + " parameters");
    o.require(lc.layer_param_counts() == lc_rows, "lc2d rows");
    o.require(lc.layer_output_shapes().front() == std::vector<int>({5, 5, 13}), "lc2d padding shape");

    const Network cnn(preset_cnn3d());
    const std::vector<std::size_t> cnn_rows = {48050, 160050, 160050, 0,     7500500, 250500,
                                               250500, 250500, 25050, 51, 2};
    o.require(cnn.param_count() == 8645253, "cnn3d " + std::to_string(cnn.param_count()) + " parameters");
    o.require(cnn.layer_param_counts() == cnn_rows, "cnn3d rows");
    o.require(cnn.layer_output_shapes()[3] == std::vector<int>({15000}), "cnn3d flatten width");
    return o;
}

TrainingData one_hot_batch(const std::vector<int> &shape, int count, std::uint64_t seed) {
    Rng rng(seed);
    TrainingData d;
    d.sample_size = shape_size(shape);
    const int channels = shape.back();
    d.inputs.assign(d.sample_size * count, 0.0);
    for (std::size_t cell = 0; cell < d.inputs.size() / channels; ++cell) {
        d.inputs[cell * channels + rng.below(channels)] = 1.0;
    }
    for (int i = 0; i < count; ++i) {
        d.targets.push_back(rng.uniform());
    }
    return d;
}

// Moves every parameter off zero so no ReLU sits on its kink.
void perturb(Network &net, std::uint64_t seed) {
    net.initialize(seed);
    Rng rng(seed + 1000);
    for (double &p : net.params()) {
        p += rng.uniform(-0.1, 0.1);
    }
}

Outcome gradient_correctness(Context &) {
    Outcome o;
    struct Case {
        std::string name;
        NetworkSpec spec;
        int batch;
    };
    const std::vector<Case> cases = {
        {"lc2d-3x3", preset_lc2d(), 3},
        {"cnn3d reduced", preset_cnn3d({4, 3, 3, 15}, 4, 16, 2, 8), 2},
        {"dense", {{6}, {LayerSpec::dense(8), LayerSpec::dense(5), LayerSpec::dense(1, Activation::Linear)}}, 4},
        {"conv3d stack",
         {{2, 3, 3, 2},
          {LayerSpec::conv3d(2, 3, 2, 3), LayerSpec::conv3d(4, 4, 4, 2), LayerSpec::flatten(),
           LayerSpec::dense(6), LayerSpec::dense(1, Activation::Linear)}},
         3},
        {"padded lc2d stack",
         {{3, 4, 3},
          {LayerSpec::locally_connected_2d(2, 3, 4), LayerSpec::zero_pad_2d(2),
           LayerSpec::locally_connected_2d(3, 2, 2), LayerSpec::flatten(), LayerSpec::dense(1, Activation::Linear)}},
         3},
    };
    std::uint64_t seed = 1;
    for (const Case &c : cases) {
        Network net(c.spec);
        perturb(net, seed);
        const auto batch = one_hot_batch(c.spec.input_shape, c.batch, seed + 1);
        const auto r = gradient_check(net, batch, 1e-5, 260, seed + 2);
        seed += 3;
        o.require(r.max_relative_error < 1e-4 && r.coordinates >= std::min<std::size_t>(150, net.param_count()),
                  c.name + " " + num(r.max_relative_error, 3) + " over " + std::to_string(r.coordinates));
    }
    return o;
}

Outcome channel_inference(Context &) {
    Outcome o;
    const auto c = random_circuit(3, 3, 12, Palette::full(), 0.3, 2026);
    const CircuitTensor t = encode_one_hot(c, Palette::full());
    o.require(t.channels == 15, std::to_string(t.channels) + " channels");
    const Network net(preset_by_name("cnn3d", {t.depth, t.rows, t.cols, t.channels}));
    const std::size_t first = net.layer_param_counts().front();
    o.require(first == 4 * 4 * 4 * 15 * 50 + 50, "first conv " + std::to_string(first));
    o.require(first == 48050, "matches 48,050");
    return o;
}

Outcome noise_oracles(Context &) {
    Outcome o;
    DensityMatrix rho(1);
    const int q[] = {0};
    rho.apply_channel(depolarizing_kraus(1, 0.01), q);
    const double d00 = rho(0, 0).real(), d11 = rho(1, 1).real();
    o.require(std::abs(d00 - 0.995) <= 1e-12 && std::abs(d11 - 0.005) <= 1e-12 && std::abs(rho(0, 1)) <= 1e-12,
              "(a) diag(" + num(d00, 15) + ", " + num(d11, 15) + ")");

    const SimNoiseModel defaults;
    const double phase = std::arg(crosstalk_unitary(defaults.zeta, defaults.t_time)(3, 3));
    o.require(std::abs(phase - -0.009424778) <= 1e-9, "(b) phase " + num(phase, 10));

    SimNoiseModel quiet;
    quiet.eps1 = quiet.eps2 = 0.0;
    quiet.zeta = 0.0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto c = random_circuit(2, 3, 12, Palette::full(), 0.3, 4000 + seed);
        const double f = fidelity_pure(simulate_ideal(c), simulate_density(compile_noisy_program(c, quiet)));
        worst = std::max(worst, std::abs(f - 1.0));
    }
    o.require(worst <= 1e-10, "(c) worst |F - 1| " + num(worst, 3));
    return o;
}

Outcome tiled_factorization(Context &) {
    Outcome o;
    const Tiling halves{{Rect{0, 0, 2, 2}, Rect{0, 2, 2, 2}}};
    const SimNoiseModel model;
    double worst = 0.0;
    double lowest = 1.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto c = tiled_circuit(2, 4, halves, 12, Palette::full(), 0.3, 5000 + seed);
        const double full = exact_fidelity(c, model);
        worst = std::max(worst, std::abs(tiled_fidelity(c, halves, model).value - full));
        lowest = std::min(lowest, full);
    }
    o.require(worst <= 1e-8, "worst difference " + num(worst, 3));
    o.detail += "; lowest fidelity " + num(lowest, 4);
    return o;
}

Outcome clifford_soundness(Context &) {
    Outcome o;
    double worst = 0.0;
    int t_gates = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto c = clifford_reducible_circuit(3, 3, 12, GeneratorConfig{}.pair_rate, 6000 + seed);
        const auto r = reduce_to_clifford(c);
        for (int m = 0; m < c.depth(); ++m) {
            for (int k = 0; k < c.num_qubits(); ++k) {
                t_gates += !is_clifford(c.at(m, c.site(k)).kind);
                if (!is_clifford(r.at(m, r.site(k)).kind)) {
                    throw Error("reduction left a non-Clifford gate");
                }
            }
        }
        const auto a = simulate_ideal(c);
        const auto b = simulate_ideal(r);
        Complex acc = 0.0;
        for (std::size_t i = 0; i < a.amplitudes().size(); ++i) {
            acc += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
        }
        worst = std::max(worst, std::abs(std::norm(acc) - 1.0));
    }
    o.require(worst <= 1e-10, "worst |F - 1| " + num(worst, 3));
    o.require(t_gates > 0, std::to_string(t_gates) + " T/T-dagger gates reduced");
    return o;
}

Outcome trajectory_unbiasedness(Context &) {
    Outcome o;
    SimNoiseModel strong;
    strong.eps1 = 0.01;
    strong.eps2 = 0.05;
    strong.zeta = 2e6;
    int within = 0;
    double worst_z = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = random_circuit(1, 3, 12, Palette::full(), 0.4, 7000 + trial);
        const NoisyProgram p = compile_noisy_program(c, strong);
        const double exact = fidelity_pure(ideal_state(p), simulate_density(p));
        const FidelityEstimate est = simulate_trajectories(p, 10000, 7100 + trial);
        const double z = std::abs(est.value - exact) / std::max(est.standard_error, 1e-300);
        worst_z = std::max(worst_z, z);
        within += std::abs(est.value - exact) <= 5.0 * est.standard_error;
    }
    o.require(within >= 19, std::to_string(within) + "/20 within 5 SE");
    o.detail += "; largest deviation " + num(worst_z, 3) + " SE";
    return o;
}

struct Fit {
    double mse = 0.0;
    double tau = 0.0;
    /// Largest tau-b any predictor without ties can reach on these labels,
    /// counting labels within 1e-12 of each other as tied.
    double tau_ceiling = 1.0;
};

double untied_tau_ceiling(std::vector<double> labels) {
    std::sort(labels.begin(), labels.end());
    const double n = static_cast<double>(labels.size());
    const double pairs = n * (n - 1) / 2;
    double tied = 0;
    for (std::size_t i = 0, j = 0; i < labels.size(); i = j) {
        while (j < labels.size() && labels[j] - labels[i] <= 1e-12) {
            ++j;
        }
        const double run = static_cast<double>(j - i);
        tied += run * (run - 1) / 2;
    }
    return std::sqrt((pairs - tied) / pairs);
}

Fit train_lc2d(const Dataset &data, std::uint64_t seed, int epochs) {
    auto [train, test] = split_dataset(data, 1500, derive_seed(seed, kStreamSplit));
    ModelConfig mc;
    mc.preset = "lc2d-3x3";
    mc.sgd.epochs = epochs;
    mc.sgd.seed = derive_seed(seed, kStreamShuffle);
    mc.init_seed = derive_seed(seed, kStreamInit);
    int seen = 0;
    const Predictor p = Predictor::train(train, mc, nullptr, [&](const std::string &s) {
        if (++seen % 100 == 0) {
            log_line(s);
        }
    });
    const auto pred = p.predict(test);
    const auto truth = labels_of(test);
    Fit f;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        f.mse += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    }
    f.mse /= static_cast<double>(pred.size());
    f.tau = kendall_tau(pred, truth);
    f.tau_ceiling = untied_tau_ceiling(truth);
    return f;
}

Outcome stochastic_learnability(Context &) {
    Outcome o;
    for (int model = 1; model <= 4; ++model) {
        DatasetConfig c;
        c.count = 2500;
        c.master_seed = 800 + model;
        c.labeler.kind = LabelKind::ProductModel;
        c.labeler.stochastic = StochasticModel::numbered(model);
        const Fit f = train_lc2d(build_dataset(c), c.master_seed, 500);
        o.require(f.mse < 1e-5 && f.tau > 0.99,
                  "model " + std::to_string(model) + " mse " + num(f.mse, 3) + " tau " + num(f.tau, 4) +
                      " (tie ceiling " + num(f.tau_ceiling, 4) + ")");
    }
    return o;
}

Outcome baseline_exactness(Context &) {
    Outcome o;
    DatasetConfig c;
    c.count = 1500;
    c.master_seed = 900;
    c.labeler.kind = LabelKind::ProductModel;
    c.labeler.stochastic = StochasticModel::numbered(1);
    const Dataset d = build_dataset(c);
    std::vector<LatticeCircuit> circuits;
    for (const Record &r : d.records) {
        circuits.push_back(r.circuit);
    }
    const auto labels = labels_of(d);
    const GateCountRegressor g = fit_gate_count_regressor(circuits, labels);
    const int sites = g.rows * g.cols;
    double coef_err = 0.0;
    for (std::size_t k = 0; k < g.coefficients.size(); ++k) {
        const double want = static_cast<int>(k) < sites ? std::log(0.99) : std::log(0.95);
        coef_err = std::max(coef_err, std::abs(g.coefficients[k] - want));
    }
    double pred_err = 0.0;
    for (std::size_t i = 0; i < circuits.size(); ++i) {
        pred_err = std::max(pred_err, std::abs(predict_gate_count(g, circuits[i]) - labels[i]));
    }
    o.require(!g.ridge, "ordinary least squares");
    o.require(coef_err <= 1e-6, std::to_string(g.coefficients.size()) + " coefficients within " + num(coef_err, 3));
    o.require(pred_err <= 1e-8, "training predictions within " + num(pred_err, 3));
    return o;
}

Outcome simulated_noise_regression(Context &) {
    Outcome o;
    DatasetConfig c;
    c.count = 2500;
    c.master_seed = 1000;
    c.labeler.kind = LabelKind::ExactDensity;
    const Dataset d = build_dataset(c);
    log_line("labeled " + std::to_string(d.records.size()) + " single-moment circuits");
    const Fit f = train_lc2d(d, c.master_seed, 500);
    o.require(f.tau >= 0.9, "tau " + num(f.tau, 4) + " (tie ceiling " + num(f.tau_ceiling, 4) + ")");
    o.detail += "; mse " + num(f.mse, 3);
    return o;
}

std::map<std::string, double> report_taus(const nlohmann::json &summary) {
    std::map<std::string, double> taus;
    for (const auto &r : summary.at("results")) {
        taus[r.at("set").get<std::string>() + "/" + r.at("model").get<std::string>()] = r.at("tau").get<double>();
    }
    return taus;
}

nlohmann::json run_report_into(Context &ctx, const std::string &name) {
    const PipelineConfig config = read_pipeline_config(ctx.report_config);
    const fs::path dir = ctx.out / name;
    fs::remove_all(dir);
    return run_report(config, dir.string(), log_line);
}

Outcome generalization_ladder(Context &ctx) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const nlohmann::json summary = run_report_into(ctx, "report_1");
    ctx.report_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto &train = summary.at("sets").at(0);
    o.require(summary.at("network").at("preset") == "cnn3d", "cnn3d");
    o.require(train.at("count") == 2000, "2000 training circuits");
    const auto taus = report_taus(summary);
    const double a = taus.at("a/network"), b = taus.at("b/network"), c = taus.at("c/network");
    const double base = taus.at("c/gate-count");
    o.require(a >= 0.7, "(a) tau " + num(a, 4));
    o.require(b >= 0.5, "(b) tau " + num(b, 4));
    o.require(c >= 0.5, "(c) tau " + num(c, 4));
    o.require(c > base, "(c) baseline tau " + num(base, 4));
    o.require(*ctx.report_seconds <= 4 * 3600.0, "report " + num(*ctx.report_seconds, 4) + " s");
    return o;
}

std::map<std::string, std::string> read_tree(const fs::path &dir) {
    std::map<std::string, std::string> files;
    for (const auto &e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            files[fs::relative(e.path(), dir).string()] = read_text_file(e.path().string());
        }
    }
    return files;
}

Outcome determinism(Context &ctx) {
    Outcome o;
    if (!fs::exists(ctx.out / "report_1" / "report.json")) {
        const auto start = std::chrono::steady_clock::now();
        run_report_into(ctx, "report_1");
        ctx.report_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    const auto start = std::chrono::steady_clock::now();
    run_report_into(ctx, "report_2");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto first = read_tree(ctx.out / "report_1");
    const auto second = read_tree(ctx.out / "report_2");
    std::size_t differing = 0;
    for (const auto &[name, bytes] : first) {
        const auto it = second.find(name);
        differing += it == second.end() || it->second != bytes;
    }
    o.require(first.size() == second.size() && differing == 0,
              std::to_string(first.size()) + " files, " + std::to_string(differing) + " differ");
    o.require(seconds <= 4 * 3600.0, "second run " + num(seconds, 4) + " s");
    return o;
}

// O(n^2) tau-b straight from the pair definition.
double tau_b_pairs(const std::vector<double> &x, const std::vector<double> &y) {
    double concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0 && dy == 0) {
                continue;
            }
            if (dx == 0) {
                ++tie_x;
            } else if (dy == 0) {
                ++tie_y;
            } else if ((dx > 0) == (dy > 0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    return (concordant - discordant) /
           std::sqrt((concordant + discordant + tie_x) * (concordant + discordant + tie_y));
}

Outcome evaluation_metrics(Context &) {
    Outcome o;
    Rng rng(12);
    double worst = 0.0;
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = 5 + rng.below(120);
        const int levels = inst % 2 == 0 ? 4 + static_cast<int>(rng.below(6)) : 1 << 30;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng.below(levels));
            y[i] = static_cast<double>(rng.below(levels));
        }
        x[0] = 0;
        x[1] = 1;
        y[0] = 0;
        y[1] = 1;
        worst = std::max(worst, std::abs(kendall_tau(x, y) - tau_b_pairs(x, y)));
    }
    o.require(worst <= 1e-12, "tau vs pair oracle " + num(worst, 3));

    const Interval w = wilson_interval(0, 10, 1.96);
    o.require(std::abs(w.lo) <= 1e-4 && std::abs(w.hi - 0.2775) <= 1e-4, "wilson (" + num(w.lo, 4) + ", " +
                                                                                 num(w.hi, 4) + ")");

    std::vector<double> truth(10000), noise(10000);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        truth[i] = rng.uniform();
        noise[i] = rng.uniform();
    }
    const auto thresholds = linear_thresholds(0.05, 0.95, 19);
    double perfect_worst = 0.0;
    int perfect_defined = 0;
    for (const ScorePoint &p : threshold_score_curve(truth, truth, thresholds)) {
        if (p.defined()) {
            ++perfect_defined;
            perfect_worst = std::max(perfect_worst, std::abs(p.score - 1.0));
        }
    }
    o.require(perfect_defined > 0 && perfect_worst == 0.0,
              "perfect predictor at " + std::to_string(perfect_defined) + " thresholds");
    double random_worst = 0.0;
    for (const ScorePoint &p : threshold_score_curve(noise, truth, thresholds)) {
        if (p.defined()) {
            random_worst = std::max(random_worst, std::abs(p.score - 0.5));
        }
    }
    o.require(random_worst <= 0.05, "random predictor within " + num(random_worst, 3) + " of 0.5");
    return o;
}

struct Criterion {
    int id;
    const char *name;
    double budget_seconds;
    std::function<Outcome(Context &)> run;
};

}  // namespace

int main(int argc, char **argv) {
    Context ctx;
    ctx.out = fs::temp_directory_path() / "qfe_acceptance";
#ifdef QFE_REPORT_CONFIG
    ctx.report_config = QFE_REPORT_CONFIG;
#endif
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--out" && i + 1 < argc) {
            ctx.out = argv[++i];
        } else if (a == "--config" && i + 1 < argc) {
            ctx.report_config = argv[++i];
        } else {
            try {
                selected.insert(std::stoi(a));
            } catch (const std::exception &) {
                std::fprintf(stderr, "usage: %s [--out DIR] [--config FILE] [criterion ...]\n", argv[0]);
                return 2;
            }
        }
    }
    fs::create_directories(ctx.out);

    const std::vector<Criterion> criteria = {
        {1, "architecture parity", 1, architecture_parity},
        {2, "gradient correctness", 300, gradient_correctness},
        {3, "channel inference", 60, channel_inference},
        {4, "noise-model oracles", 60, noise_oracles},
        {5, "tiled factorization", 600, tiled_factorization},
        {6, "Clifford-reducible soundness", 120, clifford_soundness},
        {7, "trajectory unbiasedness", 600, trajectory_unbiasedness},
        {8, "stochastic-model learnability", 1800, stochastic_learnability},
        {9, "baseline exactness", 60, baseline_exactness},
        {10, "simulated-noise regression", 3600, simulated_noise_regression},
        {11, "generalization ladder", 4 * 3600, generalization_ladder},
        {12, "evaluation metrics", 60, evaluation_metrics},
        {13, "determinism", 8 * 3600, determinism},
    };

    int failed = 0;
    for (const Criterion &c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) {
            continue;
        }
        std::fprintf(stderr, "criterion %d: %s\n", c.id, c.name);
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(ctx);
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > c.budget_seconds) {
            o.pass = false;
            o.detail += "; over the " + num(c.budget_seconds) + " s budget";
        }
        failed += !o.pass;
        std::printf("criterion %d: %s %s (%s; %.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                    seconds);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
