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

#include "cli.h"

#include <filesystem>
#include <sstream>

#include "gtest/gtest.h"

#include "qfe/dataset.h"
#include "qfe/error.h"
#include "qfe/noise.h"
#include "qfe/pipeline.h"

using namespace qfe;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun qfe_run(std::vector<std::string> args) {
    args.insert(args.begin(), "qfe");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("qfe_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

std::string slurp(const std::string &p) { return read_text_file(p); }

}  // namespace

TEST_F(Cli, generate_is_deterministic) {
    const std::vector<std::string> base{"generate", "--grid", "3x3", "--depth", "12", "--family", "clifford-reducible",
                                        "--count", "100", "--seed", "7"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", path("a.jsonl")});
    b.insert(b.end(), {"--out", path("b.jsonl"), "--workers", "3"});
    ASSERT_EQ(qfe_run(a).code, 0);
    ASSERT_EQ(qfe_run(b).code, 0);
    EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
    const Dataset d = read_dataset(path("a.jsonl"));
    EXPECT_EQ(d.records.size(), 100u);
    EXPECT_EQ(d.manifest["shape"], nlohmann::json({12, 3, 3, 15}));
}

TEST_F(Cli, relabel_gives_identical_labels) {
    ASSERT_EQ(qfe_run({"generate", "--grid", "2x3", "--depth", "4", "--family", "random", "--palette", "full", "--count",
                       "12", "--seed", "3", "--out", path("c.jsonl")})
                  .code,
              0);
    ASSERT_EQ(qfe_run({"label", "--noise", "sim", "--in", path("c.jsonl"), "--out", path("d1.jsonl")}).code, 0);
    ASSERT_EQ(qfe_run({"label", "--noise", "sim", "--in", path("c.jsonl"), "--out", path("d2.jsonl"), "--workers", "2"})
                  .code,
              0);
    EXPECT_EQ(slurp(path("d1.jsonl")), slurp(path("d2.jsonl")));
    const Dataset d = read_dataset(path("d1.jsonl"));
    EXPECT_EQ(d.manifest["label_kind"], "exact-density");
    for (const Record &r : d.records) {
        ASSERT_TRUE(r.label.has_value());
    }
}

TEST_F(Cli, product_labels_and_gate_count_pipeline) {
    ASSERT_EQ(qfe_run({"generate", "--count", "300", "--seed", "5", "--out", path("c.jsonl")}).code, 0);
    const CliRun lab = qfe_run({"label", "--noise", "model1", "--in", path("c.jsonl"), "--out", path("d.jsonl")});
    ASSERT_EQ(lab.code, 0) << lab.err;
    const Dataset d = read_dataset(path("d.jsonl"));
    for (const Record &r : d.records) {
        ASSERT_EQ(*r.label, product_fidelity(r.circuit, StochasticModel::uniform()));
    }
    ASSERT_EQ(qfe_run({"train", "--data", path("d.jsonl"), "--model", "gate-count", "--out", path("gc.json")}).code, 0);
    ASSERT_EQ(qfe_run({"predict", "--model", path("gc.json"), "--in", path("d.jsonl"), "--out", path("p.jsonl")}).code, 0);
    const CliRun ev = qfe_run({"evaluate", "--pred", path("p.jsonl"), "--out-dir", path("ev")});
    ASSERT_EQ(ev.code, 0) << ev.err;
    const auto summary = nlohmann::json::parse(slurp(path("ev/evaluation.json")));
    // Circuits with equal gate counts share a label; the refit predictions
    // break those ties at rounding level, so tau stays just below 1.
    EXPECT_GT(summary["tau"].get<double>(), 0.95);
    EXPECT_LT(summary["mse"].get<double>(), 1e-15);
    EXPECT_EQ(slurp(path("ev/scores.csv")).rfind("# config_digest ", 0), 0u);
}

TEST_F(Cli, evaluate_predictions_equal_to_labels) {
    ASSERT_EQ(qfe_run({"generate", "--count", "50", "--seed", "9", "--out", path("c.jsonl")}).code, 0);
    ASSERT_EQ(qfe_run({"label", "--noise", "model4", "--in", path("c.jsonl"), "--out", path("d.jsonl")}).code, 0);
    const Dataset d = read_dataset(path("d.jsonl"));
    Predictions p;
    p.manifest = {{"format", kPredictionFormat}, {"count", d.records.size()}};
    for (const Record &r : d.records) {
        p.index.push_back(r.index);
        p.predicted.push_back(*r.label);
        p.label.push_back(std::nullopt);
    }
    write_predictions(p, path("p.jsonl"));
    const CliRun ev = qfe_run({"evaluate", "--pred", path("p.jsonl"), "--labels", path("d.jsonl"), "--out-dir", path("ev")});
    ASSERT_EQ(ev.code, 0) << ev.err;
    EXPECT_NE(ev.out.find("tau 1\n"), std::string::npos) << ev.out;
    const CliRun no_labels = qfe_run({"evaluate", "--pred", path("p.jsonl"), "--out-dir", path("ev2")});
    EXPECT_EQ(no_labels.code, 1);
    EXPECT_NE(no_labels.err.find("carries no label"), std::string::npos);
}

TEST_F(Cli, network_train_predict_roundtrip) {
    ASSERT_EQ(qfe_run({"generate", "--count", "64", "--seed", "1", "--out", path("c.jsonl")}).code, 0);
    ASSERT_EQ(qfe_run({"label", "--noise", "model2", "--in", path("c.jsonl"), "--out", path("d.jsonl")}).code, 0);
    const CliRun t = qfe_run({"train", "--data", path("d.jsonl"), "--preset", "lc2d-3x3", "--epochs", "3", "--seed", "4",
                           "--out", path("m.ckpt")});
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_NE(t.out.find("27857 parameters"), std::string::npos);
    ASSERT_EQ(qfe_run({"train", "--data", path("d.jsonl"), "--preset", "lc2d-3x3", "--epochs", "3", "--seed", "4",
                       "--out", path("m2.ckpt")})
                  .code,
              0);
    EXPECT_EQ(slurp(path("m.ckpt")), slurp(path("m2.ckpt")));
    ASSERT_EQ(qfe_run({"predict", "--model", path("m.ckpt"), "--in", path("d.jsonl"), "--out", path("p.jsonl")}).code, 0);
    const Predictions p = read_predictions(path("p.jsonl"));
    EXPECT_EQ(p.predicted.size(), 64u);
    const Predictor model = Predictor::load(path("m.ckpt"));
    EXPECT_EQ(model.predict(read_dataset(path("d.jsonl"))), p.predicted);
}

TEST_F(Cli, errors_are_reported) {
    EXPECT_EQ(qfe_run({}).code, 2);
    const CliRun unknown = qfe_run({"generate", "--out", path("x"), "--bogus"});
    EXPECT_EQ(unknown.code, 2);
    EXPECT_NE(unknown.err.find("--bogus"), std::string::npos);
    EXPECT_EQ(qfe_run({"label", "--in", path("missing.jsonl"), "--out", path("y")}).code, 2);
    EXPECT_EQ(qfe_run({"generate", "--grid", "3by3", "--out", path("x")}).code, 2);

    write_text_file(path("bad.json"), R"({"seed": 1, "modle": {}})");
    const CliRun bad = qfe_run({"--config", path("bad.json"), "generate", "--out", path("x")});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("unknown key 'modle'"), std::string::npos) << bad.err;

    write_text_file(path("junk.jsonl"), "{\"format\":\"qfe-ds/1\",\"count\":1}\nnot json\n");
    const CliRun junk = qfe_run({"label", "--noise", "sim", "--in", path("junk.jsonl"), "--out", path("y")});
    EXPECT_EQ(junk.code, 1);
    EXPECT_NE(junk.err.find("line 2"), std::string::npos) << junk.err;

    ASSERT_EQ(qfe_run({"generate", "--grid", "4x4", "--count", "2", "--out", path("big.jsonl")}).code, 0);
    const CliRun cap = qfe_run({"label", "--noise", "sim", "--method", "exact-density", "--in", path("big.jsonl"), "--out",
                             path("y")});
    EXPECT_EQ(cap.code, 2);
    EXPECT_NE(cap.err.find("limited to"), std::string::npos) << cap.err;
}

TEST_F(Cli, config_file_and_flag_precedence) {
    write_text_file(path("cfg.json"), R"({"seed": 11, "count": 5, "generator": {"rows": 2, "cols": 2}})");
    ASSERT_EQ(qfe_run({"--config", path("cfg.json"), "generate", "--out", path("a.jsonl")}).code, 0);
    ASSERT_EQ(qfe_run({"--config", path("cfg.json"), "generate", "--count", "7", "--out", path("b.jsonl")}).code, 0);
    const Dataset a = read_dataset(path("a.jsonl"));
    const Dataset b = read_dataset(path("b.jsonl"));
    EXPECT_EQ(a.records.size(), 5u);
    EXPECT_EQ(b.records.size(), 7u);
    EXPECT_EQ(a.manifest["grid"], nlohmann::json({2, 2}));
    EXPECT_EQ(a.manifest["master_seed"], 11);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(a.records[i], b.records[i]);
    }
}

TEST_F(Cli, small_report_is_byte_identical) {
    write_text_file(path("report.json"), R"({
      "seed": 3,
      "evaluation": {"threshold_steps": 8, "bins": 4},
      "report": {
        "model": {"preset": "cnn3d", "sgd": {"epochs": 2, "batch_size": 8}},
        "sets": [
          {"name": "train", "count": 24, "label_kind": "tiled-product",
           "generator": {"rows": 2, "cols": 2, "depth": 2, "family": "clifford-reducible", "tiling_bands": [1]}},
          {"name": "a", "count": 10, "label_kind": "tiled-product",
           "generator": {"rows": 2, "cols": 2, "depth": 2, "family": "clifford-reducible", "tiling_bands": [1]}},
          {"name": "c", "count": 10, "label_kind": "exact-density",
           "generator": {"rows": 2, "cols": 2, "depth": 2, "family": "random", "palette": "full"}}
        ]
      }
    })");
    for (const char *out : {"r1", "r2"}) {
        const CliRun r = qfe_run({"--config", path("report.json"), "report", "--out-dir", path(out)});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    std::size_t files = 0;
    for (const auto &entry : fs::directory_iterator(path("r1"))) {
        const std::string name = entry.path().filename().string();
        EXPECT_EQ(slurp(entry.path().string()), slurp(path("r2/" + name))) << name;
        ++files;
    }
    // 3 datasets, 2 models, report.json, summary.txt, and per (set, model):
    // predictions plus three evaluation files.
    EXPECT_EQ(files, 3u + 2u + 2u + 2u * 2u * 4u);
    const auto summary = nlohmann::json::parse(slurp(path("r1/report.json")));
    EXPECT_EQ(summary["results"].size(), 4u);
    EXPECT_EQ(summary["network"]["train_loss"].size(), 2u);
}
