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

#include "qfe/pipeline.h"

#include "gtest/gtest.h"

#include "qfe/error.h"

using namespace qfe;
using nlohmann::json;

TEST(pipeline_config, defaults_roundtrip) {
    const PipelineConfig c;
    const json j = to_json(c);
    EXPECT_EQ(to_json(pipeline_config_from_json(j)), j);
    EXPECT_EQ(c.report.sets.size(), 4u);
    EXPECT_EQ(c.report.sets[0].count, 2000u);
    EXPECT_EQ(c.report.sets[3].label_kind, LabelKind::ExactDensity);
    EXPECT_TRUE(c.report.sets[3].generator.tilings.empty());
    EXPECT_EQ(c.report.sets[1].generator.tilings.size(), 6u);
}

TEST(pipeline_config, unknown_keys_and_bad_values) {
    EXPECT_THROW(pipeline_config_from_json(json{{"sed", 1}}), ConfigError);
    EXPECT_THROW(pipeline_config_from_json(json{{"model", {{"sgd", {{"lr", 0.1}}}}}}), ConfigError);
    EXPECT_THROW(pipeline_config_from_json(json{{"model", {{"preset", "resnet"}}}}), ConfigError);
    EXPECT_THROW(pipeline_config_from_json(json{{"evaluation", {{"tau", "c"}}}}), ConfigError);
    EXPECT_THROW(pipeline_config_from_json(json{{"evaluation", {{"threshold_lo", 0.9}, {"threshold_hi", 0.1}}}}),
                 ConfigError);
    EXPECT_THROW(pipeline_config_from_json(json{{"workers", 0}}), ConfigError);
    EXPECT_THROW(pipeline_config_from_json(json{{"report", {{"sets", json::array()}}}}), ConfigError);
    try {
        pipeline_config_from_json(json{{"model", {{"sgd", {{"lr", 0.1}}}}}});
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos);
    }
    // A 4x4 untiled exact-density set exceeds the density-matrix limit.
    const json big{{"report",
                    {{"sets",
                      {{{"name", "t"}, {"count", 1}, {"generator", {{"rows", 4}, {"cols", 4}}}, {"label_kind", "tiled-product"}},
                       {{"name", "c"},
                        {"count", 1},
                        {"generator", {{"rows", 4}, {"cols", 4}}},
                        {"label_kind", "exact-density"}}}}}}};
    EXPECT_THROW(pipeline_config_from_json(big), ConfigError);
}

TEST(pipeline_config, digest_tracks_content) {
    PipelineConfig a, b;
    EXPECT_EQ(config_digest(to_json(a)), config_digest(to_json(b)));
    b.workers = 8;
    EXPECT_EQ(config_digest(to_json(a)), config_digest(to_json(b)));
    b.seed = 1;
    EXPECT_NE(config_digest(to_json(a)), config_digest(to_json(b)));
}

TEST(evaluation_config, thresholds_follow_labels_without_range) {
    EvaluationConfig c;
    c.threshold_steps = 4;
    const auto t = c.thresholds({0.6, 0.8, 0.7});
    ASSERT_EQ(t.size(), 5u);
    EXPECT_DOUBLE_EQ(t.front(), 0.6);
    EXPECT_DOUBLE_EQ(t.back(), 0.8);
    c.threshold_lo = 0.0;
    c.threshold_hi = 1.0;
    EXPECT_DOUBLE_EQ(c.thresholds({0.6, 0.8}).back(), 1.0);
}

TEST(evaluation, perfect_predictions) {
    const std::vector<double> v{0.5, 0.7, 0.6, 0.9, 0.8};
    EvaluationConfig c;
    c.threshold_steps = 10;
    const auto r = evaluate_predictions(v, v, c);
    EXPECT_EQ(r.samples, 5u);
    EXPECT_DOUBLE_EQ(r.tau, 1.0);
    EXPECT_DOUBLE_EQ(r.mse, 0.0);
    for (const auto &p : r.curve) {
        if (p.defined()) {
            EXPECT_DOUBLE_EQ(p.score, 1.0);
        }
    }
}

TEST(predictor, training_requires_labels) {
    DatasetConfig c;
    c.count = 4;
    const Dataset d = build_dataset(c);
    EXPECT_THROW(Predictor::train(d, ModelConfig{}), ValidationError);
}

TEST(predictor, shape_mismatch_is_reported) {
    DatasetConfig c;
    c.count = 8;
    c.labeler.kind = LabelKind::ProductModel;
    const Dataset three = build_dataset(c);
    c.generator.rows = 2;
    const Dataset two = build_dataset(c);
    ModelConfig m;
    m.sgd.epochs = 1;
    const Predictor p = Predictor::train(three, m);
    try {
        p.predict(two);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError &e) {
        EXPECT_NE(std::string(e.what()).find("(1, 2, 3, 13)"), std::string::npos) << e.what();
    }
    ModelConfig g;
    g.kind = ModelKind::GateCount;
    EXPECT_THROW(Predictor::train(three, g).predict(two), ValidationError);
}
