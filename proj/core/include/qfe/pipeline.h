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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfe/dataset.h"
#include "qfe/evaluation.h"
#include "qfe/gate_count.h"
#include "qfe/network.h"
#include "qfe/train.h"

namespace qfe {

using Logger = std::function<void(const std::string &)>;

enum class ModelKind { Network, GateCount };

std::string model_kind_name(ModelKind k);
ModelKind parse_model_kind(const std::string &name);

struct ModelConfig {
    ModelKind kind = ModelKind::Network;
    /// Preset name understood by preset_by_name; the input shape comes from
    /// the training data.
    std::string preset = "lc2d";
    SgdConfig sgd;
    std::uint64_t init_seed = 0;
};

struct EvaluationConfig {
    /// Score-curve thresholds cover [lo, hi]; without a range they span the
    /// observed labels.
    std::optional<double> threshold_lo;
    std::optional<double> threshold_hi;
    std::size_t threshold_steps = 50;
    double z = 1.96;
    std::size_t bins = 20;
    TauVariant tau = TauVariant::B;

    std::vector<double> thresholds(const std::vector<double> &labels) const;
};

/// One dataset of the generalization report.
struct ReportSet {
    std::string name;
    GeneratorConfig generator;
    LabelKind label_kind = LabelKind::TiledProduct;
    std::size_t count = 0;
};

/// Train on the first set, evaluate both the network and the gate-count
/// baseline on every other set.
struct ReportConfig {
    SimNoiseModel noise;
    std::vector<ReportSet> sets;
    ModelConfig model;
};

/// Tiled Clifford-reducible training data, then (a) held-out tiled
/// Clifford-reducible, (b) tiled random and (c) untiled random test sets on
/// a 3x3 lattice with 12 moments.
ReportConfig default_report_config();

/// Everything the command-line tool can be configured with. Keys missing
/// from a config file keep these defaults.
struct PipelineConfig {
    std::uint64_t seed = 0;
    int workers = 1;
    GeneratorConfig generator;
    LabelConfig labeler;
    std::size_t count = 100;
    ModelConfig model;
    EvaluationConfig evaluation;
    ReportConfig report = default_report_config();
};

nlohmann::json to_json(const SgdConfig &c);
nlohmann::json to_json(const ModelConfig &c);
nlohmann::json to_json(const EvaluationConfig &c);
nlohmann::json to_json(const ReportConfig &c);
nlohmann::json to_json(const PipelineConfig &c);
SgdConfig sgd_config_from_json(const nlohmann::json &j, SgdConfig base = {});
ModelConfig model_config_from_json(const nlohmann::json &j, ModelConfig base = {});
EvaluationConfig evaluation_config_from_json(const nlohmann::json &j, EvaluationConfig base = {});
ReportConfig report_config_from_json(const nlohmann::json &j, ReportConfig base = default_report_config());
/// Throws ConfigError on unknown keys or invalid values.
PipelineConfig pipeline_config_from_json(const nlohmann::json &j);
PipelineConfig read_pipeline_config(const std::string &path);

/// A trained network or gate-count baseline.
class Predictor {
   public:
    static Predictor train(const Dataset &data, const ModelConfig &config, const Dataset *validation = nullptr,
                           const Logger &log = {});
    /// Reads either a network checkpoint or a gate-count JSON file.
    static Predictor load(const std::string &path);
    void save(const std::string &path) const;

    ModelKind kind() const { return kind_; }
    /// Training configuration, data digest and loss history.
    const nlohmann::json &info() const { return info_; }
    const std::optional<Network> &network() const { return network_; }
    const std::optional<GateCountRegressor> &baseline() const { return baseline_; }

    std::vector<double> predict(const Dataset &data) const;

   private:
    ModelKind kind_ = ModelKind::Network;
    std::optional<Network> network_;
    std::optional<GateCountRegressor> baseline_;
    nlohmann::json info_;
};

inline constexpr const char *kPredictionFormat = "qfe-pred/1";

struct Predictions {
    nlohmann::json manifest;
    std::vector<std::uint64_t> index;
    std::vector<double> predicted;
    std::vector<std::optional<double>> label;
};

Predictions make_predictions(const Predictor &model, const Dataset &data, const std::string &config_digest);
void write_predictions(const Predictions &p, const std::string &path);
Predictions read_predictions(const std::string &path);

struct EvaluationResult {
    std::size_t samples = 0;
    double tau = 0.0;
    double mse = 0.0;
    std::vector<ScorePoint> curve;
    HeatmapGrid heatmap;
};

EvaluationResult evaluate_predictions(const std::vector<double> &predicted, const std::vector<double> &labels,
                                      const EvaluationConfig &config);
/// Labels come from the predictions file unless `labels` is given, in which
/// case records are matched by index.
EvaluationResult evaluate_predictions(const Predictions &p, const Dataset *labels, const EvaluationConfig &config);

/// Writes <prefix>evaluation.json, <prefix>scores.csv and <prefix>heatmap.csv
/// into `dir`. CSV files start with a "# config_digest <hex>" comment.
nlohmann::json write_evaluation(const EvaluationResult &r, const EvaluationConfig &config, const std::string &dir,
                                const std::string &prefix, const std::string &config_digest);

/// Runs the generalization report into `dir` and returns its summary (also
/// written to report.json). Every artifact is a function of `config` only.
nlohmann::json run_report(const PipelineConfig &config, const std::string &dir, const Logger &log = {});

void write_text_file(const std::string &path, const std::string &text);
std::string read_text_file(const std::string &path);

}  // namespace qfe
