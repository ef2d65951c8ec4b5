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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qfe/checkpoint.h"
#include "qfe/error.h"
#include "qfe/rng.h"

namespace qfe {
namespace {

using json = nlohmann::json;

inline constexpr const char *kGateCountFormat = "qfe-gate-count/1";
inline constexpr const char *kReportFormat = "qfe-report/1";

void check_keys(const json &j, std::initializer_list<const char *> allowed, const std::string &where) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (const auto &[key, value] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; })) {
            std::string list;
            for (const char *a : allowed) {
                list += list.empty() ? "" : ", ";
                list += a;
            }
            throw ConfigError("unknown key '" + key + "' in " + where + " (expected one of: " + list + ")");
        }
    }
}

template <class T>
void read_key(const json &j, const char *key, T &out, const std::string &where) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception &) {
        throw ConfigError("'" + std::string(key) + "' in " + where + " has the wrong type");
    }
}

std::string tau_name(TauVariant v) { return v == TauVariant::B ? "b" : "a"; }

TauVariant parse_tau(const std::string &s) {
    if (s == "b") return TauVariant::B;
    if (s == "a") return TauVariant::A;
    throw ConfigError("tau variant must be 'a' or 'b', got '" + s + "'");
}

std::vector<double> network_inputs(const Network &net, const Dataset &data) {
    const auto tensors = encode_records(data);
    std::vector<double> inputs;
    if (tensors.empty()) {
        return inputs;
    }
    const CircuitTensor &t = tensors.front();
    if (t.data.size() != net.input_size()) {
        throw ValidationError("model expects input " + shape_string(net.spec().input_shape) + " but the data encodes to " +
                              shape_string({t.depth, t.rows, t.cols, t.channels}));
    }
    inputs.reserve(net.input_size() * tensors.size());
    for (const CircuitTensor &c : tensors) {
        inputs.insert(inputs.end(), c.data.begin(), c.data.end());
    }
    return inputs;
}

std::string data_digest(const Dataset &d) { return d.manifest.value("config_digest", std::string()); }

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string model_kind_name(ModelKind k) { return k == ModelKind::Network ? "network" : "gate-count"; }

ModelKind parse_model_kind(const std::string &name) {
    if (name == "network" || name == "nn") return ModelKind::Network;
    if (name == "gate-count" || name == "baseline") return ModelKind::GateCount;
    throw ConfigError("unknown model kind '" + name + "' (expected network or gate-count)");
}

std::vector<double> EvaluationConfig::thresholds(const std::vector<double> &labels) const {
    double lo = 0.0, hi = 1.0;
    if (threshold_lo && threshold_hi) {
        lo = *threshold_lo;
        hi = *threshold_hi;
    } else if (!labels.empty()) {
        const auto [a, b] = std::minmax_element(labels.begin(), labels.end());
        lo = threshold_lo.value_or(*a);
        hi = threshold_hi.value_or(*b);
        if (!(lo < hi)) {
            hi = lo + 1e-9;
        }
    }
    try {
        return linear_thresholds(lo, hi, threshold_steps);
    } catch (const ParameterError &e) {
        throw ConfigError(std::string("evaluation thresholds: ") + e.what());
    }
}

ReportConfig default_report_config() {
    ReportConfig r;
    const json base{{"rows", 3}, {"cols", 3}, {"depth", 12}, {"tiling_bands", {1, 2}}};
    json cr = base;
    cr["family"] = "clifford-reducible";
    cr["palette"] = "clifford";
    json tiled = base;
    tiled["family"] = "random";
    tiled["palette"] = "full";
    json untiled = tiled;
    untiled.erase("tiling_bands");
    r.sets = {
        {"train", generator_config_from_json(cr), LabelKind::TiledProduct, 2000},
        {"a", generator_config_from_json(cr), LabelKind::TiledProduct, 500},
        {"b", generator_config_from_json(tiled), LabelKind::TiledProduct, 500},
        {"c", generator_config_from_json(untiled), LabelKind::ExactDensity, 500},
    };
    r.model.preset = "cnn3d";
    r.model.sgd.epochs = 60;
    return r;
}

json to_json(const SgdConfig &c) {
    return {{"learning_rate", c.learning_rate}, {"momentum", c.momentum}, {"nesterov", c.nesterov},
            {"batch_size", c.batch_size},       {"epochs", c.epochs},
            {"standardize_targets", c.standardize_targets}};
}

json to_json(const ModelConfig &c) {
    return {{"kind", model_kind_name(c.kind)}, {"preset", c.preset}, {"sgd", to_json(c.sgd)}};
}

json to_json(const EvaluationConfig &c) {
    const auto opt = [](const std::optional<double> &v) { return v ? json(*v) : json(nullptr); };
    return {{"threshold_lo", opt(c.threshold_lo)},
            {"threshold_hi", opt(c.threshold_hi)},
            {"threshold_steps", c.threshold_steps},
            {"z", c.z},
            {"bins", c.bins},
            {"tau", tau_name(c.tau)}};
}

json to_json(const ReportConfig &c) {
    json sets = json::array();
    for (const ReportSet &s : c.sets) {
        sets.push_back({{"name", s.name},
                        {"generator", to_json(s.generator)},
                        {"label_kind", label_kind_name(s.label_kind)},
                        {"count", s.count}});
    }
    return {{"noise", to_json(c.noise)}, {"sets", sets}, {"model", to_json(c.model)}};
}

json to_json(const PipelineConfig &c) {
    return {{"seed", c.seed},
            {"generator", to_json(c.generator)},
            {"labeler", to_json(c.labeler)},
            {"count", c.count},
            {"model", to_json(c.model)},
            {"evaluation", to_json(c.evaluation)},
            {"report", to_json(c.report)}};
}

SgdConfig sgd_config_from_json(const json &j, SgdConfig c) {
    check_keys(j, {"learning_rate", "momentum", "nesterov", "batch_size", "epochs", "standardize_targets"},
               "sgd config");
    read_key(j, "learning_rate", c.learning_rate, "sgd config");
    read_key(j, "momentum", c.momentum, "sgd config");
    read_key(j, "nesterov", c.nesterov, "sgd config");
    read_key(j, "batch_size", c.batch_size, "sgd config");
    read_key(j, "epochs", c.epochs, "sgd config");
    read_key(j, "standardize_targets", c.standardize_targets, "sgd config");
    try {
        c.validate();
    } catch (const ParameterError &e) {
        throw ConfigError(std::string("sgd config: ") + e.what());
    }
    return c;
}

ModelConfig model_config_from_json(const json &j, ModelConfig c) {
    check_keys(j, {"kind", "preset", "sgd"}, "model config");
    if (j.contains("kind")) {
        std::string k;
        read_key(j, "kind", k, "model config");
        c.kind = parse_model_kind(k);
    }
    read_key(j, "preset", c.preset, "model config");
    if (j.contains("sgd")) {
        c.sgd = sgd_config_from_json(j.at("sgd"), c.sgd);
    }
    if (c.kind == ModelKind::Network && c.preset != "lc2d" && c.preset != "lc2d-3x3" && c.preset != "cnn3d") {
        throw ConfigError("unknown network preset '" + c.preset + "' (expected lc2d, lc2d-3x3 or cnn3d)");
    }
    return c;
}

EvaluationConfig evaluation_config_from_json(const json &j, EvaluationConfig c) {
    const std::string where = "evaluation config";
    check_keys(j, {"threshold_lo", "threshold_hi", "threshold_steps", "z", "bins", "tau"}, where);
    for (const char *key : {"threshold_lo", "threshold_hi"}) {
        if (j.contains(key) && !j.at(key).is_null()) {
            double v = 0.0;
            read_key(j, key, v, where);
            (std::string(key) == "threshold_lo" ? c.threshold_lo : c.threshold_hi) = v;
        }
    }
    read_key(j, "threshold_steps", c.threshold_steps, where);
    read_key(j, "z", c.z, where);
    read_key(j, "bins", c.bins, where);
    if (j.contains("tau")) {
        std::string t;
        read_key(j, "tau", t, where);
        c.tau = parse_tau(t);
    }
    if (!(c.z > 0.0) || c.bins == 0) {
        throw ConfigError("evaluation config: z must be positive and bins at least 1");
    }
    if (c.threshold_lo && c.threshold_hi) {
        c.thresholds({});
    }
    return c;
}

ReportConfig report_config_from_json(const json &j, ReportConfig c) {
    check_keys(j, {"noise", "sets", "model"}, "report config");
    if (j.contains("noise")) {
        c.noise = sim_noise_model_from_json(j.at("noise"));
    }
    if (j.contains("model")) {
        c.model = model_config_from_json(j.at("model"), c.model);
    }
    if (j.contains("sets")) {
        c.sets.clear();
        for (const json &s : j.at("sets")) {
            check_keys(s, {"name", "generator", "label_kind", "count"}, "report set");
            ReportSet set;
            read_key(s, "name", set.name, "report set");
            if (s.contains("generator")) {
                set.generator = generator_config_from_json(s.at("generator"));
            }
            if (s.contains("label_kind")) {
                std::string k;
                read_key(s, "label_kind", k, "report set");
                set.label_kind = parse_label_kind(k);
            }
            read_key(s, "count", set.count, "report set");
            if (set.name.empty() || set.count == 0) {
                throw ConfigError("every report set needs a name and a positive count");
            }
            c.sets.push_back(std::move(set));
        }
    }
    if (c.sets.size() < 2) {
        throw ConfigError("report needs a training set and at least one test set");
    }
    std::vector<std::string> names;
    for (const ReportSet &s : c.sets) {
        if (s.label_kind == LabelKind::None || s.label_kind == LabelKind::ProductModel) {
            throw ConfigError("report set '" + s.name + "' must use a simulation labeler");
        }
        LabelConfig l;
        l.kind = s.label_kind;
        l.noise = c.noise;
        check_labeler_capacity(s.generator, l);
        names.push_back(s.name);
    }
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
        throw ConfigError("report set names must be unique");
    }
    return c;
}

PipelineConfig pipeline_config_from_json(const json &j) {
    check_keys(j, {"seed", "workers", "generator", "labeler", "count", "model", "evaluation", "report"},
               "pipeline config");
    PipelineConfig c;
    read_key(j, "seed", c.seed, "pipeline config");
    read_key(j, "workers", c.workers, "pipeline config");
    read_key(j, "count", c.count, "pipeline config");
    if (j.contains("generator")) c.generator = generator_config_from_json(j.at("generator"));
    if (j.contains("labeler")) c.labeler = label_config_from_json(j.at("labeler"));
    if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
    if (j.contains("evaluation")) c.evaluation = evaluation_config_from_json(j.at("evaluation"));
    if (j.contains("report")) c.report = report_config_from_json(j.at("report"));
    if (c.workers < 1) {
        throw ConfigError("workers must be at least 1");
    }
    return c;
}

PipelineConfig read_pipeline_config(const std::string &path) {
    const std::string text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(path + ": not valid JSON: " + e.what());
    }
    try {
        return pipeline_config_from_json(j);
    } catch (const ConfigError &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

Predictor Predictor::train(const Dataset &data, const ModelConfig &config, const Dataset *validation,
                           const Logger &log) {
    if (data.records.empty()) {
        throw ValidationError("training data is empty");
    }
    const std::vector<double> labels = labels_of(data);
    Predictor p;
    p.kind_ = config.kind;
    p.info_ = {{"model", to_json(config)}, {"data_digest", data_digest(data)}, {"samples", data.records.size()}};
    if (config.kind == ModelKind::GateCount) {
        std::vector<LatticeCircuit> circuits;
        circuits.reserve(data.records.size());
        for (const Record &r : data.records) {
            circuits.push_back(r.circuit);
        }
        p.baseline_ = fit_gate_count_regressor(circuits, labels);
        if (!p.baseline_->warning.empty() && log) {
            log("warning: " + p.baseline_->warning);
        }
        return p;
    }

    const CircuitTensor first = encode_one_hot(data.records.front().circuit, Palette::full());
    std::vector<int> shape{first.depth, first.rows, first.cols, dataset_channels(data)};
    Network net(preset_by_name(config.preset, shape));
    net.initialize(config.init_seed);
    const TrainingData train = make_training_data(encode_records(data), labels);
    std::optional<TrainingData> val;
    if (validation != nullptr) {
        val = make_training_data(encode_records(*validation), labels_of(*validation));
        if (val->sample_size != train.sample_size) {
            throw ValidationError("validation data has a different circuit shape than the training data");
        }
    }
    if (log) {
        log("training " + config.preset + " (" + std::to_string(net.param_count()) + " parameters) on " +
            std::to_string(train.count()) + " circuits for " + std::to_string(config.sgd.epochs) + " epochs");
    }
    const int epochs = config.sgd.epochs;
    const TrainingReport report =
        train_sgd(net, train, config.sgd, val ? &*val : nullptr, [&](int epoch, double loss, double val_loss) {
            if (log && (epoch + 1 == epochs || (epoch + 1) % 10 == 0 || epoch == 0)) {
                std::string line = "epoch " + std::to_string(epoch + 1) + "/" + std::to_string(epochs) +
                                   " loss " + format_double(loss);
                if (val) line += " validation " + format_double(val_loss);
                log(line);
            }
        });
    p.info_["train_loss"] = report.train_loss;
    if (val) {
        p.info_["validation_loss"] = report.validation_loss;
    }
    p.network_ = std::move(net);
    return p;
}

void Predictor::save(const std::string &path) const {
    if (kind_ == ModelKind::Network) {
        save_checkpoint(*network_, info_, path);
        return;
    }
    const json j{{"format", kGateCountFormat}, {"model", to_json(*baseline_)}, {"info", info_}};
    write_text_file(path, j.dump(2) + "\n");
}

Predictor Predictor::load(const std::string &path) {
    Predictor p;
    if (is_network_checkpoint(path)) {
        Checkpoint c = load_checkpoint(path);
        p.kind_ = ModelKind::Network;
        p.info_ = std::move(c.metadata);
        p.network_ = std::move(c.network);
        return p;
    }
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error &) {
        throw FormatError(path + ": neither a network checkpoint nor a gate-count model file");
    }
    if (!j.is_object() || j.value("format", std::string()) != kGateCountFormat) {
        throw FormatError(path + ": unsupported model format (expected " + std::string(kGateCountFormat) + ")");
    }
    p.kind_ = ModelKind::GateCount;
    p.baseline_ = gate_count_regressor_from_json(j.at("model"));
    p.info_ = j.value("info", json::object());
    return p;
}

std::vector<double> Predictor::predict(const Dataset &data) const {
    if (kind_ == ModelKind::Network) {
        const std::vector<double> inputs = network_inputs(*network_, data);
        return network_->predict(inputs, data.records.size());
    }
    std::vector<double> out;
    out.reserve(data.records.size());
    for (const Record &r : data.records) {
        if (r.circuit.rows() != baseline_->rows || r.circuit.cols() != baseline_->cols) {
            throw ValidationError("gate-count model was fit on a " + std::to_string(baseline_->rows) + "x" +
                                  std::to_string(baseline_->cols) + " lattice but record " + std::to_string(r.index) +
                                  " is " + std::to_string(r.circuit.rows()) + "x" + std::to_string(r.circuit.cols()));
        }
        out.push_back(predict_gate_count(*baseline_, r.circuit));
    }
    return out;
}

Predictions make_predictions(const Predictor &model, const Dataset &data, const std::string &config_digest) {
    Predictions p;
    p.predicted = model.predict(data);
    for (const Record &r : data.records) {
        p.index.push_back(r.index);
        p.label.push_back(r.label);
    }
    p.manifest = {{"format", kPredictionFormat},
                  {"count", data.records.size()},
                  {"model", model_kind_name(model.kind())},
                  {"model_data_digest", model.info().value("data_digest", std::string())},
                  {"dataset_digest", data_digest(data)},
                  {"config_digest", config_digest}};
    return p;
}

void write_predictions(const Predictions &p, const std::string &path) {
    std::string out = p.manifest.dump() + "\n";
    for (std::size_t i = 0; i < p.index.size(); ++i) {
        json row{{"index", p.index[i]}, {"prediction", p.predicted[i]}};
        if (p.label[i]) {
            row["label"] = *p.label[i];
        }
        out += row.dump() + "\n";
    }
    write_text_file(path, out);
}

Predictions read_predictions(const std::string &path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::size_t line_no = 0;
    Predictions p;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            const json j = json::parse(line);
            if (line_no == 1) {
                if (j.value("format", std::string()) != kPredictionFormat) {
                    throw FormatError(path + ": not a predictions file (expected format " +
                                      std::string(kPredictionFormat) + ")");
                }
                p.manifest = j;
                continue;
            }
            p.index.push_back(j.at("index").get<std::uint64_t>());
            p.predicted.push_back(j.at("prediction").get<double>());
            p.label.push_back(j.contains("label") ? std::optional<double>(j.at("label").get<double>()) : std::nullopt);
        } catch (const json::exception &e) {
            throw FormatError(path + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (p.manifest.is_null()) {
        throw FormatError(path + ": empty predictions file");
    }
    if (p.manifest.value("count", std::size_t(0)) != p.index.size()) {
        throw ValidationError(path + ": manifest count does not match the number of rows");
    }
    return p;
}

EvaluationResult evaluate_predictions(const std::vector<double> &predicted, const std::vector<double> &labels,
                                      const EvaluationConfig &config) {
    EvaluationResult r;
    r.samples = predicted.size();
    r.tau = kendall_tau(predicted, labels, config.tau);
    double sq = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        sq += (predicted[i] - labels[i]) * (predicted[i] - labels[i]);
    }
    r.mse = sq / double(predicted.size());
    r.curve = threshold_score_curve(predicted, labels, config.thresholds(labels), config.z);
    r.heatmap = export_heatmap(predicted, labels, config.bins);
    return r;
}

EvaluationResult evaluate_predictions(const Predictions &p, const Dataset *labels, const EvaluationConfig &config) {
    std::vector<double> truth;
    truth.reserve(p.index.size());
    if (labels != nullptr) {
        std::map<std::uint64_t, const Record *> by_index;
        for (const Record &r : labels->records) {
            by_index[r.index] = &r;
        }
        for (std::uint64_t i : p.index) {
            const auto it = by_index.find(i);
            if (it == by_index.end() || !it->second->label) {
                throw ValidationError("no label for record " + std::to_string(i) + " in the labels file");
            }
            truth.push_back(*it->second->label);
        }
    } else {
        for (std::size_t k = 0; k < p.label.size(); ++k) {
            if (!p.label[k]) {
                throw ValidationError("prediction for record " + std::to_string(p.index[k]) +
                                      " carries no label; pass a labeled dataset");
            }
            truth.push_back(*p.label[k]);
        }
    }
    return evaluate_predictions(p.predicted, truth, config);
}

json write_evaluation(const EvaluationResult &r, const EvaluationConfig &config, const std::string &dir,
                      const std::string &prefix, const std::string &config_digest) {
    std::filesystem::create_directories(dir);
    std::size_t defined = 0;
    double score_sum = 0.0;
    for (const ScorePoint &p : r.curve) {
        if (p.defined()) {
            ++defined;
            score_sum += p.score;
        }
    }
    const json summary{{"samples", r.samples},
                       {"tau", r.tau},
                       {"tau_variant", tau_name(config.tau)},
                       {"mse", r.mse},
                       {"defined_thresholds", defined},
                       {"mean_score", defined > 0 ? json(score_sum / double(defined)) : json(nullptr)},
                       {"evaluation", to_json(config)},
                       {"config_digest", config_digest}};
    const std::filesystem::path base(dir);
    write_text_file((base / (prefix + "evaluation.json")).string(), summary.dump(2) + "\n");
    const std::string head = "# config_digest " + config_digest + "\n";
    write_text_file((base / (prefix + "scores.csv")).string(), head + score_curve_csv(r.curve));
    write_text_file((base / (prefix + "heatmap.csv")).string(), head + heatmap_csv(r.heatmap));
    return summary;
}

json run_report(const PipelineConfig &config, const std::string &dir, const Logger &log) {
    const ReportConfig &rc = config.report;
    const std::string digest = config_digest(to_json(config));
    const std::filesystem::path base(dir);
    std::filesystem::create_directories(base);
    const auto say = [&](const std::string &s) {
        if (log) log(s);
    };

    std::vector<Dataset> sets;
    json set_summary = json::array();
    for (std::size_t k = 0; k < rc.sets.size(); ++k) {
        const ReportSet &s = rc.sets[k];
        DatasetConfig dc;
        dc.generator = s.generator;
        dc.labeler.kind = s.label_kind;
        dc.labeler.noise = rc.noise;
        dc.count = s.count;
        dc.master_seed = derive_seed(config.seed, k);
        dc.workers = config.workers;
        say("building set '" + s.name + "': " + std::to_string(s.count) + " " + family_name(s.generator.family) +
            " circuits, " + label_kind_name(s.label_kind) + " labels");
        Dataset d = build_dataset(dc);
        d.manifest["report_config_digest"] = digest;
        write_dataset(d, (base / ("data_" + s.name + ".jsonl")).string());
        const auto labels = labels_of(d);
        double mean = 0.0;
        for (double v : labels) mean += v;
        set_summary.push_back({{"name", s.name},
                               {"count", s.count},
                               {"family", family_name(s.generator.family)},
                               {"tiled", !s.generator.tilings.empty()},
                               {"label_kind", label_kind_name(s.label_kind)},
                               {"label_mean", mean / double(labels.size())},
                               {"label_min", *std::min_element(labels.begin(), labels.end())},
                               {"label_max", *std::max_element(labels.begin(), labels.end())}});
        sets.push_back(std::move(d));
    }

    ModelConfig nn_config = rc.model;
    nn_config.kind = ModelKind::Network;
    nn_config.init_seed = derive_seed(config.seed, kStreamInit);
    nn_config.sgd.seed = derive_seed(config.seed, kStreamShuffle);
    const Predictor nn = Predictor::train(sets[0], nn_config, nullptr, log);
    nn.save((base / "model_network.ckpt").string());
    ModelConfig gc_config;
    gc_config.kind = ModelKind::GateCount;
    const Predictor gc = Predictor::train(sets[0], gc_config, nullptr, log);
    gc.save((base / "model_gate_count.json").string());

    json results = json::array();
    std::string table = "# config_digest " + digest + "\n";
    table += "set     model       samples  tau       mse\n";
    for (std::size_t k = 1; k < sets.size(); ++k) {
        const std::string &name = rc.sets[k].name;
        for (const Predictor *model : {&nn, &gc}) {
            const std::string tag = name + "_" + (model == &nn ? "network" : "gate_count");
            const Predictions p = make_predictions(*model, sets[k], digest);
            write_predictions(p, (base / ("pred_" + tag + ".jsonl")).string());
            const EvaluationResult r = evaluate_predictions(p, nullptr, config.evaluation);
            json e = write_evaluation(r, config.evaluation, dir, tag + "_", digest);
            e["set"] = name;
            e["model"] = model_kind_name(model->kind());
            e.erase("evaluation");
            e.erase("config_digest");
            results.push_back(e);
            say("set " + name + " " + model_kind_name(model->kind()) + ": tau " + fixed(r.tau, 4) + " mse " +
                format_double(r.mse));
            char row[160];
            std::snprintf(row, sizeof row, "%-7s %-11s %-8zu %-9s %s\n", name.c_str(),
                          model_kind_name(model->kind()).c_str(), r.samples, fixed(r.tau, 4).c_str(),
                          format_double(r.mse).c_str());
            table += row;
        }
    }

    const json summary{{"format", kReportFormat},
                       {"config_digest", digest},
                       {"config", to_json(config)},
                       {"sets", set_summary},
                       {"network",
                        {{"preset", nn_config.preset},
                         {"parameters", nn.network()->param_count()},
                         {"train_loss", nn.info().at("train_loss")}}},
                       {"gate_count", {{"ridge", gc.baseline()->ridge}, {"warning", gc.baseline()->warning}}},
                       {"results", results}};
    write_text_file((base / "report.json").string(), summary.dump(2) + "\n");
    write_text_file((base / "summary.txt").string(), table);
    return summary;
}

void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open " + path + " for writing");
    }
    out << text;
    if (!out) {
        throw FormatError("failed writing " + path);
    }
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot read " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace qfe
