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

#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qfe/checkpoint.h"
#include "qfe/error.h"
#include "qfe/pipeline.h"
#include "qfe/rng.h"

namespace qfe {
namespace {

using json = nlohmann::json;

// Values given on the command line. Unset optionals leave the config file
// (or the built-in default) in charge.
struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;

    std::optional<std::string> grid;
    std::optional<int> depth;
    std::optional<std::string> family;
    std::optional<std::string> palette;
    std::optional<std::size_t> count;
    std::optional<std::string> tiling_bands;
    std::optional<double> two_qubit_fraction;

    std::optional<std::string> noise;
    std::optional<std::string> method;
    std::optional<int> shots;

    std::optional<std::string> model_kind;
    std::optional<std::string> preset;
    std::optional<int> epochs;
    std::optional<double> learning_rate;
    std::optional<int> batch_size;

    std::optional<std::size_t> bins;
    std::optional<double> z;
    std::optional<std::string> tau;
    std::optional<std::string> thresholds;

    std::string in, out, data, validation, model, pred, labels, out_dir;
    bool report = false;
};

std::vector<int> parse_int_list(const std::string &s, const std::string &flag) {
    std::vector<int> v;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception &) {
            throw ConfigError(flag + " expects comma-separated integers, got '" + s + "'");
        }
    }
    return v;
}

// Applies flag overrides on top of the JSON form of the config so that every
// value passes through the same validation as a config file. `auto_label` is
// set when the labeling method should be chosen from the data.
PipelineConfig effective_config(const Flags &f, bool &auto_label) {
    auto_label = false;
    json j = json::object();
    if (!f.config.empty()) {
        j = json::parse(read_text_file(f.config), nullptr, false);
        if (j.is_discarded()) {
            throw ConfigError(f.config + ": not valid JSON");
        }
        pipeline_config_from_json(j);
    }
    if (f.seed) j["seed"] = *f.seed;
    if (f.workers) j["workers"] = *f.workers;
    if (f.count) j["count"] = *f.count;

    json &g = j["generator"];
    if (g.is_null()) g = json::object();
    if (f.grid) {
        int r = 0, c = 0;
        char x = 0, extra = 0;
        if (std::sscanf(f.grid->c_str(), "%d%c%d%c", &r, &x, &c, &extra) != 3 || (x != 'x' && x != 'X')) {
            throw ConfigError("--grid expects ROWSxCOLS, e.g. 3x3; got '" + *f.grid + "'");
        }
        g["rows"] = r;
        g["cols"] = c;
    }
    if (f.depth) g["depth"] = *f.depth;
    if (f.family) {
        g["family"] = *f.family;
        if (!f.palette && !g.contains("palette")) {
            g["palette"] = *f.family == "clifford-reducible" ? "clifford" : (g.value("depth", 1) > 1 ? "full" : "single-moment");
        }
    }
    if (f.palette) g["palette"] = *f.palette;
    if (f.two_qubit_fraction) g["two_qubit_fraction"] = *f.two_qubit_fraction;
    if (f.tiling_bands) {
        g.erase("tilings");
        if (*f.tiling_bands == "none") {
            g.erase("tiling_bands");
        } else {
            g["tiling_bands"] = parse_int_list(*f.tiling_bands, "--tilings");
        }
    }

    json &l = j["labeler"];
    if (l.is_null()) l = json::object();
    if (f.noise) {
        const std::string &n = *f.noise;
        if (n == "sim") {
            const std::string kind = l.value("kind", std::string("none"));
            if (kind == "none" || kind == "product-model") {
                l.erase("kind");
                auto_label = true;
            }
        } else {
            int index = 0;
            if (n.size() == 6 && n.rfind("model", 0) == 0 && n[5] >= '1' && n[5] <= '4') {
                index = n[5] - '0';
            } else {
                throw ConfigError("--noise expects sim or model1..model4, got '" + n + "'");
            }
            l["kind"] = "product-model";
            l["stochastic"] = to_json(StochasticModel::numbered(index));
        }
    }
    if (f.method) {
        auto_label = *f.method == "auto";
        if (auto_label) {
            l.erase("kind");
        } else {
            l["kind"] = *f.method;
        }
    }
    if (f.shots) l["shots"] = *f.shots;

    json &m = j["model"];
    if (m.is_null()) m = json::object();
    if (f.model_kind) m["kind"] = *f.model_kind;
    if (f.preset) m["preset"] = *f.preset;
    json &sgd = m["sgd"];
    if (sgd.is_null()) sgd = json::object();
    if (f.learning_rate) sgd["learning_rate"] = *f.learning_rate;
    if (f.batch_size) sgd["batch_size"] = *f.batch_size;
    if (f.epochs) {
        if (f.report) {
            j["report"]["model"]["sgd"]["epochs"] = *f.epochs;
        } else {
            sgd["epochs"] = *f.epochs;
        }
    }

    json &e = j["evaluation"];
    if (e.is_null()) e = json::object();
    if (f.bins) e["bins"] = *f.bins;
    if (f.z) e["z"] = *f.z;
    if (f.tau) e["tau"] = *f.tau;
    if (f.thresholds) {
        double lo = 0, hi = 0;
        std::size_t steps = 0;
        char extra = 0;
        if (std::sscanf(f.thresholds->c_str(), "%lf:%lf:%zu%c", &lo, &hi, &steps, &extra) != 3) {
            throw ConfigError("--thresholds expects LO:HI:STEPS, got '" + *f.thresholds + "'");
        }
        e["threshold_lo"] = lo;
        e["threshold_hi"] = hi;
        e["threshold_steps"] = steps;
    }
    return pipeline_config_from_json(j);
}

PipelineConfig effective_config(const Flags &f) {
    bool unused = false;
    return effective_config(f, unused);
}

// sim labels: factorized per tile when every record is tiled, else the exact
// density matrix when it fits, else trajectories.
LabelKind auto_label_kind(const Dataset &d, const LabelConfig &l) {
    bool tiled = l.noise.scope == CrosstalkScope::GatePairOnly;
    for (const Record &r : d.records) {
        tiled = tiled && r.tiling.has_value();
    }
    if (tiled && !d.records.empty()) return LabelKind::TiledProduct;
    const GeneratorConfig g = generator_config_from_json(d.manifest.at("config").at("generator"));
    return g.rows * g.cols <= l.limits.density_qubits ? LabelKind::ExactDensity : LabelKind::Trajectory;
}

std::string digest_of(const PipelineConfig &c) { return config_digest(to_json(c)); }

int cmd_generate(const Flags &f, std::ostream &out) {
    const PipelineConfig c = effective_config(f);
    DatasetConfig d;
    d.generator = c.generator;
    d.count = c.count;
    d.master_seed = c.seed;
    d.workers = c.workers;
    const Dataset ds = build_dataset(d);
    write_dataset(ds, f.out);
    out << "wrote " << ds.records.size() << " circuits to " << f.out << " (config " << ds.manifest["config_digest"].get<std::string>()
        << ")\n";
    return 0;
}

int cmd_label(const Flags &f, std::ostream &out) {
    bool auto_label = false;
    const PipelineConfig c = effective_config(f, auto_label);
    Dataset ds = read_dataset(f.in);
    if (!ds.manifest.contains("config")) {
        throw FormatError(f.in + ": manifest has no generator config");
    }
    DatasetConfig d = dataset_config_from_json(ds.manifest.at("config"));
    d.labeler = c.labeler;
    if (auto_label) {
        d.labeler.kind = auto_label_kind(ds, d.labeler);
    }
    if (d.labeler.kind == LabelKind::None) {
        throw ConfigError("no labeler selected; pass --noise sim|model1..model4 or set labeler.kind in the config");
    }
    check_labeler_capacity(d.generator, d.labeler);
    d.workers = c.workers;
    label_records(ds.records, d.labeler, d.workers);
    ds.manifest = make_manifest(d, ds.records);
    write_dataset(ds, f.out);
    out << "labeled " << ds.records.size() << " circuits with " << label_kind_name(d.labeler.kind) << " -> " << f.out
        << " (config " << ds.manifest["config_digest"].get<std::string>() << ")\n";
    return 0;
}

int cmd_train(const Flags &f, std::ostream &out) {
    PipelineConfig c = effective_config(f);
    const Dataset data = read_dataset(f.data);
    std::optional<Dataset> val;
    if (!f.validation.empty()) {
        val = read_dataset(f.validation);
    }
    c.model.init_seed = derive_seed(c.seed, kStreamInit);
    c.model.sgd.seed = derive_seed(c.seed, kStreamShuffle);
    const Predictor p =
        Predictor::train(data, c.model, val ? &*val : nullptr, [&](const std::string &s) { out << s << "\n"; });
    p.save(f.out);
    out << "saved " << model_kind_name(p.kind()) << " model to " << f.out << " (config " << digest_of(c) << ")\n";
    return 0;
}

int cmd_predict(const Flags &f, std::ostream &out) {
    const PipelineConfig c = effective_config(f);
    const Predictor model = Predictor::load(f.model);
    const Dataset data = read_dataset(f.in);
    write_predictions(make_predictions(model, data, digest_of(c)), f.out);
    out << "wrote " << data.records.size() << " predictions to " << f.out << "\n";
    return 0;
}

int cmd_evaluate(const Flags &f, std::ostream &out) {
    const PipelineConfig c = effective_config(f);
    const Predictions p = read_predictions(f.pred);
    std::optional<Dataset> labels;
    if (!f.labels.empty()) {
        labels = read_dataset(f.labels);
    }
    const EvaluationResult r = evaluate_predictions(p, labels ? &*labels : nullptr, c.evaluation);
    const json summary = write_evaluation(r, c.evaluation, f.out_dir, "", digest_of(c));
    out << "samples " << r.samples << "\ntau " << format_double(r.tau) << "\nmse " << format_double(r.mse)
        << "\nwrote evaluation.json, scores.csv, heatmap.csv to " << f.out_dir << "\n";
    return 0;
}

int cmd_report(const Flags &f, std::ostream &out) {
    const PipelineConfig c = effective_config(f);
    run_report(c, f.out_dir, [&](const std::string &s) { out << s << std::endl; });
    out << "report written to " << f.out_dir << " (config " << digest_of(c) << ")\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Circuit fidelity estimation: generate, label, train, predict, evaluate, report", "qfe"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config, "JSON pipeline config; command-line flags take precedence")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", f.seed, "master seed");
    app.add_option("--workers", f.workers, "worker threads for generation and labeling")->check(CLI::PositiveNumber);

    auto generator_flags = [&](CLI::App *s) {
        s->add_option("--grid", f.grid, "lattice size ROWSxCOLS");
        s->add_option("--depth", f.depth, "number of moments");
        s->add_option("--family", f.family, "random or clifford-reducible");
        s->add_option("--palette", f.palette, "single-moment, clifford or full");
        s->add_option("--count", f.count, "number of circuits");
        s->add_option("--tilings", f.tiling_bands, "band widths of the tiling catalog, e.g. 1,2 (or none)");
        s->add_option("--two-qubit-fraction", f.two_qubit_fraction, "two-qubit gate probability per decision");
    };

    CLI::App *gen = app.add_subcommand("generate", "draw circuits into a dataset file");
    generator_flags(gen);
    gen->add_option("--out", f.out, "output dataset (.jsonl)")->required();

    CLI::App *label = app.add_subcommand("label", "attach fidelity labels to a dataset");
    label->add_option("--in", f.in, "input dataset")->required()->check(CLI::ExistingFile);
    label->add_option("--out", f.out, "output dataset")->required();
    label->add_option("--noise", f.noise, "sim or model1..model4");
    label->add_option("--method", f.method, "auto, exact-density, trajectory or tiled-product (sim noise)");
    label->add_option("--shots", f.shots, "trajectory shots per circuit");

    CLI::App *train = app.add_subcommand("train", "fit a network or the gate-count baseline");
    train->add_option("--data", f.data, "labeled training dataset")->required()->check(CLI::ExistingFile);
    train->add_option("--validation", f.validation, "labeled validation dataset")->check(CLI::ExistingFile);
    train->add_option("--model", f.model_kind, "network or gate-count");
    train->add_option("--preset", f.preset, "lc2d, lc2d-3x3 or cnn3d");
    train->add_option("--epochs", f.epochs, "training epochs");
    train->add_option("--lr", f.learning_rate, "learning rate");
    train->add_option("--batch", f.batch_size, "minibatch size");
    train->add_option("--out", f.out, "output model file")->required();

    CLI::App *predict = app.add_subcommand("predict", "predict fidelities for a dataset");
    predict->add_option("--model", f.model, "checkpoint or gate-count model")->required()->check(CLI::ExistingFile);
    predict->add_option("--in", f.in, "dataset")->required()->check(CLI::ExistingFile);
    predict->add_option("--out", f.out, "predictions file (.jsonl)")->required();

    CLI::App *evaluate = app.add_subcommand("evaluate", "rank correlation, score curve and heatmap");
    evaluate->add_option("--pred", f.pred, "predictions file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--labels", f.labels, "labeled dataset matched by record index")->check(CLI::ExistingFile);
    evaluate->add_option("--out-dir", f.out_dir, "output directory")->required();
    evaluate->add_option("--bins", f.bins, "heatmap bins per axis");
    evaluate->add_option("--z", f.z, "Wilson interval z value");
    evaluate->add_option("--tau", f.tau, "kendall tau variant, b (tie corrected) or a");
    evaluate->add_option("--thresholds", f.thresholds, "score-curve thresholds LO:HI:STEPS");

    CLI::App *report = app.add_subcommand("report", "train on tiled Clifford-reducible circuits and test three regimes");
    report->add_option("--out-dir", f.out_dir, "output directory")->required();
    report->add_option("--epochs", f.epochs, "network training epochs");
    report->add_option("--bins", f.bins, "heatmap bins per axis");
    report->add_option("--thresholds", f.thresholds, "score-curve thresholds LO:HI:STEPS");

    try {
        app.parse(argc, argv);
        f.report = report->parsed();
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (*gen) return cmd_generate(f, out);
        if (*label) return cmd_label(f, out);
        if (*train) return cmd_train(f, out);
        if (*predict) return cmd_predict(f, out);
        if (*evaluate) return cmd_evaluate(f, out);
        if (*report) return cmd_report(f, out);
    } catch (const ConfigError &e) {
        err << "qfe: configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        err << "qfe: error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace qfe
