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

#include "qfe/dataset.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "qfe/circuit_io.h"
#include "qfe/error.h"
#include "qfe/parallel.h"
#include "qfe/rng.h"

namespace qfe {

using nlohmann::json;

namespace {

constexpr int kHistogramBins = 20;

template <typename T>
void read_if(const json &j, const char *key, T &out) {
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

template <typename Fn>
auto as_config_error(const char *what, Fn &&fn) {
    try {
        return fn();
    } catch (const ConfigError &) {
        throw;
    } catch (const json::exception &e) {
        throw ConfigError(std::string("malformed ") + what + ": " + e.what());
    } catch (const Error &e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

std::vector<Tiling> catalog_or_whole(const GeneratorConfig &g) {
    return g.tilings.empty() ? std::vector<Tiling>{Tiling::whole(g.rows, g.cols)} : g.tilings;
}

json histogram(const std::vector<Record> &records) {
    std::vector<std::size_t> counts(kHistogramBins, 0);
    std::size_t labeled = 0;
    for (const Record &r : records) {
        if (!r.label) {
            continue;
        }
        ++labeled;
        const int bin = std::clamp(static_cast<int>(*r.label * kHistogramBins), 0, kHistogramBins - 1);
        ++counts[bin];
    }
    return json{{"bins", kHistogramBins}, {"range", {0.0, 1.0}}, {"labeled", labeled}, {"counts", counts}};
}

}  // namespace

Palette GeneratorConfig::resolved_palette() const {
    Palette p = palette_by_name(palette);
    p.identity_weight = identity_weight;
    return p;
}

std::string family_name(CircuitFamily f) {
    return f == CircuitFamily::Random ? "random" : "clifford-reducible";
}

CircuitFamily parse_family(const std::string &name) {
    if (name == "random") {
        return CircuitFamily::Random;
    }
    if (name == "clifford-reducible") {
        return CircuitFamily::CliffordReducible;
    }
    throw ConfigError("unknown circuit family '" + name + "' (expected random or clifford-reducible)");
}

std::string label_kind_name(LabelKind k) {
    switch (k) {
        case LabelKind::None:
            return "none";
        case LabelKind::ProductModel:
            return "product-model";
        case LabelKind::ExactDensity:
            return "exact-density";
        case LabelKind::Trajectory:
            return "trajectory";
        case LabelKind::TiledProduct:
            return "tiled-product";
    }
    return "none";
}

LabelKind parse_label_kind(const std::string &name) {
    for (LabelKind k : {LabelKind::None, LabelKind::ProductModel, LabelKind::ExactDensity, LabelKind::Trajectory,
                        LabelKind::TiledProduct}) {
        if (label_kind_name(k) == name) {
            return k;
        }
    }
    throw ConfigError("unknown labeler '" + name +
                      "' (expected none, product-model, exact-density, trajectory or tiled-product)");
}

Palette palette_by_name(const std::string &name) {
    if (name == "single-moment") {
        return Palette::single_moment();
    }
    if (name == "clifford") {
        return Palette::clifford();
    }
    if (name == "full") {
        return Palette::full();
    }
    throw ConfigError("unknown palette '" + name + "' (expected single-moment, clifford or full)");
}

json to_json(const GeneratorConfig &g) {
    json tilings = json::array();
    for (const Tiling &t : g.tilings) {
        tilings.push_back(tiling_to_json(t));
    }
    return json{{"rows", g.rows},
                {"cols", g.cols},
                {"depth", g.depth},
                {"family", family_name(g.family)},
                {"palette", g.palette},
                {"identity_weight", g.identity_weight},
                {"two_qubit_fraction", g.two_qubit_fraction},
                {"pair_rate", g.pair_rate},
                {"reversed_pairs", g.reversed_pairs},
                {"tilings", tilings}};
}

json to_json(const LabelConfig &l) {
    json j{{"kind", label_kind_name(l.kind)}};
    switch (l.kind) {
        case LabelKind::None:
            break;
        case LabelKind::ProductModel:
            j["stochastic"] = to_json(l.stochastic);
            break;
        case LabelKind::Trajectory:
            j["shots"] = l.shots;
            j["statevector_qubit_limit"] = l.limits.statevector_qubits;
            j["noise"] = to_json(l.noise);
            break;
        case LabelKind::ExactDensity:
        case LabelKind::TiledProduct:
            j["density_qubit_limit"] = l.limits.density_qubits;
            j["noise"] = to_json(l.noise);
            break;
    }
    return j;
}

json to_json(const DatasetConfig &c) {
    return json{{"generator", to_json(c.generator)},
                {"labeler", to_json(c.labeler)},
                {"count", c.count},
                {"master_seed", c.master_seed}};
}

GeneratorConfig generator_config_from_json(const json &j) {
    return as_config_error("generator config", [&] {
        GeneratorConfig g;
        read_if(j, "rows", g.rows);
        read_if(j, "cols", g.cols);
        read_if(j, "depth", g.depth);
        if (j.contains("family")) {
            g.family = parse_family(j.at("family").get<std::string>());
        }
        if (j.contains("palette")) {
            g.palette = j.at("palette").get<std::string>();
        } else if (g.family == CircuitFamily::CliffordReducible) {
            g.palette = "clifford";
        }
        read_if(j, "identity_weight", g.identity_weight);
        read_if(j, "two_qubit_fraction", g.two_qubit_fraction);
        read_if(j, "pair_rate", g.pair_rate);
        read_if(j, "reversed_pairs", g.reversed_pairs);
        if (g.rows < 1 || g.cols < 1 || g.depth < 1) {
            throw ConfigError("rows, cols and depth must be at least 1");
        }
        if (j.contains("tilings") && j.contains("tiling_bands")) {
            throw ConfigError("give either 'tilings' or 'tiling_bands', not both");
        }
        if (j.contains("tilings")) {
            for (const json &t : j.at("tilings")) {
                g.tilings.push_back(tiling_from_json(t));
            }
        }
        if (j.contains("tiling_bands")) {
            g.tilings = band_tilings(g.rows, g.cols, j.at("tiling_bands").get<std::vector<int>>());
            if (g.tilings.empty()) {
                throw ConfigError("tiling_bands cannot partition the lattice");
            }
        }
        for (const Tiling &t : g.tilings) {
            t.validate(g.rows, g.cols);
        }
        const Palette p = g.resolved_palette();
        if (g.family == CircuitFamily::CliffordReducible) {
            if (g.depth < 2) {
                throw ConfigError("clifford-reducible circuits need depth >= 2");
            }
            if (!p.t_channels) {
                throw ConfigError("clifford-reducible circuits need a palette with T channels (clifford or full)");
            }
            for (GateKind k : p.single_qubit) {
                if (!is_clifford(k)) {
                    throw ConfigError("clifford-reducible circuits need a Clifford base palette; use 'clifford'");
                }
            }
        }
        if (!(g.two_qubit_fraction >= 0.0 && g.two_qubit_fraction <= 1.0) ||
            !(g.pair_rate >= 0.0 && g.pair_rate <= 1.0) || !(g.identity_weight >= 0.0)) {
            throw ConfigError("two_qubit_fraction and pair_rate must lie in [0, 1], identity_weight must be >= 0");
        }
        return g;
    });
}

LabelConfig label_config_from_json(const json &j) {
    return as_config_error("labeler config", [&] {
        LabelConfig l;
        if (j.contains("kind")) {
            l.kind = parse_label_kind(j.at("kind").get<std::string>());
        }
        if (j.contains("stochastic")) {
            l.stochastic = stochastic_model_from_json(j.at("stochastic"));
        }
        if (j.contains("noise")) {
            l.noise = sim_noise_model_from_json(j.at("noise"));
        }
        read_if(j, "shots", l.shots);
        read_if(j, "density_qubit_limit", l.limits.density_qubits);
        read_if(j, "statevector_qubit_limit", l.limits.statevector_qubits);
        if (l.shots < 1) {
            throw ConfigError("shots must be at least 1");
        }
        return l;
    });
}

DatasetConfig dataset_config_from_json(const json &j) {
    return as_config_error("dataset config", [&] {
        DatasetConfig c;
        if (j.contains("generator")) {
            c.generator = generator_config_from_json(j.at("generator"));
        }
        if (j.contains("labeler")) {
            c.labeler = label_config_from_json(j.at("labeler"));
        }
        read_if(j, "count", c.count);
        read_if(j, "master_seed", c.master_seed);
        read_if(j, "workers", c.workers);
        return c;
    });
}

std::string config_digest(const json &j) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void check_labeler_capacity(const GeneratorConfig &g, const LabelConfig &l) {
    const int qubits = g.rows * g.cols;
    switch (l.kind) {
        case LabelKind::None:
        case LabelKind::ProductModel:
            return;
        case LabelKind::ExactDensity:
            if (qubits > l.limits.density_qubits) {
                throw ConfigError("exact-density labeler is limited to " + std::to_string(l.limits.density_qubits) +
                                  " qubits but the lattice has " + std::to_string(qubits) +
                                  "; use tiled-product with a tiling catalog or the trajectory labeler");
            }
            return;
        case LabelKind::Trajectory:
            if (qubits > l.limits.statevector_qubits) {
                throw ConfigError("trajectory labeler is limited to " + std::to_string(l.limits.statevector_qubits) +
                                  " qubits but the lattice has " + std::to_string(qubits));
            }
            return;
        case LabelKind::TiledProduct:
            if (l.noise.scope != CrosstalkScope::GatePairOnly) {
                throw ConfigError("tiled-product labels need gate-pair-only crosstalk");
            }
            for (const Tiling &t : catalog_or_whole(g)) {
                for (const Rect &r : t.tiles) {
                    if (r.x_extent * r.y_extent > l.limits.density_qubits) {
                        throw ConfigError("tiled-product labeler is limited to tiles of " +
                                          std::to_string(l.limits.density_qubits) + " qubits but a tile has " +
                                          std::to_string(r.x_extent * r.y_extent));
                    }
                }
            }
            return;
    }
}

std::vector<Record> generate_records(const DatasetConfig &config) {
    const GeneratorConfig &g = config.generator;
    CircuitRecipe base;
    base.rows = g.rows;
    base.cols = g.cols;
    base.depth = g.depth;
    base.palette = g.resolved_palette();
    base.two_qubit_fraction = g.two_qubit_fraction;
    if (g.family == CircuitFamily::CliffordReducible) {
        base.pair_rate = g.pair_rate;
        base.reversed_pairs = g.reversed_pairs;
    }
    std::vector<Record> out(config.count);
    parallel_for(config.count, config.workers, [&](std::size_t i) {
        Record r;
        r.index = i;
        r.seed = derive_seed(config.master_seed, i);
        r.family = g.family;
        CircuitRecipe recipe = base;
        if (!g.tilings.empty()) {
            Rng pick(derive_seed(r.seed, kStreamTiling));
            r.tiling = g.tilings[pick.below(g.tilings.size())];
            recipe.tiling = r.tiling;
        }
        r.circuit = generate_circuit(recipe, derive_seed(r.seed, kStreamCircuit));
        out[i] = std::move(r);
    });
    return out;
}

double label_record(const Record &record, const LabelConfig &labeler, double *standard_error) {
    if (standard_error) {
        *standard_error = 0.0;
    }
    switch (labeler.kind) {
        case LabelKind::None:
            throw ConfigError("no labeler configured");
        case LabelKind::ProductModel:
            return product_fidelity(record.circuit, labeler.stochastic);
        case LabelKind::ExactDensity:
            return exact_fidelity(record.circuit, labeler.noise, labeler.limits);
        case LabelKind::Trajectory: {
            const FidelityEstimate e =
                simulate_trajectories(compile_noisy_program(record.circuit, labeler.noise), labeler.shots,
                                      derive_seed(record.seed, kStreamTrajectory), labeler.limits);
            if (standard_error) {
                *standard_error = e.standard_error;
            }
            return e.value;
        }
        case LabelKind::TiledProduct: {
            const Tiling t = record.tiling ? *record.tiling
                                           : Tiling::whole(record.circuit.rows(), record.circuit.cols());
            return tiled_fidelity(record.circuit, t, labeler.noise, labeler.limits).value;
        }
    }
    return 0.0;
}

void label_records(std::vector<Record> &records, const LabelConfig &labeler, int workers) {
    if (labeler.kind == LabelKind::None) {
        for (Record &r : records) {
            r.label.reset();
            r.label_kind = LabelKind::None;
            r.label_error = 0.0;
            r.shots = 0;
        }
        return;
    }
    for (const Record &r : records) {
        GeneratorConfig shape;
        shape.rows = r.circuit.rows();
        shape.cols = r.circuit.cols();
        if (r.tiling) {
            shape.tilings = {*r.tiling};
        }
        check_labeler_capacity(shape, labeler);
    }
    parallel_for(records.size(), workers, [&](std::size_t i) {
        Record &r = records[i];
        double err = 0.0;
        r.label = label_record(r, labeler, &err);
        r.label_kind = labeler.kind;
        r.label_error = err;
        r.shots = labeler.kind == LabelKind::Trajectory ? labeler.shots : 0;
    });
}

json make_manifest(const DatasetConfig &config, const std::vector<Record> &records) {
    const json cfg = to_json(config);
    json families = json::object();
    for (const Record &r : records) {
        const std::string name = family_name(r.family);
        families[name] = families.value(name, 0) + 1;
    }
    const Palette p = config.generator.resolved_palette();
    return json{{"format", kDatasetFormat},
                {"count", records.size()},
                {"families", families},
                {"grid", {config.generator.rows, config.generator.cols}},
                {"depth", config.generator.depth},
                {"palette", config.generator.palette},
                {"channels", p.channels()},
                {"shape", {config.generator.depth, config.generator.rows, config.generator.cols, p.channels()}},
                {"master_seed", config.master_seed},
                {"label_kind", label_kind_name(config.labeler.kind)},
                {"noise_digest", config_digest(to_json(config.labeler))},
                {"label_histogram", histogram(records)},
                {"config", cfg},
                {"config_digest", config_digest(cfg)}};
}

Dataset build_dataset(const DatasetConfig &config) {
    check_labeler_capacity(config.generator, config.labeler);
    std::vector<Record> records = generate_records(config);
    label_records(records, config.labeler, config.workers);
    Dataset d;
    d.manifest = make_manifest(config, records);
    d.records = std::move(records);
    return d;
}

json record_to_json(const Record &r) {
    json j{{"index", r.index},
           {"seed", r.seed},
           {"family", family_name(r.family)},
           {"circuit", circuit_to_json(r.circuit)}};
    if (r.tiling) {
        j["tiling"] = tiling_to_json(*r.tiling);
    }
    j["label_kind"] = label_kind_name(r.label_kind);
    j["label"] = r.label ? json(*r.label) : json(nullptr);
    if (r.label_kind == LabelKind::Trajectory) {
        j["label_error"] = r.label_error;
        j["shots"] = r.shots;
    }
    return j;
}

Record record_from_json(const json &j) {
    try {
        Record r;
        r.index = j.at("index").get<std::uint64_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.family = parse_family(j.at("family").get<std::string>());
        r.circuit = circuit_from_json(j.at("circuit"));
        if (j.contains("tiling")) {
            r.tiling = tiling_from_json(j.at("tiling"));
            r.tiling->validate(r.circuit.rows(), r.circuit.cols());
        }
        r.label_kind = parse_label_kind(j.value("label_kind", std::string("none")));
        if (j.contains("label") && !j.at("label").is_null()) {
            const double v = j.at("label").get<double>();
            if (!(v >= 0.0 && v <= 1.0)) {
                throw FormatError("label " + std::to_string(v) + " is outside [0, 1]");
            }
            r.label = v;
        }
        read_if(j, "label_error", r.label_error);
        read_if(j, "shots", r.shots);
        return r;
    } catch (const json::exception &e) {
        throw FormatError(std::string("malformed record: ") + e.what());
    } catch (const ConfigError &e) {
        throw FormatError(e.what());
    } catch (const ParameterError &e) {
        throw FormatError(e.what());
    }
}

std::string dataset_to_string(const Dataset &d) {
    std::string out = d.manifest.dump();
    out += '\n';
    for (const Record &r : d.records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

void write_dataset(const Dataset &d, const std::string &path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw Error("cannot open '" + path + "' for writing");
    }
    f << dataset_to_string(d);
    if (!f) {
        throw Error("failed writing '" + path + "'");
    }
}

Dataset parse_dataset(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    Dataset d;
    bool have_manifest = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception &e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!have_manifest) {
            if (!j.is_object() || j.value("format", std::string()) != kDatasetFormat) {
                throw FormatError("line " + std::to_string(line_no) + ": unsupported dataset format (expected " +
                                  std::string(kDatasetFormat) + ")");
            }
            d.manifest = std::move(j);
            have_manifest = true;
            continue;
        }
        try {
            d.records.push_back(record_from_json(j));
        } catch (const Error &e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_manifest) {
        throw FormatError("line 1: missing dataset manifest");
    }
    const auto expected = d.manifest.value("count", static_cast<std::size_t>(0));
    if (expected != d.records.size()) {
        throw ValidationError("manifest lists " + std::to_string(expected) + " records but the file has " +
                              std::to_string(d.records.size()) + " (line " + std::to_string(line_no + 1) + ")");
    }
    return d;
}

Dataset read_dataset(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot open '" + path + "' for reading");
    }
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_dataset(buf.str());
}

std::pair<Dataset, Dataset> split_dataset(const Dataset &d, std::size_t train_count, std::uint64_t seed) {
    if (train_count > d.records.size()) {
        throw ParameterError("cannot take " + std::to_string(train_count) + " training records from " +
                             std::to_string(d.records.size()));
    }
    std::vector<std::size_t> order(d.records.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, kStreamSplit));
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::size_t> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
    std::vector<std::size_t> second(order.begin() + static_cast<std::ptrdiff_t>(train_count), order.end());
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    auto take = [&](const std::vector<std::size_t> &idx, const char *part) {
        Dataset out;
        for (std::size_t i : idx) {
            out.records.push_back(d.records[i]);
        }
        out.manifest = d.manifest;
        out.manifest["count"] = out.records.size();
        out.manifest["label_histogram"] = histogram(out.records);
        out.manifest["split"] = json{{"part", part}, {"seed", seed}, {"train_count", train_count}};
        return out;
    };
    return {take(first, "train"), take(second, "test")};
}

int dataset_channels(const Dataset &d) {
    if (d.manifest.contains("channels")) {
        return d.manifest.at("channels").get<int>();
    }
    return palette_by_name(d.manifest.value("palette", std::string("full"))).channels();
}

std::vector<CircuitTensor> encode_records(const Dataset &d) {
    Palette p = Palette::full();
    p.t_channels = dataset_channels(d) == 15;
    if (!p.t_channels) {
        p.single_qubit = Palette::single_moment().single_qubit;
    }
    std::vector<CircuitTensor> out;
    out.reserve(d.records.size());
    for (const Record &r : d.records) {
        out.push_back(encode_one_hot(r.circuit, p));
    }
    return out;
}

std::vector<double> labels_of(const Dataset &d) {
    std::vector<double> out;
    out.reserve(d.records.size());
    for (const Record &r : d.records) {
        if (!r.label) {
            throw ValidationError("record " + std::to_string(r.index) + " has no label");
        }
        out.push_back(*r.label);
    }
    return out;
}

}  // namespace qfe
