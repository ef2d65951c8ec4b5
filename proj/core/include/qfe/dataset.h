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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfe/encoding.h"
#include "qfe/lattice.h"
#include "qfe/noise.h"
#include "qfe/simulator.h"

namespace qfe {

inline constexpr const char *kDatasetFormat = "qfe-ds/1";

enum class CircuitFamily { Random, CliffordReducible };

/// How circuits are drawn. With a non-empty tiling catalog every record picks
/// one tiling uniformly and its two-qubit gates stay inside the tiles.
struct GeneratorConfig {
    int rows = 3;
    int cols = 3;
    int depth = 1;
    CircuitFamily family = CircuitFamily::Random;
    /// "single-moment", "clifford" or "full".
    std::string palette = "single-moment";
    double identity_weight = 1.0;
    double two_qubit_fraction = 0.3;
    double pair_rate = 0.15;
    bool reversed_pairs = false;
    std::vector<Tiling> tilings;

    Palette resolved_palette() const;
};

enum class LabelKind { None, ProductModel, ExactDensity, Trajectory, TiledProduct };

struct LabelConfig {
    LabelKind kind = LabelKind::None;
    StochasticModel stochastic;
    SimNoiseModel noise;
    int shots = 4096;
    SimulatorLimits limits;
};

struct DatasetConfig {
    GeneratorConfig generator;
    LabelConfig labeler;
    std::size_t count = 0;
    std::uint64_t master_seed = 0;
    /// Threads used for generation and labeling; output never depends on it.
    int workers = 1;
};

struct Record {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    CircuitFamily family = CircuitFamily::Random;
    LatticeCircuit circuit{1, 1, 1};
    std::optional<Tiling> tiling;
    std::optional<double> label;
    LabelKind label_kind = LabelKind::None;
    /// Standard error of a trajectory label; zero for exact labels.
    double label_error = 0.0;
    int shots = 0;

    bool operator==(const Record &) const = default;
};

/// First line of a dataset file followed by one record per line.
struct Dataset {
    nlohmann::json manifest;
    std::vector<Record> records;
};

std::string family_name(CircuitFamily f);
CircuitFamily parse_family(const std::string &name);
std::string label_kind_name(LabelKind k);
LabelKind parse_label_kind(const std::string &name);
Palette palette_by_name(const std::string &name);

nlohmann::json to_json(const GeneratorConfig &g);
nlohmann::json to_json(const LabelConfig &l);
nlohmann::json to_json(const DatasetConfig &c);
/// Missing keys keep their defaults. Throws ConfigError on unknown names,
/// wrong types or out-of-range values. A generator may give its tiling
/// catalog as "tilings" (explicit list) or "tiling_bands" (band widths).
GeneratorConfig generator_config_from_json(const nlohmann::json &j);
LabelConfig label_config_from_json(const nlohmann::json &j);
DatasetConfig dataset_config_from_json(const nlohmann::json &j);

/// FNV-1a 64 of the compact JSON text, as 16 hex digits.
std::string config_digest(const nlohmann::json &j);

/// Throws ConfigError naming the limit when the labeler cannot handle the
/// generator's lattice or tiles.
void check_labeler_capacity(const GeneratorConfig &g, const LabelConfig &l);

/// Record i uses seed derive_seed(master_seed, i); its circuit, tiling choice
/// and trajectory sampling use child streams of that seed.
std::vector<Record> generate_records(const DatasetConfig &config);
void label_records(std::vector<Record> &records, const LabelConfig &labeler, int workers);
double label_record(const Record &record, const LabelConfig &labeler, double *standard_error = nullptr);

nlohmann::json make_manifest(const DatasetConfig &config, const std::vector<Record> &records);
/// Generate, label and attach a manifest.
Dataset build_dataset(const DatasetConfig &config);

nlohmann::json record_to_json(const Record &r);
Record record_from_json(const nlohmann::json &j);

std::string dataset_to_string(const Dataset &d);
void write_dataset(const Dataset &d, const std::string &path);
/// Throws FormatError (with the line number) on malformed content or an
/// unsupported format, ValidationError when the manifest count disagrees.
Dataset read_dataset(const std::string &path);
Dataset parse_dataset(const std::string &text);

/// Seed-stable disjoint split: a permutation drawn from `seed` sends the first
/// `train_count` records to the first part and the rest to the second.
std::pair<Dataset, Dataset> split_dataset(const Dataset &d, std::size_t train_count, std::uint64_t seed);

/// Channel count recorded in a manifest, falling back to the palette.
int dataset_channels(const Dataset &d);
std::vector<CircuitTensor> encode_records(const Dataset &d);
std::vector<double> labels_of(const Dataset &d);

}  // namespace qfe
