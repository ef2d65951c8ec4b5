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

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "gtest/gtest.h"

#include "qfe/error.h"
#include "qfe/rng.h"

using namespace qfe;

namespace {

DatasetConfig product_config(std::size_t count) {
    DatasetConfig c;
    c.generator.rows = 3;
    c.generator.cols = 3;
    c.generator.depth = 1;
    c.labeler.kind = LabelKind::ProductModel;
    c.labeler.stochastic = StochasticModel::per_gate_crosstalk();
    c.count = count;
    c.master_seed = 99;
    return c;
}

std::string temp_path(const std::string &name) {
    return (std::filesystem::temp_directory_path() / ("qfe_dataset_test_" + name)).string();
}

}  // namespace

TEST(dataset, empty_dataset_has_valid_manifest) {
    const Dataset d = build_dataset(product_config(0));
    EXPECT_TRUE(d.records.empty());
    EXPECT_EQ(d.manifest.at("format"), kDatasetFormat);
    EXPECT_EQ(d.manifest.at("count"), 0);
    const Dataset back = parse_dataset(dataset_to_string(d));
    EXPECT_TRUE(back.records.empty());
}

TEST(dataset, paper_split_shape) {
    DatasetConfig c = product_config(2500);
    c.labeler.stochastic = StochasticModel::uniform();
    const Dataset d = build_dataset(c);
    const auto [train, test] = split_dataset(d, 1500, 3);
    EXPECT_EQ(train.records.size(), 1500u);
    EXPECT_EQ(test.records.size(), 1000u);
    EXPECT_EQ(dataset_channels(train), 13);
    const auto tensors = encode_records(test);
    EXPECT_EQ(tensors.front().channels, 13);
    EXPECT_EQ(tensors.front().depth, 1);
}

TEST(dataset, rebuild_is_byte_identical_and_worker_independent) {
    DatasetConfig c = product_config(200);
    const std::string one = dataset_to_string(build_dataset(c));
    EXPECT_EQ(one, dataset_to_string(build_dataset(c)));
    c.workers = 4;
    EXPECT_EQ(one, dataset_to_string(build_dataset(c)));
    c.master_seed = 100;
    EXPECT_NE(one, dataset_to_string(build_dataset(c)));
}

TEST(dataset, product_labels_match_independent_evaluation) {
    const DatasetConfig c = product_config(300);
    const Dataset d = build_dataset(c);
    for (const Record &r : d.records) {
        ASSERT_TRUE(r.label.has_value());
        EXPECT_EQ(*r.label, product_fidelity(r.circuit, StochasticModel::per_gate_crosstalk()));
        EXPECT_EQ(r.seed, derive_seed(c.master_seed, r.index));
    }
}

TEST(dataset, manifest_histogram_counts_labels) {
    const Dataset d = build_dataset(product_config(150));
    const auto counts = d.manifest.at("label_histogram").at("counts").get<std::vector<std::size_t>>();
    std::size_t total = 0;
    for (std::size_t v : counts) {
        total += v;
    }
    EXPECT_EQ(total, 150u);
    EXPECT_EQ(d.manifest.at("config_digest"), config_digest(d.manifest.at("config")));
}

TEST(dataset, file_roundtrip_preserves_bits) {
    DatasetConfig c;
    c.generator.depth = 4;
    c.generator.family = CircuitFamily::CliffordReducible;
    c.generator.palette = "clifford";
    c.generator.tilings = band_tilings(3, 3, {1, 2});
    c.labeler.kind = LabelKind::Trajectory;
    c.labeler.shots = 16;
    c.count = 100;
    c.master_seed = 5;
    const Dataset d = build_dataset(c);
    const std::string path = temp_path("roundtrip.jsonl");
    write_dataset(d, path);
    const Dataset back = read_dataset(path);
    ASSERT_EQ(back.records.size(), d.records.size());
    for (std::size_t i = 0; i < d.records.size(); ++i) {
        EXPECT_EQ(back.records[i], d.records[i]);
        EXPECT_EQ(std::bit_cast<std::uint64_t>(*back.records[i].label),
                  std::bit_cast<std::uint64_t>(*d.records[i].label));
    }
    EXPECT_EQ(back.manifest, d.manifest);
    std::filesystem::remove(path);
}

TEST(dataset, truncated_file_reports_line) {
    const std::string text = dataset_to_string(build_dataset(product_config(5)));
    const std::string cut = text.substr(0, text.size() - 30);
    try {
        parse_dataset(cut);
        FAIL() << "expected FormatError";
    } catch (const FormatError &e) {
        EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos) << e.what();
    }
}

TEST(dataset, count_mismatch_and_version) {
    const Dataset d = build_dataset(product_config(5));
    Dataset fewer = d;
    fewer.records.pop_back();
    EXPECT_THROW(parse_dataset(dataset_to_string(fewer)), ValidationError);
    Dataset future = d;
    future.manifest["format"] = "qfe-ds/2";
    EXPECT_THROW(parse_dataset(dataset_to_string(future)), FormatError);
}

TEST(dataset, split_is_disjoint_and_stable) {
    const Dataset d = build_dataset(product_config(100));
    const auto [a, b] = split_dataset(d, 60, 11);
    const auto [a2, b2] = split_dataset(d, 60, 11);
    std::set<std::uint64_t> seen;
    for (const Record &r : a.records) {
        seen.insert(r.index);
    }
    for (const Record &r : b.records) {
        EXPECT_FALSE(seen.contains(r.index));
        seen.insert(r.index);
    }
    EXPECT_EQ(seen.size(), 100u);
    EXPECT_EQ(dataset_to_string(a), dataset_to_string(a2));
    EXPECT_EQ(dataset_to_string(b), dataset_to_string(b2));
    const auto [c, unused] = split_dataset(d, 60, 12);
    EXPECT_NE(dataset_to_string(a), dataset_to_string(c));
    EXPECT_THROW(split_dataset(d, 101, 1), ParameterError);
}

TEST(dataset, capacity_errors_name_the_limit) {
    DatasetConfig c;
    c.generator.rows = 4;
    c.generator.cols = 4;
    c.labeler.kind = LabelKind::ExactDensity;
    c.count = 1;
    try {
        build_dataset(c);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("10 qubits"), std::string::npos) << e.what();
    }
    c.labeler.kind = LabelKind::TiledProduct;
    c.generator.tilings = {Tiling{{Rect{0, 0, 2, 4}, Rect{2, 0, 2, 4}}}};
    EXPECT_NO_THROW(check_labeler_capacity(c.generator, c.labeler));
    c.labeler.noise.scope = CrosstalkScope::IncludeNeighbors;
    EXPECT_THROW(check_labeler_capacity(c.generator, c.labeler), ConfigError);
}

TEST(dataset, tiled_product_equals_exact_density_on_tiled_records) {
    DatasetConfig c;
    c.generator.depth = 6;
    c.generator.palette = "full";
    c.generator.tilings = band_tilings(3, 3, {1, 2});
    c.count = 6;
    c.master_seed = 8;
    std::vector<Record> records = generate_records(c);
    LabelConfig tiled;
    tiled.kind = LabelKind::TiledProduct;
    LabelConfig exact;
    exact.kind = LabelKind::ExactDensity;
    for (const Record &r : records) {
        EXPECT_NEAR(label_record(r, tiled), label_record(r, exact), 1e-10);
    }
}

TEST(dataset, config_json_roundtrip_and_errors) {
    DatasetConfig c = product_config(7);
    c.generator.tilings = band_tilings(3, 3, {1, 2});
    const auto j = to_json(c);
    EXPECT_EQ(to_json(dataset_config_from_json(j)), j);
    EXPECT_THROW(dataset_config_from_json(nlohmann::json::parse(R"({"generator":{"family":"weird"}})")),
                 ConfigError);
    EXPECT_THROW(dataset_config_from_json(nlohmann::json::parse(R"({"generator":{"rows":"three"}})")),
                 ConfigError);
    EXPECT_THROW(
        dataset_config_from_json(nlohmann::json::parse(R"({"generator":{"family":"clifford-reducible","depth":1}})")),
        ConfigError);
    const auto bands = dataset_config_from_json(nlohmann::json::parse(R"({"generator":{"tiling_bands":[1,2]}})"));
    EXPECT_EQ(bands.generator.tilings.size(), 6u);
}
