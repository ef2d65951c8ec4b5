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

#include "qfe/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "qfe/error.h"

namespace qfe {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr std::size_t kMagicSize = 8;

}  // namespace

void save_checkpoint(const Network &network, const json &metadata, const std::string &path) {
    const std::string header =
        json{{"spec", to_json(network.spec())},
             {"param_count", network.param_count()},
             {"output", {{"offset", network.output_scale().offset}, {"scale", network.output_scale().scale}}},
             {"metadata", metadata}}
            .dump();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw Error("cannot open '" + path + "' for writing");
    }
    const std::uint64_t len = header.size();
    f.write(kCheckpointMagic, kMagicSize);
    f.write(reinterpret_cast<const char *>(&len), sizeof len);
    f.write(header.data(), static_cast<std::streamsize>(header.size()));
    const auto params = network.params();
    f.write(reinterpret_cast<const char *>(params.data()), static_cast<std::streamsize>(params.size_bytes()));
    if (!f) {
        throw Error("failed writing '" + path + "'");
    }
}

bool is_network_checkpoint(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    char magic[kMagicSize] = {};
    f.read(magic, kMagicSize);
    return f && std::memcmp(magic, kCheckpointMagic, kMagicSize) == 0;
}

Checkpoint load_checkpoint(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot open '" + path + "' for reading");
    }
    char magic[kMagicSize] = {};
    f.read(magic, kMagicSize);
    if (!f || std::memcmp(magic, kCheckpointMagic, kMagicSize) != 0) {
        throw FormatError("'" + path + "' is not a network checkpoint");
    }
    std::uint64_t len = 0;
    f.read(reinterpret_cast<char *>(&len), sizeof len);
    if (!f || len > (1ULL << 30)) {
        throw FormatError("checkpoint header is truncated or corrupt");
    }
    std::string header(len, '\0');
    f.read(header.data(), static_cast<std::streamsize>(len));
    if (!f) {
        throw FormatError("checkpoint header is truncated");
    }
    json h;
    try {
        h = json::parse(header);
    } catch (const json::exception &e) {
        throw FormatError(std::string("checkpoint header is not JSON: ") + e.what());
    }
    Network net(network_spec_from_json(h.at("spec")));
    if (h.value("param_count", static_cast<std::size_t>(0)) != net.param_count()) {
        throw FormatError("checkpoint parameter count does not match its spec");
    }
    if (h.contains("output")) {
        try {
            net.set_output_scale({h["output"].at("offset").get<double>(), h["output"].at("scale").get<double>()});
        } catch (const json::exception &e) {
            throw FormatError(std::string("checkpoint output scale is malformed: ") + e.what());
        } catch (const ParameterError &e) {
            throw FormatError(std::string("checkpoint output scale is invalid: ") + e.what());
        }
    }
    auto params = net.params();
    f.read(reinterpret_cast<char *>(params.data()), static_cast<std::streamsize>(params.size_bytes()));
    if (!f) {
        throw FormatError("checkpoint parameters are truncated");
    }
    f.peek();
    if (!f.eof()) {
        throw FormatError("checkpoint has trailing bytes");
    }
    return Checkpoint{std::move(net), h.value("metadata", json::object())};
}

}  // namespace qfe
