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

#include <string>

#include <nlohmann/json.hpp>

#include "qfe/network.h"

namespace qfe {

/// Binary container: the 8-byte magic "QFECKPT1", a little-endian uint64
/// header length, a JSON header {"spec", "param_count", "metadata"}, then the
/// parameters as little-endian IEEE doubles.
inline constexpr char kCheckpointMagic[] = "QFECKPT1";

struct Checkpoint {
    Network network;
    nlohmann::json metadata;
};

void save_checkpoint(const Network &network, const nlohmann::json &metadata, const std::string &path);
/// Throws FormatError on a bad magic, truncated payload or size mismatch.
Checkpoint load_checkpoint(const std::string &path);
bool is_network_checkpoint(const std::string &path);

}  // namespace qfe
