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

#include <iosfwd>

namespace qfe {

/// Entry point of the `qfe` tool. Returns 0 on success, 1 on a runtime
/// error and 2 on a usage error; diagnostics go to `err`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace qfe
