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

#include <stdexcept>
#include <string>

namespace qfe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument values (dimensions, probabilities, counts).
class ParameterError : public Error {
   public:
    using Error::Error;
};

/// A value violates a structural invariant (circuit legality, tiling, PSD-ness).
class ValidationError : public Error {
   public:
    using Error::Error;
};

/// Requested work exceeds a configured size limit.
class CapacityError : public Error {
   public:
    using Error::Error;
};

class EncodingError : public Error {
   public:
    using Error::Error;
};

class DecodeError : public Error {
   public:
    using Error::Error;
};

/// Malformed or incompatible files (datasets, checkpoints, configs).
class FormatError : public Error {
   public:
    using Error::Error;
};

/// Network description does not chain into a valid sequence of shapes.
class SpecError : public Error {
   public:
    using Error::Error;
};

class TrainingError : public Error {
   public:
    using Error::Error;
};

class ConfigError : public Error {
   public:
    using Error::Error;
};

}  // namespace qfe
