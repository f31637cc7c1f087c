// Copyright 2026 The qgcnn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qgcnn {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration values: qubit counts outside [1, 12], non-positive
/// sigma, identical generator classes, zero sample counts, and the like.
struct ConfigError : Error {
    using Error::Error;
};

/// API contract violations: out-of-range indices, mismatched dimensions.
struct UsageError : Error {
    using Error::Error;
};

/// Malformed dataset or checkpoint files (bad magic, truncation, bad values).
struct FormatError : Error {
    using Error::Error;
};

/// Input that cannot be turned into a quantum state (zero-norm vector).
struct EncodingError : Error {
    using Error::Error;
};

/// Non-finite values encountered while training.
struct NumericError : Error {
    using Error::Error;
};

/// Filesystem failures: unreadable or unwritable paths.
struct IoError : Error {
    using Error::Error;
};

} // namespace qgcnn
