// SPDX-License-Identifier: Apache-2.0
//
// frespond: body-shadowing diffraction and passive detection toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace frespond {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. sheet not between the antennas).
class domain_error : public error {
public:
    using error::error;
};

/// Malformed configuration or input data. Maps to CLI exit code 2.
class validation_error : public error {
public:
    using error::error;
};

/// Pattern file that cannot be loaded.
class load_error : public validation_error {
public:
    using validation_error::validation_error;
};

/// Measurement CSV that cannot be ingested.
class ingestion_error : public validation_error {
public:
    using validation_error::validation_error;
};

/// Hypothesis with zero spread.
class degenerate_hypothesis_error : public validation_error {
public:
    using validation_error::validation_error;
};

/// A computation would exceed a configured budget.
class resource_error : public error {
public:
    using error::error;
};

} // namespace frespond
