// SPDX-License-Identifier: Apache-2.0
//
// cdimap - channel distribution maps for ultra-reliable rate selection
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

#ifndef CDIMAP_ERROR_HPP
#define CDIMAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cdimap {

// Root of everything the library throws on contract violations.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

// Invalid scenario, split or campaign configuration.
class ConfigError : public Error {
 public:
    using Error::Error;
};

// Malformed file or non-uniform data layout.
class FormatError : public Error {
 public:
    using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
    using Error::Error;
};

// Data is well-formed but cannot be analysed (e.g. no CIR taps above threshold).
class AnalysisError : public Error {
 public:
    using Error::Error;
};

// Too few samples or locations for the requested estimate.
class InsufficientDataError : public Error {
 public:
    using Error::Error;
};

// Linear algebra breakdown, carries diagnostics in the message.
class NumericalError : public Error {
 public:
    using Error::Error;
};

}  // namespace cdimap

#endif
