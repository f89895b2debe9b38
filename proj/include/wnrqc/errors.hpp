// Copyright 2026 The wnrqc Authors
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

namespace wnrqc {

/// Out-of-range or inconsistent input parameter.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The requested problem exceeds an engine's configured size cap.
struct CapacityError : std::length_error {
    using std::length_error::length_error;
};

/// An input violated a structural precondition (e.g. a coupled state outside
/// the accessible subspace).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// Z values at or below 1, where F-bar and the white-noise bound are undefined.
struct DegenerateInput : std::domain_error {
    using std::domain_error::domain_error;
};

namespace detail {

inline void require(bool ok, const std::string &msg) {
    if (!ok) {
        throw ParameterError(msg);
    }
}

}  // namespace detail

}  // namespace wnrqc
