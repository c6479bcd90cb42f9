// Copyright 2026 The adabs Authors
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

namespace adabs {

/// A precondition on an argument was violated (negative time, n > cutoff, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The Fock cutoff cannot hold the requested state within the tail tolerance.
struct TruncationError : std::runtime_error {
    double tail_mass;
    TruncationError(const std::string &what, double tail)
        : std::runtime_error(what), tail_mass(tail) {}
};

/// Adaptive quadrature ran out of subdivisions before reaching its tolerance.
struct QuadratureError : std::runtime_error {
    double achieved;
    QuadratureError(const std::string &what, double achieved_error)
        : std::runtime_error(what), achieved(achieved_error) {}
};

}  // namespace adabs
