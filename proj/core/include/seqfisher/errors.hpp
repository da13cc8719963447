// Copyright 2026 The seqfisher Authors
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

namespace seqfisher {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invalid input: bad arguments, malformed configuration, violated
// preconditions that the caller could have checked.
class ConfigError : public Error {
  public:
    using Error::Error;
};

// A numerical contract was violated at run time (probabilities out of range,
// aborted-trajectory budget exceeded, branch cap exceeded, ...).
class NumericalError : public Error {
  public:
    using Error::Error;
};

// A sampled outcome had vanishing probability in a finite-difference replica,
// so the parameter derivative along this trajectory is undefined.
class TrajectoryAborted : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace seqfisher
