/**
 * Copyright 2026 psw authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace psw {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or malformed configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition does not hold (CLI exit code 3).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The Fock cutoff is too small for the requested state or displacement.
class CutoffError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Evaluation refused because the series is exponentially ill-conditioned.
class IllConditionedError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace psw
