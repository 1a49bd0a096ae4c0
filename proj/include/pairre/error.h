// Copyright 2026 The pairre Authors.
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

#ifndef PAIRRE_ERROR_H_
#define PAIRRE_ERROR_H_

#include <stdexcept>
#include <string>

namespace pairre {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Malformed input records or files.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Shape or dimension mismatch between two artifacts.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A forward pass produced a NaN or infinity.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

}  // namespace pairre

#endif  // PAIRRE_ERROR_H_
